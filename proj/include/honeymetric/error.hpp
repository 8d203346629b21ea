#pragma once

#include <stdexcept>
#include <string>

namespace honeymetric {

/// Inputs whose shapes do not fit together (mismatched spaces, bad pmf).
class structural_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A parameter outside its mathematical domain (k < 2, alpha outside (0,1), ...).
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A numerical routine could not reach the requested accuracy.
class numerical_error : public std::runtime_error {
public:
    numerical_error(const std::string& what, double achieved_error = 0.0)
        : std::runtime_error(what), achieved_error_(achieved_error) {}

    double achieved_error() const noexcept { return achieved_error_; }

private:
    double achieved_error_;
};

/// An exact enumeration refused because its cost bound exceeds the guard.
class infeasible_error : public std::runtime_error {
public:
    infeasible_error(const std::string& what, double cost)
        : std::runtime_error(what), cost_(cost) {}

    double cost() const noexcept { return cost_; }

private:
    double cost_;
};

/// File ingestion failures; carries the offending path.
class io_error : public std::runtime_error {
public:
    io_error(const std::string& what, std::string path)
        : std::runtime_error(what + ": " + path), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

} // namespace honeymetric
