#pragma once

#include "honeymetric/continuous_model.hpp"
#include "honeymetric/error.hpp"
#include "honeymetric/flatness.hpp"
#include "honeymetric/games.hpp"
#include "honeymetric/metric_curve.hpp"
#include "honeymetric/missing_mass.hpp"
#include "honeymetric/models.hpp"
#include "honeymetric/numeric.hpp"
#include "honeymetric/parallel.hpp"
#include "honeymetric/password_model.hpp"
#include "honeymetric/quadrature.hpp"
#include "honeymetric/ratio_spectrum.hpp"
#include "honeymetric/sampler.hpp"
#include "honeymetric/success_number.hpp"
