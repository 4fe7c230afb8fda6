#pragma once

#include "regspec/errors.hpp"
#include "regspec/estimator.hpp"
#include "regspec/fourier.hpp"
#include "regspec/io.hpp"
#include "regspec/likelihood.hpp"
#include "regspec/metrics.hpp"
#include "regspec/parallel.hpp"
#include "regspec/penalty.hpp"
#include "regspec/prior_process.hpp"
#include "regspec/random.hpp"
#include "regspec/simulate.hpp"
