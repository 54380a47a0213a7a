#pragma once

// Sparsity-penalized maximum-likelihood matrix completion under sparse factor
// models: ADMM solver with IHT and projected-Newton subsolvers, four
// observation likelihoods, comparison baselines, synthetic data generators,
// and theoretical error-bound calculators.

#include "sfmc/core.hpp"
#include "sfmc/likelihoods.hpp"
#include "sfmc/problem.hpp"
#include "sfmc/solver.hpp"
#include "sfmc/baselines.hpp"
#include "sfmc/synth.hpp"
#include "sfmc/theory.hpp"
#include "sfmc/io.hpp"
#include "sfmc/experiment.hpp"
#include "sfmc/presets.hpp"
