#pragma once

#include "traceinv/bounds.hpp"
#include "traceinv/cholesky.hpp"
#include "traceinv/design_matrix.hpp"
#include "traceinv/differential_evolution.hpp"
#include "traceinv/errors.hpp"
#include "traceinv/exact_trace.hpp"
#include "traceinv/gcv.hpp"
#include "traceinv/gp_experiment.hpp"
#include "traceinv/hutchinson.hpp"
#include "traceinv/inequality.hpp"
#include "traceinv/interpolant.hpp"
#include "traceinv/kernel.hpp"
#include "traceinv/lanczos.hpp"
#include "traceinv/matrix_io.hpp"
#include "traceinv/ortho.hpp"
#include "traceinv/parallel.hpp"
#include "traceinv/random.hpp"
#include "traceinv/spd_matrix.hpp"
#include "traceinv/tau.hpp"
#include "traceinv/trace_estimate.hpp"
#include "traceinv/tridiagonal.hpp"
