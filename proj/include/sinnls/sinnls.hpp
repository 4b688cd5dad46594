#pragma once

#include "baselines.hpp"
#include "error.hpp"
#include "io.hpp"
#include "lazy_solver.hpp"
#include "model.hpp"
#include "naive_solver.hpp"
#include "residual.hpp"
#include "restart.hpp"
#include "schedule.hpp"
#include "solve.hpp"
#include "sparse_matrix.hpp"
#include "spectral.hpp"
#include "synth.hpp"
