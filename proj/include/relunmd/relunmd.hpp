#pragma once

#include "relunmd/core/errors.hpp"
#include "relunmd/core/least_squares.hpp"
#include "relunmd/core/matrix.hpp"
#include "relunmd/core/rng.hpp"
#include "relunmd/core/svd.hpp"
#include "relunmd/solvers/a_nmd.hpp"
#include "relunmd/solvers/momentum.hpp"
#include "relunmd/solvers/naive.hpp"
#include "relunmd/solvers/three_block.hpp"
#include "relunmd/solvers/types.hpp"
#include "relunmd/solvers/updates.hpp"
#include "relunmd/init/init.hpp"
#include "relunmd/io/csv.hpp"
#include "relunmd/io/idx.hpp"
#include "relunmd/io/nnls.hpp"
#include "relunmd/io/synthetic.hpp"
#include "relunmd/bench/algorithms.hpp"
#include "relunmd/bench/experiment.hpp"
