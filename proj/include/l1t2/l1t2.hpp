#pragma once

#include "l1t2/arrangement.hpp"
#include "l1t2/baselines.hpp"
#include "l1t2/errors.hpp"
#include "l1t2/harness.hpp"
#include "l1t2/io.hpp"
#include "l1t2/linalg.hpp"
#include "l1t2/parallel.hpp"
#include "l1t2/sign_vector.hpp"
#include "l1t2/solvers.hpp"
