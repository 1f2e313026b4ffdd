#pragma once

#include "cemkit/lp.h"
#include "cemkit/solver.h"

namespace cemkit {

Solution solve_simplex(const Problem& problem, const SolveSettings& settings);
Solution solve_interior_point(const Problem& problem, const SolveSettings& settings);

}  // namespace cemkit
