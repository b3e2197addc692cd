#pragma once

#include "mpgame/map.hpp"

namespace mpgame {

// Birkhoff average (1/n) sum log f'(f^k x0) for k < n_iter. The orbit is
// recomputed at doubling precision until two consecutive levels agree to
// well inside 1e-6. If the orbit lands exactly on a fixed endpoint (0 or 1)
// the average is still well defined and *degenerate is set when given.
HPReal lyapunov_estimate(const MPParams& params, const HPReal& x0, long n_iter,
                         bool* degenerate = nullptr);

// Moran-equation dimension proxy for the survivor set of the return map
// restricted to branch symbols <= K: the root s of
//   sum over |sigma| = depth, symbols <= K of |J_sigma|^s = 1,
// with cell lengths computed in double precision. Throws ResourceError when
// K^depth exceeds the cell budget.
HPReal dimension_estimate(const MPParams& params, long K, long depth);

}  // namespace mpgame
