#pragma once

#include <vector>

#include "mpgame/map.hpp"

namespace mpgame {

// Empirically certified constants for the quantitative structure of the map
// and its first-return tower. Each value is a sampled supremum (or infimum)
// padded by a safety factor, so downstream bounds consume them directly:
//
//   C1_hat     two-sided envelope for the ladder: r_n vs n^(-1/gamma) and
//              the rung gaps r_{n-1}-r_n vs n^(-1-1/gamma)
//   C2_hat     distortion constant for m-fold orbits launched inside a
//              single ladder rung [r_{n+1}, r_n)
//   C3_hat     = C2_hat + gamma/r1, the distortion constant for orbits
//              launched inside a return cell [p_n, p_{n-1})
//   lambda_hat expansion floor of the first-return map, from scanning the
//              branch derivatives at their left edges
//   C4_hat     = C3_hat * lambda_hat / (lambda_hat - 1), a distortion
//              envelope for iterates of the return map on basic intervals
//   C5_hat     child-length law constant delegated to the cylinder tree
//
// C3_hat is assembled with enough extra precision that C3_hat - C2_hat
// recovers gamma/r1 bit for bit.
struct ConstantsEstimate {
    HPReal C1_hat;
    HPReal C2_hat;
    HPReal C3_hat;
    HPReal C4_hat;
    HPReal C5_hat;
    HPReal lambda_hat;
    long N = 0;
    long depth = 0;
    long k_max = 0;
    unsigned long long seed = 0;
};

// Fits the constants on a deterministic sample grid: ladder defects over
// n <= N, distortion ratios over m <= n <= depth (the sup stabilizes around
// depth 120), child laws via the cylinder tree with children up to k_max.
// Safety factors: 1.1 on C1_hat, 1.5 on C2_hat and C5_hat, 0.99 toward 1 on
// lambda_hat. Requires N >= 100 and depth >= 1. Works on a private map so
// the result is bit-identical no matter what a shared cache has been
// refined to in the meantime.
ConstantsEstimate estimate_constants(const MPParams& params, long N, long depth, long k_max = 200);

struct AsymptoticsRow {
    long n;
    HPReal rung_defect;  // r_n * n^(1/gamma)
    HPReal gap_defect;   // (r_{n-1} - r_n) * n^(1+1/gamma)
};

// Tabulates the ladder defects up to N and checks that the whole range stays
// inside the band certified on the training prefix n <= max(10, N/100),
// expanded by the 1.1 safety factor on both sides.
struct AsymptoticsReport {
    long N = 0;
    long train_n = 0;
    HPReal rung_lo, rung_hi;  // certified band for rung_defect
    HPReal gap_lo, gap_hi;    // certified band for gap_defect
    bool rung_pass = false;
    bool gap_pass = false;
    HPReal rung_limit;                // rung_defect at n = N, the empirical limit
    std::vector<AsymptoticsRow> rows;  // decade-thinned sample grid, always ends at N
    bool pass() const { return rung_pass && gap_pass; }
};

AsymptoticsReport check_asymptotics(const MPParams& params, long N);

}  // namespace mpgame
