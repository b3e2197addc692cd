#pragma once

#include <mutex>
#include <vector>

#include "mpgame/interval.hpp"
#include "mpgame/solve.hpp"

namespace mpgame {

// Map parameters: the nonuniformity exponent gamma > 0 and the branch cut
// r1, the unique root of x + x^(1+gamma) = 1 in (0,1).
struct MPParams {
    HPReal gamma;
    HPReal r1;
    mpfr_prec_t prec;
};

// Image and return time of the first-return map.
struct ReturnValue {
    HPReal image;
    long return_time;
};

// One empirical distortion sample: the chain-rule left-hand side
// |log((f^m)'x / (f^m)'y)| and the geometric factor
// |f^m x - f^m y| / (r_{n-m} - r_{n-m+1}). lhs/factor estimates the
// distortion constant.
struct DistortionSample {
    HPReal lhs;
    HPReal factor;
};

// Which kind of cell the two sample points live in: a rung [r_{n+1}, r_n)
// of the ladder below the branch cut, or a return-branch cell [p_n, p_{n-1}).
enum class DistortionCell { ladder, return_branch };

// The interval map
//
//     f(x) = x + x^(1+gamma)        for 0 <= x < r1,
//     f(x) = x + x^(1+gamma) - 1    for r1 <= x <= 1,
//
// together with the two descending boundary sequences
//
//     r_0 = 1,  f(r_{n+1}) = r_n with r_{n+1} in (0, r_n)       (ladder rungs)
//     p_0 = 1,  f(p_n) = r_n with p_n in (r1, 1)                (branch cuts of F)
//
// and the first-return map F to [r1, 1]: F(x) = f^m(x) on the cell
// [p_m, p_{m-1}), where the return time m counts f-steps (one drop through
// the right branch, then m-1 climbs up the ladder).
//
// Sequence values are memoized and transparently re-solved at higher
// precision on demand; previously returned values only ever gain bits.
// All methods are safe to call from multiple threads.
class MPMap {
  public:
    explicit MPMap(const HPReal& gamma, mpfr_prec_t prec = HPReal::kDefaultPrec);

    const MPParams& params() const { return params_; }
    const HPReal& gamma() const { return params_.gamma; }
    const HPReal& r1() const { return params_.r1; }
    mpfr_prec_t base_prec() const { return params_.prec; }
    // The domain of the first-return map.
    ClosedInterval field() const { return ClosedInterval(params_.r1, HPReal(1L, params_.prec)); }

    // f(x); domain [0,1].
    HPReal eval(const HPReal& x) const;
    // f'(x) = 1 + (1+gamma) x^gamma.
    HPReal deriv(const HPReal& x) const;
    // m-fold application of f, computed with guard bits sized to m.
    HPReal eval_n(const HPReal& x, long m) const;

    // r_n and p_n at (at least) the requested precision.
    HPReal r(long n, mpfr_prec_t prec = 0) const;
    HPReal p(long n, mpfr_prec_t prec = 0) const;

    // Branch index m with x in [p_m, p_{m-1}), left-closed; x = 1 belongs to
    // branch 1. Throws BranchBoundaryError when x is within resolution of an
    // interior cell boundary p_n (n >= 1), DomainError when x <= r1.
    long branch_of(const HPReal& x, mpfr_prec_t prec = 0) const;

    // First-return map: locates the branch and applies f that many times.
    ReturnValue induced(const HPReal& x, mpfr_prec_t prec = 0) const;

    // Inverse of the m-th branch of F: the unique x in [p_m, p_{m-1}] with
    // f^m(x) = y. Pulls y back down the ladder m-1 times, then through the
    // right branch; each pullback contracts, so the chain is stable.
    HPReal inverse_branch(long m, const HPReal& y, mpfr_prec_t prec = 0) const;

    // Inverse of the left branch x + x^(1+gamma) on [0, r1], target w in [0,1].
    HPReal left_inverse(const HPReal& w, mpfr_prec_t prec = 0) const;
    // Inverse of the right branch x + x^(1+gamma) - 1 on [r1, 1], target w in [0,1].
    HPReal right_inverse(const HPReal& w, mpfr_prec_t prec = 0) const;

    // Distortion sample for x, y in a common cell of depth n, iterated m <= n
    // times. Throws DomainError when the points sit in different cells.
    DistortionSample distortion_sample(long m, long n, const HPReal& x, const HPReal& y,
                                       DistortionCell cell = DistortionCell::ladder) const;

  private:
    HPReal solve_rung(const HPReal& target, mpfr_prec_t prec, const HPReal* hint) const;
    HPReal solve_branch(const HPReal& target, mpfr_prec_t prec, const HPReal* hint) const;
    HPReal r_unlocked(long n, mpfr_prec_t prec) const;
    HPReal p_unlocked(long n, mpfr_prec_t prec) const;

    MPParams params_;
    mutable std::mutex mu_;
    mutable std::vector<HPReal> r_;
    mutable std::vector<HPReal> p_;
};

}  // namespace mpgame
