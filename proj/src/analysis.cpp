#include "mpgame/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mpgame/errors.hpp"

namespace mpgame {

namespace {

// One Birkhoff pass at working precision q. Degenerate orbits (absorbed at a
// fixed endpoint) are closed off in one step: at 0 every remaining term is
// log 1 = 0, at 1 every remaining term is log f'(1).
HPReal birkhoff_average(const MPParams& params, const HPReal& x0, long n_iter,
                        mpfr_prec_t q, bool& degenerate) {
    MPMap map(params.gamma, q);
    HPReal x = x0.with_prec(q);
    const HPReal one(1L, q);
    const HPReal zero(0L, q);
    HPReal sum(0L, q);
    for (long k = 0; k < n_iter; ++k) {
        if (x.is_zero()) {
            degenerate = true;
            break;
        }
        if (x == one) {
            degenerate = true;
            sum = sum + HPReal(n_iter - k, q) * map.deriv(one).log();
            break;
        }
        sum = sum + map.deriv(x).log();
        x = map.eval(x);
        if (x < zero) x = zero;
        if (x > one) x = one;
    }
    return sum / HPReal(n_iter, q);
}

}  // namespace

HPReal lyapunov_estimate(const MPParams& params, const HPReal& x0, long n_iter,
                         bool* degenerate) {
    if (n_iter < 1) throw DomainError("lyapunov_estimate: need n_iter >= 1");
    if (x0 < 0L || x0 > 1L)
        throw DomainError("lyapunov_estimate: x0 must lie in [0,1]");

    const HPReal echo_tol = HPReal::pow2(-30);
    mpfr_prec_t q = std::max<mpfr_prec_t>(params.prec, 256);
    HPReal prev(0L);
    bool have_prev = false;
    for (; q <= (mpfr_prec_t{1} << 22); q *= 2) {
        bool degen = false;
        HPReal avg(0L);
        try {
            avg = birkhoff_average(params, x0, n_iter, q, degen);
        } catch (const BranchBoundaryError&) {
            // orbit grazed a branch boundary at this precision; escalate
            have_prev = false;
            continue;
        }
        if (have_prev && (avg - prev).abs() <= echo_tol) {
            if (degenerate) *degenerate = degen;
            return avg;
        }
        prev = avg;
        have_prev = true;
    }
    throw PrecisionError("lyapunov_estimate: average failed to stabilize");
}

namespace {

// Double-precision branch inverses of f. gamma in {0.5, 1, 2} gets closed
// forms or cheap power kernels; anything else goes through std::pow.
struct DoubleLadder {
    double g;
    int mode;  // 1: g==1, 2: g==2, 3: g==0.5, 0: generic

    explicit DoubleLadder(double gamma) : g(gamma) {
        if (gamma == 1.0)
            mode = 1;
        else if (gamma == 2.0)
            mode = 2;
        else if (gamma == 0.5)
            mode = 3;
        else
            mode = 0;
    }

    double pow_g(double y) const {
        switch (mode) {
            case 1: return y;
            case 2: return y * y;
            case 3: return std::sqrt(y);
            default: return std::pow(y, g);
        }
    }

    // solve y + y^(1+g) = w, 0 < y <= w
    double f0inv(double w) const {
        if (mode == 1) return 0.5 * (std::sqrt(1.0 + 4.0 * w) - 1.0);
        double y = 0.9 * w;
        for (int i = 0; i < 60; ++i) {
            double t = pow_g(y);
            double step = (y + y * t - w) / (1.0 + (1.0 + g) * t);
            y -= step;
            if (y <= 0.0) y = 1e-300;
            if (std::fabs(step) <= 1e-16 * y) break;
        }
        return y;
    }

    // solve y + y^(1+g) - 1 = w, y in (0, 1]
    double f1inv(double w) const {
        if (mode == 1) return 0.5 * (std::sqrt(5.0 + 4.0 * w) - 1.0);
        double y = 0.5 * (1.0 + w);
        if (y > 1.0) y = 1.0;
        for (int i = 0; i < 60; ++i) {
            double t = pow_g(y);
            double step = (y + y * t - 1.0 - w) / (1.0 + (1.0 + g) * t);
            y -= step;
            if (y <= 0.0) y = 1e-300;
            if (std::fabs(step) <= 1e-16 * y) break;
        }
        return y;
    }

    // phi_m(y) = f1inv(f0inv^(m-1)(y)): the m-th inverse branch of the
    // return map, [r1,1] -> [p_m, p_{m-1}].
    double phi(long m, double y) const {
        for (long i = 1; i < m; ++i) y = f0inv(y);
        return f1inv(y);
    }
};

}  // namespace

HPReal dimension_estimate(const MPParams& params, long K, long depth) {
    if (K < 1) throw DomainError("dimension_estimate: need K >= 1");
    if (depth < 2) throw DomainError("dimension_estimate: need depth >= 2");
    const double budget = 2e7;
    if (std::pow(static_cast<double>(K), static_cast<double>(depth)) > budget)
        throw ResourceError("dimension_estimate: K^depth exceeds cell budget");
    if (K == 1) return HPReal(0L, params.prec);  // single full-measure branch chain

    DoubleLadder lad(params.gamma.to_double());

    // generation-1 endpoints p_0 = 1 > p_1 > ... > p_K
    std::vector<double> p(K + 1);
    p[0] = 1.0;
    double r = 1.0;
    for (long k = 1; k <= K; ++k) {
        r = lad.f0inv(r);  // r_k
        p[k] = lad.f1inv(r);
    }

    // log widths of all depth-cells, enumerated by the (depth-1)-symbol prefix
    std::vector<double> logw;
    logw.reserve(static_cast<size_t>(std::pow(static_cast<double>(K),
                                              static_cast<double>(depth))));
    std::vector<long> prefix(depth - 1, 1);
    std::vector<double> pts(K + 1);
    for (;;) {
        for (long k = 0; k <= K; ++k) {
            double y = p[k];
            for (long i = depth - 2; i >= 0; --i) y = lad.phi(prefix[i], y);
            pts[k] = y;
        }
        for (long k = 1; k <= K; ++k) {
            double w = pts[k - 1] - pts[k];
            if (w < 1e-300) w = 1e-300;
            logw.push_back(std::log(w));
        }
        long i = depth - 2;
        while (i >= 0 && prefix[i] == K) prefix[i--] = 1;
        if (i < 0) break;
        ++prefix[i];
    }

    // S(s) = sum exp(s log w) is strictly decreasing with S(0) = K^depth > 1
    // and S(1) < 1 (disjoint cells inside [r1,1]); bisect for the root
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        double s = 0.0;
        for (double lw : logw) s += std::exp(mid * lw);
        if (s > 1.0)
            lo = mid;
        else
            hi = mid;
    }
    return HPReal(0.5 * (lo + hi), params.prec);
}

}  // namespace mpgame
