#include "mpgame/map.hpp"

#include <algorithm>
#include <cmath>

#include "mpgame/errors.hpp"

namespace mpgame {

namespace {

// Guard bits for an m-step orbit inside one return branch. The derivative of
// the return map on branch m grows like m^(1+1/gamma), so the amplification
// of roundoff is polynomial in m.
mpfr_prec_t orbit_guard(long m, double gamma) {
    double amp = (1.0 + 1.0 / gamma) * std::log2(static_cast<double>(m) + 2.0);
    return 64 + static_cast<mpfr_prec_t>(amp) + 8;
}

}  // namespace

MPMap::MPMap(const HPReal& gamma, mpfr_prec_t prec) {
    if (!(gamma > 0L)) throw DomainError("map exponent must be positive");
    if (prec < HPReal::kMinPrec) throw DomainError("precision below minimum");
    params_.gamma = gamma;
    params_.prec = prec;

    const mpfr_prec_t wp = prec + 32;
    HPReal g = gamma.with_prec(wp);
    HPReal e = HPReal(1L, wp) + g;
    RealFn f0 = [&e](const HPReal& x) { return x + x.pow(e); };
    RealFn d0 = [&e, &g](const HPReal& x) { return HPReal(1L, e.prec()) + e * x.pow(g); };
    params_.r1 = solve_increasing(f0, HPReal(0L, wp), HPReal(1L, wp), HPReal(1L, wp), wp, &d0);

    r_.push_back(HPReal(1L, HPReal::kMinPrec));
    r_.push_back(params_.r1);
    p_.push_back(HPReal(1L, HPReal::kMinPrec));
}

HPReal MPMap::eval(const HPReal& x) const {
    const mpfr_prec_t wp = std::max(x.prec(), params_.prec);
    if (x.sign() < 0 || x > 1L) {
        HPReal slack = HPReal::pow2(-(static_cast<long>(wp) - 8), wp);
        if (x < -slack || x > HPReal(1L, wp) + slack)
            throw DomainError("map argument outside [0,1]");
        return eval(x.sign() < 0 ? HPReal(0L, wp) : HPReal(1L, wp));
    }
    HPReal g = params_.gamma.with_prec(wp);
    HPReal e = HPReal(1L, wp) + g;
    HPReal y = x.with_prec(wp) + x.with_prec(wp).pow(e);
    if (x >= r(1, wp)) y = y - 1L;
    return y;
}

HPReal MPMap::deriv(const HPReal& x) const {
    const mpfr_prec_t wp = std::max(x.prec(), params_.prec);
    if (x.sign() < 0 || x > 1L) throw DomainError("map argument outside [0,1]");
    HPReal g = params_.gamma.with_prec(wp);
    HPReal e = HPReal(1L, wp) + g;
    return HPReal(1L, wp) + e * x.with_prec(wp).pow(g);
}

HPReal MPMap::eval_n(const HPReal& x, long m) const {
    if (m < 0) throw DomainError("negative iteration count");
    const mpfr_prec_t wp = std::max(x.prec(), params_.prec) + orbit_guard(m, params_.gamma.to_double());
    HPReal y = x.with_prec(wp);
    for (long k = 0; k < m; ++k) y = eval(y);
    return y;
}

HPReal MPMap::solve_rung(const HPReal& target, mpfr_prec_t prec, const HPReal* hint) const {
    const mpfr_prec_t wp = prec;
    HPReal g = params_.gamma.with_prec(wp);
    HPReal e = HPReal(1L, wp) + g;
    RealFn f0 = [&e](const HPReal& x) { return x + x.pow(e); };
    RealFn d0 = [&e, &g](const HPReal& x) { return HPReal(1L, e.prec()) + e * x.pow(g); };
    return solve_increasing(f0, HPReal(0L, wp), target.with_prec(wp), target.with_prec(wp), wp,
                            &d0, hint);
}

HPReal MPMap::solve_branch(const HPReal& target, mpfr_prec_t prec, const HPReal* hint) const {
    const mpfr_prec_t wp = prec;
    HPReal g = params_.gamma.with_prec(wp);
    HPReal e = HPReal(1L, wp) + g;
    RealFn f0 = [&e](const HPReal& x) { return x + x.pow(e); };
    RealFn d0 = [&e, &g](const HPReal& x) { return HPReal(1L, e.prec()) + e * x.pow(g); };
    // Widen the lower end a hair so a target of exactly 1 (the fixed corner
    // g(r1) = 1) cannot fall out of the bracket through rounding.
    HPReal lo = r_unlocked(1, wp) - HPReal::pow2(-(static_cast<long>(wp) - 8), wp);
    return solve_increasing(f0, lo, HPReal(1L, wp), target.with_prec(wp), wp, &d0, hint);
}

HPReal MPMap::r_unlocked(long n, mpfr_prec_t prec) const {
    if (n < 0) throw DomainError("negative ladder index");
    if (n == 0) return HPReal(1L, HPReal::kMinPrec);
    if (static_cast<size_t>(n) >= r_.size()) r_.resize(static_cast<size_t>(n) + 1, HPReal(0L));
    for (long k = 1; k <= n; ++k) {
        HPReal& slot = r_[static_cast<size_t>(k)];
        if (!slot.is_zero() && slot.prec() >= prec) continue;
        HPReal target = (k == 1) ? HPReal(1L, prec) : r_[static_cast<size_t>(k - 1)];
        HPReal hint(0L);
        if (!slot.is_zero()) {
            hint = slot.with_prec(prec);
        } else if (k > 1) {
            // First-order inverse seed: the preimage of w under x + x^(1+g)
            // sits near w - w^(1+g).
            HPReal g = params_.gamma.with_prec(prec);
            HPReal e = HPReal(1L, prec) + g;
            HPReal w = target.with_prec(prec);
            hint = w - w.pow(e);
        }
        slot = solve_rung(target, prec, hint.is_zero() ? nullptr : &hint);
    }
    return r_[static_cast<size_t>(n)];
}

HPReal MPMap::p_unlocked(long n, mpfr_prec_t prec) const {
    if (n < 0) throw DomainError("negative branch index");
    if (n == 0) return HPReal(1L, HPReal::kMinPrec);
    if (static_cast<size_t>(n) >= p_.size()) p_.resize(static_cast<size_t>(n) + 1, HPReal(0L));
    for (long k = 1; k <= n; ++k) {
        HPReal& slot = p_[static_cast<size_t>(k)];
        if (!slot.is_zero() && slot.prec() >= prec) continue;
        HPReal rk = r_unlocked(k, prec);
        HPReal target = HPReal(1L, prec) + rk;
        HPReal hint(0L);
        if (!slot.is_zero()) {
            hint = slot.with_prec(prec);
        } else if (k > 1 && !p_[static_cast<size_t>(k - 1)].is_zero()) {
            // Newton predictor off the previous branch cut.
            HPReal prev = p_[static_cast<size_t>(k - 1)];
            HPReal step = (r_unlocked(k - 1, prec) - rk) / deriv(prev);
            hint = prev.with_prec(prec) - step;
        }
        slot = solve_branch(target, prec, hint.is_zero() ? nullptr : &hint);
    }
    return p_[static_cast<size_t>(n)];
}

HPReal MPMap::r(long n, mpfr_prec_t prec) const {
    std::lock_guard<std::mutex> lock(mu_);
    return r_unlocked(n, prec ? prec : params_.prec);
}

HPReal MPMap::p(long n, mpfr_prec_t prec) const {
    std::lock_guard<std::mutex> lock(mu_);
    return p_unlocked(n, prec ? prec : params_.prec);
}

long MPMap::branch_of(const HPReal& x, mpfr_prec_t prec) const {
    const mpfr_prec_t res = prec ? prec : std::max(x.prec(), params_.prec);
    const mpfr_prec_t wp = res + 32;
    const long kMaxBranch = 1L << 22;
    std::lock_guard<std::mutex> lock(mu_);
    HPReal one(1L, wp);
    if (x > one) throw DomainError("argument above 1");
    if (x == one) return 1;
    HPReal r1v = r_unlocked(1, wp);
    if (x <= r1v) throw DomainError("argument at or below the branch cut");
    HPReal tol = HPReal::pow2(-(static_cast<long>(res) - 8), wp);
    if (x - r1v < tol) throw BranchBoundaryError("argument within resolution of the branch cut");

    // Smallest m with p_m <= x, by doubling then bisecting on the index.
    long hi = 1;
    while (p_unlocked(hi, wp) > x) {
        if (hi >= kMaxBranch) throw ResourceError("branch index search exceeded cap");
        hi *= 2;
    }
    long lo = hi / 2;  // p_lo > x (or lo == 0)
    while (hi - lo > 1) {
        long mid = lo + (hi - lo) / 2;
        if (p_unlocked(mid, wp) <= x)
            hi = mid;
        else
            lo = mid;
    }
    const long m = hi;
    if ((x - p_unlocked(m, wp)).abs() < tol)
        throw BranchBoundaryError("argument within resolution of a branch cut");
    if (m >= 2 && (p_unlocked(m - 1, wp) - x).abs() < tol)
        throw BranchBoundaryError("argument within resolution of a branch cut");
    return m;
}

ReturnValue MPMap::induced(const HPReal& x, mpfr_prec_t prec) const {
    const mpfr_prec_t res = prec ? prec : std::max(x.prec(), params_.prec);
    const long m = branch_of(x, res);
    HPReal y1 = eval_n(x.with_prec(res), m);
    HPReal y2 = eval_n(x.with_prec(2 * res), m);
    if ((y1 - y2).abs() > HPReal::pow2(-(static_cast<long>(res) - 8), res))
        throw PrecisionError("return-map image failed the doubled-precision echo");
    return ReturnValue{y2.with_prec(res + 32), m};
}

HPReal MPMap::left_inverse(const HPReal& w, mpfr_prec_t prec) const {
    const mpfr_prec_t wp = (prec ? prec : std::max(w.prec(), params_.prec)) + 32;
    if (w.sign() < 0 || w > 1L) throw DomainError("left-branch target outside [0,1]");
    if (w.is_zero()) return HPReal(0L, wp);
    HPReal g = params_.gamma.with_prec(wp);
    HPReal e = HPReal(1L, wp) + g;
    RealFn f0 = [&e](const HPReal& x) { return x + x.pow(e); };
    RealFn d0 = [&e, &g](const HPReal& x) { return HPReal(1L, e.prec()) + e * x.pow(g); };
    HPReal wv = w.with_prec(wp);
    HPReal hi = min(wv, r(1, wp)) + HPReal::pow2(-(static_cast<long>(wp) - 16), wp);
    HPReal hint = wv - wv.pow(e);
    return solve_increasing(f0, HPReal(0L, wp), hi, wv, wp, &d0, &hint);
}

HPReal MPMap::right_inverse(const HPReal& w, mpfr_prec_t prec) const {
    const mpfr_prec_t wp = (prec ? prec : std::max(w.prec(), params_.prec)) + 32;
    if (w.sign() < 0 || w > 1L) throw DomainError("right-branch target outside [0,1]");
    std::lock_guard<std::mutex> lock(mu_);
    return solve_branch(HPReal(1L, wp) + w.with_prec(wp), wp, nullptr);
}

HPReal MPMap::inverse_branch(long m, const HPReal& y, mpfr_prec_t prec) const {
    if (m < 1) throw DomainError("branch index must be positive");
    const mpfr_prec_t res = prec ? prec : std::max(y.prec(), params_.prec);
    const mpfr_prec_t wp = res + orbit_guard(m, params_.gamma.to_double());
    HPReal r1v = r(1, wp);
    HPReal slack = HPReal::pow2(-(static_cast<long>(res) - 8), wp);
    if (y < r1v - slack || y > HPReal(1L, wp) + slack)
        throw DomainError("return-branch target outside the field");
    HPReal w = min(y.with_prec(wp), HPReal(1L, wp));
    for (long k = 0; k < m - 1; ++k) w = left_inverse(w, wp);
    return right_inverse(w, wp).with_prec(res + 32);
}

DistortionSample MPMap::distortion_sample(long m, long n, const HPReal& x, const HPReal& y,
                                          DistortionCell cell) const {
    if (m < 1 || n < m) throw DomainError("need 1 <= m <= n");
    const mpfr_prec_t wp = std::max({x.prec(), y.prec(), params_.prec}) + 64;

    HPReal lo(0L), hi(0L);
    if (cell == DistortionCell::ladder) {
        lo = r(n + 1, wp);
        hi = r(n, wp);
    } else {
        lo = p(n, wp);
        hi = p(n - 1, wp);
    }
    HPReal slack = HPReal::pow2(-(static_cast<long>(wp) - 16), wp);
    for (const HPReal* pt : {&x, &y}) {
        if (*pt < lo - slack || *pt > hi + slack)
            throw DomainError("sample point outside the requested cell");
    }

    HPReal u = x.with_prec(wp), v = y.with_prec(wp);
    HPReal su(0L, wp), sv(0L, wp);
    for (long k = 0; k < m; ++k) {
        su = su + deriv(u).log();
        sv = sv + deriv(v).log();
        u = eval(u);
        v = eval(v);
    }
    HPReal denom = r(n - m, wp) - r(n - m + 1, wp);
    return DistortionSample{(su - sv).abs(), (u - v).abs() / denom};
}

}  // namespace mpgame
