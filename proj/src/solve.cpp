#include "mpgame/solve.hpp"

namespace mpgame {

HPReal solve_increasing(const RealFn& g, const HPReal& lo, const HPReal& hi,
                        const HPReal& target, mpfr_prec_t prec,
                        const RealFn* deriv, const HPReal* hint) {
    // Work with guard bits so the returned prec-bit value is clean.
    const mpfr_prec_t wprec = prec + 32;
    HPReal a = lo.with_prec(wprec);
    HPReal b = hi.with_prec(wprec);
    HPReal t = target.with_prec(wprec);

    HPReal ga = g(a);
    HPReal gb = g(b);
    if (ga > t || gb < t) throw BracketError("solve_increasing: target outside bracket");
    if (ga == t) return a.with_prec(prec);
    if (gb == t) return b.with_prec(prec);

    // Converge well past the contract's 2^(-prec+8) so cached roots stay
    // reusable at their stored precision.
    const HPReal tol = HPReal::pow2(-(static_cast<long>(prec) + 8), wprec);
    const HPReal floor_width = HPReal::pow2(-(static_cast<long>(wprec) - 2), wprec);

    HPReal x = (hint && *hint > a && *hint < b) ? hint->with_prec(wprec) : (a + b) / 2L;
    std::optional<HPReal> x_prev, g_prev;

    const int max_iter = 64 + static_cast<int>(prec);
    for (int i = 0; i < max_iter; ++i) {
        HPReal gx = g(x);
        HPReal resid = gx - t;
        if (resid.abs() <= tol || b - a <= floor_width) return x.with_prec(prec);

        if (resid.sign() < 0)
            a = x;
        else
            b = x;

        // Newton or secant step, bisection whenever it exits the bracket.
        std::optional<HPReal> next;
        if (deriv) {
            HPReal d = (*deriv)(x);
            if (d.sign() > 0) next = x - resid / d;
        } else if (x_prev && gx != *g_prev) {
            next = x - resid * (x - *x_prev) / (gx - *g_prev);
        }
        x_prev = x;
        g_prev = gx;
        if (next && *next > a && *next < b)
            x = *next;
        else
            x = (a + b) / 2L;
    }
    throw PrecisionError("solve_increasing: no convergence within iteration cap");
}

}  // namespace mpgame
