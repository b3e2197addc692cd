#pragma once

#include <functional>
#include <optional>

#include "mpgame/hpreal.hpp"

namespace mpgame {

using RealFn = std::function<HPReal(const HPReal&)>;

// Inverts a strictly increasing function on a bracket: returns x in [lo, hi]
// with |g(x) - target| <= 2^(-prec+8). Bisection narrows the bracket until
// Newton (analytic derivative if supplied, secant otherwise) takes over;
// every Newton step is bracket-guarded, falling back to a bisection step
// when it would leave the current enclosure.
//
// `hint`, when given, seeds Newton directly and skips most of the bisection
// phase; wrong hints cost nothing but the wasted steps.
//
// Throws BracketError when target is outside [g(lo), g(hi)].
HPReal solve_increasing(const RealFn& g, const HPReal& lo, const HPReal& hi,
                        const HPReal& target, mpfr_prec_t prec,
                        const RealFn* deriv = nullptr,
                        const HPReal* hint = nullptr);

}  // namespace mpgame
