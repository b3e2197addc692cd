#include "mpgame/constants.hpp"

#include <algorithm>
#include <memory>
#include <random>

#include "mpgame/cylinders.hpp"
#include "mpgame/errors.hpp"

namespace mpgame {

namespace {

constexpr unsigned long long kC2Seed = 0xD15704710Aull;
constexpr long kLambdaScan = 50;
constexpr long kC5Depth = 4;

double unit_fraction(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Sup of the distortion ratio lhs/factor over a deterministic grid of
// (m, n, x, y) with both points inside the rung [r_{n+1}, r_n). Floored at 1
// so a degenerate grid still yields a usable constant.
HPReal fit_C2(const MPMap& map, long depth, mpfr_prec_t wp) {
    std::mt19937_64 rng(kC2Seed);
    HPReal sup(1L, wp);
    for (long n = 1; n <= depth; ++n) {
        HPReal lo = map.r(n + 1, wp);
        HPReal w = map.r(n, wp) - lo;

        std::vector<long> ms{1, n};
        for (long q : {n / 4, n / 2, (3 * n) / 4})
            if (q >= 1) ms.push_back(q);
        std::sort(ms.begin(), ms.end());
        ms.erase(std::unique(ms.begin(), ms.end()), ms.end());

        std::vector<std::pair<double, double>> pairs{{0.02, 0.98}, {0.10, 0.60}, {0.35, 0.90}};
        for (int t = 0; t < 3; ++t) {
            double u = 0.01 + 0.98 * unit_fraction(rng);
            double v = 0.01 + 0.98 * unit_fraction(rng);
            if (u == v) continue;
            pairs.emplace_back(u, v);
        }

        for (long m : ms) {
            for (const auto& [u, v] : pairs) {
                HPReal x = lo + HPReal(u, wp) * w;
                HPReal y = lo + HPReal(v, wp) * w;
                DistortionSample s = map.distortion_sample(m, n, x, y);
                sup = max(sup, s.lhs / s.factor);
            }
        }
    }
    return sup;
}

// Infimum of the return-map branch derivatives. On the k-th branch the
// derivative grows left to right, so the floor sits at the left edge p_k,
// where the chain factors are f'(p_k) and f'(r_i) for i = 2..k. The extra
// ladder factors exceed 1, so the scan bottoms out at small k.
HPReal fit_lambda(const MPMap& map, mpfr_prec_t wp) {
    HPReal ladder_prod(1L, wp);
    HPReal inf = map.deriv(map.p(1, wp));
    for (long k = 2; k <= kLambdaScan; ++k) {
        ladder_prod = ladder_prod * map.deriv(map.r(k, wp));
        inf = min(inf, map.deriv(map.p(k, wp)) * ladder_prod);
    }
    return inf;
}

}  // namespace

ConstantsEstimate estimate_constants(const MPParams& params, long N, long depth, long k_max) {
    if (N < 100) throw DomainError("need N >= 100");
    if (depth < 1 || k_max < 1) throw DomainError("need depth >= 1 and k_max >= 1");

    // Private map: a cold cache makes the result independent of how far a
    // caller's map happens to have been refined.
    auto map = std::make_shared<const MPMap>(params.gamma, params.prec);

    const mpfr_prec_t wp = map->base_prec();
    const HPReal one(1L, wp);
    HPReal inv_gamma = one / map->gamma();

    HPReal sup1(1L, wp);
    HPReal r_prev(1L, wp);
    for (long n = 1; n <= N; ++n) {
        HPReal rn = map->r(n, wp);
        HPReal nj = HPReal(n, wp).pow(inv_gamma);
        HPReal rung = rn * nj;
        HPReal gap = (r_prev - rn) * nj * n;
        for (const HPReal* d : {&rung, &gap}) {
            sup1 = max(sup1, *d);
            sup1 = max(sup1, one / *d);
        }
        r_prev = rn;
    }

    ConstantsEstimate est;
    est.C1_hat = sup1 * HPReal(1.1, wp);
    est.C2_hat = fit_C2(*map, depth, wp) * HPReal(1.5, wp);
    // Widened so the sum is exact and C3_hat - C2_hat round-trips.
    est.C3_hat = est.C2_hat.with_prec(wp + 64) + map->gamma().with_prec(wp) / map->r1().with_prec(wp);
    est.lambda_hat = fit_lambda(*map, wp) * HPReal(0.99, wp);
    est.C4_hat = est.C3_hat * est.lambda_hat / (est.lambda_hat - one);
    est.C5_hat = CylinderTree(map).estimate_C5(kC5Depth, k_max);
    est.N = N;
    est.depth = depth;
    est.k_max = k_max;
    est.seed = kC2Seed;
    return est;
}

AsymptoticsReport check_asymptotics(const MPParams& params, long N) {
    if (N < 100) throw DomainError("need N >= 100");

    MPMap map(params.gamma, params.prec);
    const mpfr_prec_t wp = map.base_prec();
    HPReal inv_gamma = HPReal(1L, wp) / map.gamma();
    const HPReal pad(1.1, wp);

    AsymptoticsReport rep;
    rep.N = N;
    rep.train_n = std::max<long>(10, N / 100);

    HPReal rung_min(0L, wp), rung_max(0L, wp), gap_min(0L, wp), gap_max(0L, wp);
    rep.rung_pass = rep.gap_pass = true;

    HPReal r_prev(1L, wp);
    long next_row = 1;
    for (long n = 1; n <= N; ++n) {
        HPReal rn = map.r(n, wp);
        HPReal nj = HPReal(n, wp).pow(inv_gamma);
        HPReal rung = rn * nj;
        HPReal gap = (r_prev - rn) * nj * n;
        r_prev = rn;

        if (n == 1) {
            rung_min = rung_max = rung;
            gap_min = gap_max = gap;
        } else if (n <= rep.train_n) {
            rung_min = min(rung_min, rung);
            rung_max = max(rung_max, rung);
            gap_min = min(gap_min, gap);
            gap_max = max(gap_max, gap);
        }
        if (n == rep.train_n) {
            rep.rung_lo = rung_min / pad;
            rep.rung_hi = rung_max * pad;
            rep.gap_lo = gap_min / pad;
            rep.gap_hi = gap_max * pad;
        }
        if (n > rep.train_n) {
            if (rung < rep.rung_lo || rung > rep.rung_hi) rep.rung_pass = false;
            if (gap < rep.gap_lo || gap > rep.gap_hi) rep.gap_pass = false;
        }

        if (n == next_row || n == N) {
            rep.rows.push_back({n, rung, gap});
            if (n >= next_row) {
                if (next_row < 10)
                    ++next_row;
                else if (next_row < 100)
                    next_row += 10;
                else if (next_row < 1000)
                    next_row += 100;
                else
                    next_row += 1000;
            }
        }
        if (n == N) rep.rung_limit = rung;
    }
    return rep;
}

}  // namespace mpgame
