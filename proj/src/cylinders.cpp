#include "mpgame/cylinders.hpp"

#include <algorithm>
#include <random>

#include "mpgame/errors.hpp"

namespace mpgame {

namespace {

constexpr mpfr_prec_t kResCap = 16384;      // comparison escalation ceiling
constexpr long kIndexCap = 1L << 20;        // child index search ceiling
constexpr long kWindowCap = 8192;           // children enumerated per parent
constexpr size_t kNodeCap = 65536;          // live nodes per descent
constexpr long kDepthCap = 4096;            // descent depth ceiling
constexpr long kChainBudget = 1L << 20;     // total pullback rungs per chain

HPReal err_radius(mpfr_prec_t res) { return HPReal::pow2(-(static_cast<long>(res) + 32), 64); }

Itinerary extend(const Itinerary& sigma, long k) {
    Itinerary out(sigma);
    out.push_back(k);
    return out;
}

}  // namespace

std::string itinerary_to_string(const Itinerary& sigma) {
    if (sigma.empty()) return "()";
    std::string out;
    for (size_t i = 0; i < sigma.size(); ++i) {
        if (i) out += '.';
        out += std::to_string(sigma[i]);
    }
    return out;
}

CylinderTree::CylinderTree(std::shared_ptr<const MPMap> map, mpfr_prec_t prec)
    : map_(std::move(map)), prec_(prec ? prec : 0) {
    if (!map_) throw DomainError("cylinder tree needs a map");
    if (!prec_) prec_ = map_->base_prec();
}

CylinderTree::Endpoints CylinderTree::endpoints(const Itinerary& sigma, mpfr_prec_t res) const {
    return endpoints_impl(sigma, res ? res : prec_);
}

HPReal CylinderTree::pull_chain(const Itinerary& prefix, const HPReal& x, mpfr_prec_t wp) const {
    long rungs = 0;
    for (long m : prefix) {
        if (m < 1) throw DomainError("itinerary symbol below 1");
        rungs += m;
    }
    if (rungs > kChainBudget) throw ResourceError("itinerary pullback budget exceeded");
    HPReal y = x.with_prec(wp);
    for (size_t j = prefix.size(); j-- > 0;) y = map_->inverse_branch(prefix[j], y, wp);
    return y;
}

CylinderTree::Endpoints CylinderTree::endpoints_impl(const Itinerary& sigma,
                                                     mpfr_prec_t res) const {
    res = std::max(res, prec_);
    HPReal want = err_radius(res);
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = memo_.find(sigma);
        if (it != memo_.end() && it->second.err <= want) return it->second;
    }

    const mpfr_prec_t wp = res + 64;
    Endpoints out{HPReal(0L), HPReal(0L), want};
    if (sigma.empty()) {
        out.left = map_->r(1, wp);
        out.right = HPReal(1L, HPReal::kMinPrec);
    } else {
        const long k = sigma.back();
        if (k < 1) throw DomainError("itinerary symbol below 1");
        Itinerary prefix(sigma.begin(), sigma.end() - 1);
        out.left = pull_chain(prefix, map_->p(k, wp), wp);
        // Branch 1 hugs the right edge, so J_{sigma 1} inherits the parent's
        // right endpoint verbatim.
        out.right = (k == 1) ? endpoints_impl(prefix, res).right
                             : pull_chain(prefix, map_->p(k - 1, wp), wp);
    }

    std::lock_guard<std::mutex> lock(mu_);
    auto [it, inserted] = memo_.try_emplace(sigma, out);
    if (!inserted && it->second.err > want) it->second = out;
    return it->second;
}

ClosedInterval CylinderTree::span(const Itinerary& sigma, mpfr_prec_t res) const {
    mpfr_prec_t r = res ? res : prec_;
    while (true) {
        Endpoints e = endpoints_impl(sigma, r);
        if (e.left < e.right) return ClosedInterval(e.left, e.right);
        if (r >= kResCap)
            throw PrecisionError("basic interval too narrow for the resolution cap: " +
                                 itinerary_to_string(sigma));
        r *= 2;
    }
}

HPReal CylinderTree::width(const Itinerary& sigma, mpfr_prec_t res) const {
    ClosedInterval s = span(sigma, res);
    return s.width();
}

std::vector<Cylinder> CylinderTree::children(const Itinerary& sigma, long k_max,
                                             mpfr_prec_t res) const {
    if (k_max < 1) throw DomainError("need k_max >= 1");
    std::vector<Cylinder> out;
    out.reserve(static_cast<size_t>(k_max));
    for (long k = 1; k <= k_max; ++k) {
        Itinerary child = extend(sigma, k);
        out.push_back(Cylinder{child, span(child, res)});
    }
    return out;
}

HPReal CylinderTree::child_left(const Itinerary& parent, long k, mpfr_prec_t res) const {
    return endpoints_impl(extend(parent, k), res).left;
}

int CylinderTree::cmp_child_left(const HPReal& x, const Itinerary& parent, long k,
                                 mpfr_prec_t res) const {
    return cmp_endpoint(x, extend(parent, k), true, res);
}

int CylinderTree::cmp_endpoint(const HPReal& x, const Itinerary& sigma, bool left_side,
                               mpfr_prec_t res) const {
    // Certified at the query resolution: x within T of the true endpoint
    // counts as the endpoint itself. That keeps classification stable when x
    // was taken from a span the memo has since refined past.
    res = std::max(res, prec_);
    const HPReal T = err_radius(res);
    for (mpfr_prec_t r = res; r <= kResCap; r *= 2) {
        Endpoints e = endpoints_impl(sigma, r);
        const HPReal& v = left_side ? e.left : e.right;
        if (x == v) return 0;
        HPReal d = (x - v).abs();
        if (HPReal::add_up(d, e.err) <= T) return 0;
        if (HPReal::sub_down(d, e.err) > T) return x < v ? -1 : +1;
    }
    throw PrecisionError("point indistinguishable from a basic-interval endpoint: " +
                         itinerary_to_string(sigma));
}

long CylinderTree::min_k_left_below(const Itinerary& parent, const HPReal& x, mpfr_prec_t res,
                                    bool strict, long k_cap) const {
    auto found = [&](long k) {
        int c = cmp_child_left(x, parent, k, res);
        return strict ? c > 0 : c >= 0;
    };
    long hi = 1;
    while (!found(hi)) {
        if (hi >= k_cap) throw ResourceError("child index search exceeded cap");
        hi = std::min(hi * 2, k_cap);
    }
    long lo = hi / 2;  // not found at lo (or lo == 0)
    while (hi - lo > 1) {
        long mid = lo + (hi - lo) / 2;
        if (found(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

CylinderTree::Window CylinderTree::child_window(const Itinerary& parent, const ClosedInterval& B,
                                                mpfr_prec_t res, long k_cap) const {
    Window w{};
    w.k_min = min_k_left_below(parent, B.right, res, false, k_cap);
    // e_{k_min} == B.right means B only reaches the left edge of child k_min.
    w.right_tie = cmp_child_left(B.right, parent, w.k_min, res) == 0;
    if (cmp_endpoint(B.left, parent, true, res) <= 0) {
        w.left_infinite = true;
        w.k_left = -1;
    } else {
        w.left_infinite = false;
        w.k_left = min_k_left_below(parent, B.left, res, true, k_cap) - 1;
    }
    return w;
}

void CylinderTree::check_in_field(const ClosedInterval& B, mpfr_prec_t res) const {
    if (cmp_endpoint(B.left, Itinerary{}, true, res) < 0)
        throw DomainError("interval extends left of the field");
}

CommensurabilityResult CylinderTree::commensurate_generation(const ClosedInterval& B,
                                                             mpfr_prec_t res) const {
    res = res ? res : prec_;
    if (cmp_endpoint(B.left, Itinerary{}, true, res) < 0) {
        // Left of the branch cut: only legal when B swallows the whole field.
        if (B.right == 1L)
            return CommensurabilityResult{0, Cylinder{Itinerary{}, span(Itinerary{}, res)}};
        throw DomainError("interval extends left of the field");
    }

    Itinerary tau;
    for (long level = 0; level <= kDepthCap; ++level) {
        Endpoints e = endpoints_impl(tau, res);
        if (B.left == e.left && B.right == e.right)
            return CommensurabilityResult{level, Cylinder{tau, ClosedInterval(e.left, e.right)}};

        Window w = child_window(tau, B, res, kIndexCap);
        // Child 1 shares the parent's right endpoint, so it is contained as
        // soon as its left endpoint clears B.left; otherwise containment
        // starts one past k_min, whose own right endpoint pokes out of B.
        const bool right_edge = cmp_endpoint(B.right, tau, false, res) >= 0;
        const long c_start = right_edge ? 1 : w.k_min + 1;
        if (w.left_infinite || w.k_left >= c_start) {
            Itinerary wit = extend(tau, c_start);
            return CommensurabilityResult{level + 1, Cylinder{wit, span(wit, res)}};
        }
        if (w.k_left == w.k_min - 1) {
            tau.push_back(w.k_min);  // B strictly inside child k_min
            continue;
        }
        // Now k_left == k_min: child k_min is the only child whose left
        // endpoint lands in B.
        if (w.right_tie) {
            // B.right sits exactly on that endpoint, so B lies in child
            // k_min+1 with a shared right edge.
            tau.push_back(w.k_min + 1);
            continue;
        }
        // B straddles the left boundary of child k_min with room on both
        // sides but contains no whole child: the witness sits in the tiling
        // of child k_min, which accumulates at that boundary from the right.
        Itinerary straddled = extend(tau, w.k_min);
        long j = min_k_left_below(straddled, B.right, res, false, kIndexCap);
        Itinerary wit = extend(straddled, j + 1);
        return CommensurabilityResult{level + 2, Cylinder{wit, span(wit, res)}};
    }
    throw ResourceError("commensurability descent exceeded depth cap; raise the resolution");
}

std::vector<Cylinder> CylinderTree::elements_meeting(const ClosedInterval& B, long g,
                                                     mpfr_prec_t res) const {
    res = res ? res : prec_;
    if (g < 0) throw DomainError("generation must be nonnegative");
    check_in_field(B, res);

    std::vector<Itinerary> level{{}};
    for (long l = 0; l < g; ++l) {
        std::vector<Itinerary> next;
        for (const Itinerary& tau : level) {
            // A parent meeting B only at its left endpoint has no child that
            // meets B at all: the children accumulate at that point without
            // reaching it.
            if (cmp_endpoint(B.right, tau, true, res) <= 0) continue;
            Window w = child_window(tau, B, res, kIndexCap);
            if (w.left_infinite)
                throw ResourceError(
                    "meeting family at generation " + std::to_string(g) +
                    " is infinite: the interval contains a shallower basic interval");
            if (w.k_left + 1 - w.k_min + 1 > kWindowCap)
                throw ResourceError("meeting family too wide to enumerate");
            for (long k = w.k_min; k <= w.k_left + 1; ++k) next.push_back(extend(tau, k));
            if (next.size() > kNodeCap) throw ResourceError("meeting descent exceeded node cap");
        }
        level = std::move(next);
    }

    std::vector<Cylinder> out;
    out.reserve(level.size());
    for (const Itinerary& tau : level) out.push_back(Cylinder{tau, span(tau, res)});
    return out;
}

std::vector<LeftEndpointHit> CylinderTree::left_endpoint_scan(const ClosedInterval& B, long g_max,
                                                              mpfr_prec_t res, long k_cap) const {
    res = res ? res : prec_;
    if (g_max < 0) throw DomainError("generation bound must be nonnegative");
    if (k_cap <= 0 || k_cap > kIndexCap) k_cap = kIndexCap;
    check_in_field(B, res);

    std::vector<LeftEndpointHit> hits;
    std::vector<Itinerary> level{{}};
    for (long l = 0; l < g_max; ++l) {
        std::vector<Itinerary> next;
        for (const Itinerary& tau : level) {
            if (cmp_endpoint(B.right, tau, true, res) <= 0) continue;
            Window w = child_window(tau, B, res, k_cap);
            if (w.left_infinite)
                throw ResourceError(
                    "left-endpoint family is infinite: the interval covers an accumulation "
                    "point");
            if (w.k_left + 1 - w.k_min + 1 > kWindowCap)
                throw ResourceError("left-endpoint scan window too wide");
            for (long k = w.k_min; k <= w.k_left + 1; ++k) {
                Itinerary child = extend(tau, k);
                // Children k_min..k_left have their left endpoint inside B by
                // construction of the window.
                if (k <= w.k_left)
                    hits.push_back(LeftEndpointHit{child_left(tau, k, res), l + 1, child});
                next.push_back(std::move(child));
            }
            if (next.size() > kNodeCap)
                throw ResourceError("left-endpoint descent exceeded node cap");
        }
        level = std::move(next);
    }

    std::sort(hits.begin(), hits.end(),
              [](const LeftEndpointHit& a, const LeftEndpointHit& b) {
                  if (a.point != b.point) return a.point < b.point;
                  return a.generation < b.generation;
              });
    return hits;
}

HPReal CylinderTree::tail_length(const Itinerary& sigma, long k, mpfr_prec_t res) const {
    res = res ? res : prec_;
    if (k < 1) throw DomainError("tail index must be >= 1");
    if (k == 1) return width(sigma, res);
    return endpoints_impl(extend(sigma, k - 1), res).left - endpoints_impl(sigma, res).left;
}

HPReal CylinderTree::estimate_C5(long depth, long k_max) const {
    if (depth < 0 || k_max < 1) throw DomainError("need depth >= 0 and k_max >= 1");
    const mpfr_prec_t res = prec_;

    std::vector<long> ks;
    for (long k = 1; k <= std::min<long>(20, k_max); ++k) ks.push_back(k);
    for (long k = 40; k <= std::min<long>(200, k_max); k += 40) ks.push_back(k);

    std::vector<Itinerary> sigmas{{}};
    std::mt19937_64 rng(0xC5C5C5C5ull);
    std::uniform_int_distribution<long> sym(1, 10);
    for (long g = 1; g <= depth; ++g) {
        sigmas.push_back(Itinerary(static_cast<size_t>(g), 1L));
        sigmas.push_back(Itinerary(static_cast<size_t>(g), 8L));
        for (int t = 0; t < 20; ++t) {
            Itinerary s(static_cast<size_t>(g));
            for (auto& m : s) m = sym(rng);
            sigmas.push_back(std::move(s));
        }
    }

    HPReal inv_gamma = HPReal(1L, res) / map_->gamma();
    HPReal e_len = HPReal(1L, res) + inv_gamma;  // 1 + 1/gamma
    HPReal sup(1L, res);
    for (const Itinerary& sigma : sigmas) {
        HPReal w = width(sigma, res);
        for (long k : ks) {
            HPReal kk(k, res);
            HPReal len_defect = (width(extend(sigma, k), res) / w) * kk.pow(e_len);
            HPReal tail_defect = (tail_length(sigma, k, res) / w) * kk.pow(inv_gamma);
            for (const HPReal* t : {&len_defect, &tail_defect}) {
                sup = max(sup, *t);
                sup = max(sup, HPReal(1L, res) / *t);
            }
        }
    }
    return sup * HPReal(1.5, res);
}

long CylinderTree::locate_K(const Itinerary& sigma, const HPReal& zeta, mpfr_prec_t res) const {
    if (!(zeta > 0L) || !(zeta < 1L)) throw DomainError("fraction must lie in (0,1)");
    for (mpfr_prec_t r = res ? res : prec_; r <= kResCap; r *= 2) {
        Endpoints e = endpoints_impl(sigma, r);
        HPReal w = e.right - e.left;
        HPReal q = e.left + zeta.with_prec(r + 64) * w;
        long K = min_k_left_below(sigma, q, r, false, kIndexCap);
        // Too close to a child boundary: escalate rather than misclassify.
        HPReal margin = HPReal::pow2(-(static_cast<long>(r) / 2), r) * w + e.err * 2L;
        if ((q - child_left(sigma, K, r)).abs() < margin) continue;
        if (K >= 2 && (child_left(sigma, K - 1, r) - q).abs() < margin) continue;
        return K;
    }
    throw PrecisionError("query fraction sits on a child boundary at the resolution cap");
}

}  // namespace mpgame
