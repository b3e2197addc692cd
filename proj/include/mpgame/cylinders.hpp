#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "mpgame/interval.hpp"
#include "mpgame/map.hpp"

namespace mpgame {

// Symbol sequence (m_1,...,m_k) naming a basic interval of the return map;
// the empty sequence names the root [r1, 1]. Symbols are branch indices >= 1,
// outermost branch first.
using Itinerary = std::vector<long>;

std::string itinerary_to_string(const Itinerary& sigma);

struct Cylinder {
    Itinerary itinerary;
    ClosedInterval interval;
};

struct CommensurabilityResult {
    long generation;
    Cylinder witness;  // spatially rightmost generation-g member inside the query
};

struct LeftEndpointHit {
    HPReal point;        // approximate left endpoint value
    long generation;     // generation of the owning basic interval
    Itinerary owner;     // the interval whose left endpoint this is
};

// The hierarchy of basic intervals J_sigma of the first-return map: the
// generation-k interval J_{m_1...m_k} is the pullback of [p_{m_k}, p_{m_k-1}]
// through the return branches m_{k-1},...,m_1. Children of J_sigma are
// J_{sigma k}, numbered right to left, sharing endpoints in a tiling that
// accumulates at the parent's left endpoint.
//
// Endpoints are memoized per itinerary and carry a certified error radius;
// all interval queries compare through that radius and transparently
// recompute at higher resolution when a comparison is too close to call.
// Queries are safe to run from multiple threads.
class CylinderTree {
  public:
    CylinderTree(std::shared_ptr<const MPMap> map, mpfr_prec_t prec = 0);

    const MPMap& map() const { return *map_; }
    mpfr_prec_t base_prec() const { return prec_; }

    struct Endpoints {
        HPReal left;
        HPReal right;
        HPReal err;  // |stored - true| <= err for each endpoint
    };

    // Certified endpoints of J_sigma, at resolution >= res.
    Endpoints endpoints(const Itinerary& sigma, mpfr_prec_t res = 0) const;
    ClosedInterval span(const Itinerary& sigma, mpfr_prec_t res = 0) const;
    HPReal width(const Itinerary& sigma, mpfr_prec_t res = 0) const;

    // J_{sigma 1},...,J_{sigma k_max}, rightmost first spatially.
    std::vector<Cylinder> children(const Itinerary& sigma, long k_max, mpfr_prec_t res = 0) const;

    // The child index K with the interior point at fraction zeta of J_sigma
    // (measured from the left) lying in [J_{sigma K}), left-closed.
    long locate_K(const Itinerary& sigma, const HPReal& zeta, mpfr_prec_t res = 0) const;

    // The unique generation g such that B contains a generation-g basic
    // interval but no generation-(g-1) one; an interval containing the root
    // gets generation 0. The witness is the rightmost generation-g member
    // inside B.
    CommensurabilityResult commensurate_generation(const ClosedInterval& B,
                                                   mpfr_prec_t res = 0) const;

    // All generation-g basic intervals whose closed span intersects B, by
    // tree descent. Throws ResourceError when the family is infinite (B
    // fully contains a basic interval of generation < g).
    std::vector<Cylinder> elements_meeting(const ClosedInterval& B, long g,
                                           mpfr_prec_t res = 0) const;

    // All left endpoints of basic intervals of generation <= g_max lying in
    // the closed interval B, sorted by position. k_cap bounds the child
    // index the scan will resolve before giving up with ResourceError (0
    // means the tree-wide cap); a small cap makes probes near accumulation
    // points fail cheaply instead of filling the endpoint ladder first.
    std::vector<LeftEndpointHit> left_endpoint_scan(const ClosedInterval& B, long g_max,
                                                    mpfr_prec_t res = 0, long k_cap = 0) const;

    // |union of J_{sigma i} for i >= k|, the tail of the child tiling.
    HPReal tail_length(const Itinerary& sigma, long k, mpfr_prec_t res = 0) const;

    // Empirical distortion constant for the child length laws
    //   |J_{sigma k}|/|J_sigma| ~ k^-(1+1/gamma),
    //   tail(k)/|J_sigma| ~ k^-(1/gamma):
    // sup of the defect ratios over a deterministic sample, times 1.5.
    HPReal estimate_C5(long depth, long k_max) const;

  private:
    struct Window {
        long k_min;          // smallest child index with left endpoint <= B.right
        long k_left;         // largest child index with left endpoint >= B.left
        bool right_tie;      // B.right coincides with the left endpoint of child k_min
        bool left_infinite;  // B.left at or below the parent's left endpoint
    };

    Endpoints endpoints_impl(const Itinerary& sigma, mpfr_prec_t res) const;
    HPReal pull_chain(const Itinerary& prefix, const HPReal& x, mpfr_prec_t wp) const;
    HPReal child_left(const Itinerary& parent, long k, mpfr_prec_t res) const;
    // -1 / +1 when x is certainly below / above the true left endpoint of
    // J_{parent k}, 0 when x equals the stored endpoint value exactly;
    // escalates resolution until resolved.
    int cmp_child_left(const HPReal& x, const Itinerary& parent, long k, mpfr_prec_t res) const;
    int cmp_endpoint(const HPReal& x, const Itinerary& sigma, bool left_side,
                     mpfr_prec_t res) const;
    // Smallest k with left endpoint of J_{parent k} <= x (< x when strict).
    // Throws ResourceError past k_cap without resolving deeper endpoints.
    long min_k_left_below(const Itinerary& parent, const HPReal& x, mpfr_prec_t res,
                          bool strict, long k_cap) const;
    Window child_window(const Itinerary& parent, const ClosedInterval& B, mpfr_prec_t res,
                        long k_cap) const;
    void check_in_field(const ClosedInterval& B, mpfr_prec_t res) const;

    std::shared_ptr<const MPMap> map_;
    mpfr_prec_t prec_;
    mutable std::mutex mu_;
    mutable std::map<Itinerary, Endpoints> memo_;
};

}  // namespace mpgame
