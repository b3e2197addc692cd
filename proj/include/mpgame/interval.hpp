#pragma once

#include "mpgame/hpreal.hpp"

namespace mpgame {

// Closed nondegenerate subinterval of [0,1]. Game moves, cylinder intervals
// and playing fields are all of this type; all predicates use closed
// semantics (sharing one endpoint counts as intersecting).
struct ClosedInterval {
    HPReal left;
    HPReal right;

    ClosedInterval(HPReal l, HPReal r) : left(std::move(l)), right(std::move(r)) {
        if (left < 0L || right > 1L || !(left < right))
            throw DomainError("interval must satisfy 0 <= left < right <= 1");
    }

    HPReal width() const { return right - left; }
    HPReal midpoint() const { return (left + right) / 2L; }

    bool contains(const HPReal& x) const { return left <= x && x <= right; }
    // True when `inner` is a subset of *this.
    bool contains(const ClosedInterval& inner) const {
        return left <= inner.left && inner.right <= right;
    }
    bool subset_of(const ClosedInterval& outer) const { return outer.contains(*this); }
    bool intersects(const ClosedInterval& other) const {
        return left <= other.right && other.left <= right;
    }
    // Distance between disjoint intervals, zero when they touch or overlap.
    HPReal gap(const ClosedInterval& other) const {
        if (intersects(other)) return HPReal(0L, std::max(left.prec(), other.left.prec()));
        return other.left > right ? other.left - right : left - other.right;
    }

    bool operator==(const ClosedInterval& o) const { return left == o.left && right == o.right; }
};

}  // namespace mpgame
