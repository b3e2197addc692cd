#include <algorithm>
#include <string>
#include <utility>

#include "mpgame/errors.hpp"
#include "mpgame/game.hpp"

namespace mpgame {

namespace {

HPReal coincidence_band(const HPReal& w) {
    return w * HPReal::pow2(-24, std::max<mpfr_prec_t>(w.prec(), HPReal::kMinPrec));
}

mpfr_prec_t audit_res(const CylinderTree& tree, const ClosedInterval& iv) {
    mpfr_prec_t res = tree.base_prec();
    for (const HPReal* x : {&iv.left, &iv.right}) res = std::max(res, x->prec());
    return res + 64;
}

// True when no left-edge zone (l, l + |J|/d2) of a cell with left endpoint l
// and generation <= g_max meets X. Endpoints inside X are caught by the
// scan; zones reaching in from outside can only come from the cells
// containing X.left, so those are walked as an ancestor chain.
bool zone_free(const CylinderTree& tree, const ClosedInterval& X, long g_max, const HPReal& d2,
               mpfr_prec_t res, std::string& note) {
    if (g_max < 0) return true;
    const mpfr_prec_t wp = res;
    const HPReal w = X.right.with_prec(wp) - X.left.with_prec(wp);
    const HPReal band = coincidence_band(w);

    for (const auto& h : tree.left_endpoint_scan(X, g_max, res)) {
        if (X.right - h.point > band) {
            note = "left endpoint of " + itinerary_to_string(h.owner) + " inside the interval";
            return false;
        }
    }

    Itinerary chain;
    for (long gen = 0; gen <= g_max; ++gen) {
        const auto ep = tree.endpoints(chain, res);
        const HPReal cw = ep.right.with_prec(wp) - ep.left.with_prec(wp);
        const HPReal off = X.left.with_prec(wp) - ep.left.with_prec(wp);
        if (off <= band) {
            note = "interval starts on the left edge of " + itinerary_to_string(chain);
            return false;
        }
        if (cw / d2.with_prec(wp) - off > band) {
            note = "zone of " + itinerary_to_string(chain) + " reaches into the interval";
            return false;
        }
        if (gen < g_max) chain.push_back(tree.locate_K(chain, off / cw, res));
    }
    return true;
}

}  // namespace

bool AuditReport::pass() const {
    if (checkpoints.empty()) return false;
    for (const auto& c : checkpoints)
        if (!c.pass()) return false;
    return true;
}

AuditReport audit_P_invariants(const Transcript& t, const AliceStateEF& astate) {
    AuditReport rep;
    if (!astate.tree) return rep;
    const CylinderTree& tree = *astate.tree;

    for (const CheckpointEntry& e : t.checkpoints) {
        CheckpointAudit a;
        a.j = e.j;
        const std::size_t bidx = 2 * static_cast<std::size_t>(e.n_j - 1);
        if (e.n_j < 1 || bidx + 1 >= t.history.size()) {
            a.note = "checkpoint round missing from history";
            rep.checkpoints.push_back(a);
            continue;
        }
        const ClosedInterval& B = t.history[bidx];
        const ClosedInterval& A = t.history[bidx + 1];
        const mpfr_prec_t res = std::max(audit_res(tree, B), audit_res(tree, A));

        try {
            a.P1 = tree.commensurate_generation(B, res).generation == e.g_j;
            if (!a.P1) a.note += "recomputed generation differs; ";
        } catch (const Error& err) {
            a.note += std::string("P1: ") + err.what() + "; ";
        }

        try {
            bool ok = true;
            const HPReal wB = B.width();
            for (const Cylinder& c : tree.elements_meeting(B, e.g_j - 1, res)) {
                if (!(c.interval.width() < astate.d1 * wB)) {
                    ok = false;
                    a.note += "coarse cell " + itinerary_to_string(c.itinerary) + " too wide; ";
                    break;
                }
            }
            a.P2 = ok;
        } catch (const Error& err) {
            a.P2 = false;
            a.note += std::string("P2: ") + err.what() + "; ";
        }

        try {
            std::string why;
            const bool b_side = zone_free(tree, B, e.g_j - 2, astate.d2, res, why);
            const bool a_side = b_side && zone_free(tree, A, e.g_j - 1, astate.d2, res, why);
            a.P3 = b_side && a_side;
            if (!a.P3) a.note += "P3: " + why + "; ";
        } catch (const Error& err) {
            a.P3 = false;
            a.note += std::string("P3: ") + err.what() + "; ";
        }

        rep.checkpoints.push_back(a);
    }
    return rep;
}

namespace {

AvoidanceReport verify_EF(const Transcript& t, const CylinderTree& tree) {
    AvoidanceReport rep;
    rep.kind = "EF";
    if (t.K_target <= 0) {
        rep.note = "transcript carries no symbol bound";
        return rep;
    }

    const ClosedInterval& B = t.final_interval();
    const mpfr_prec_t res = audit_res(tree, B);
    const HPReal tie = HPReal::pow2(-static_cast<long>(res) - 16, res);

    // Descend while exactly one cell of the next generation meets the final
    // interval and contains it (up to the certified tie). Every resolved
    // symbol <= K_target certifies one more clear iterate of the return map.
    Itinerary sigma;
    bool breached = false;
    for (;;) {
        std::vector<Cylinder> members;
        try {
            members = tree.elements_meeting(B, static_cast<long>(sigma.size()) + 1, res);
        } catch (const Error& err) {
            rep.note = err.what();
            break;
        }
        if (members.size() != 1) break;
        const auto ep = tree.endpoints(members.front().itinerary, res);
        if (!(ep.left <= B.left + tie && B.right <= ep.right + tie)) break;

        sigma = members.front().itinerary;
        rep.symbols.push_back(sigma.back());
        if (sigma.back() > t.K_target) {
            breached = true;
            rep.note = "symbol " + std::to_string(sigma.back()) + " at depth " +
                       std::to_string(sigma.size()) + " exceeds the bound " +
                       std::to_string(t.K_target);
            break;
        }
        if (static_cast<long>(sigma.size()) > 100000) {
            rep.note = "descent depth cap reached";
            break;
        }
    }

    if (breached) {
        rep.status = "fail";
        rep.verified_t = static_cast<long>(rep.symbols.size()) - 1;
    } else if (rep.symbols.empty()) {
        rep.status = "inconclusive";
        if (rep.note.empty()) rep.note = "final interval too wide to resolve a symbol";
    } else {
        rep.status = "pass";
        rep.verified_t = static_cast<long>(rep.symbols.size());
    }
    return rep;
}

AvoidanceReport verify_Ef(const Transcript& t, const CylinderTree& tree) {
    AvoidanceReport rep;
    rep.kind = "Ef";
    if (t.M <= 0) {
        rep.note = "transcript carries no forbidden prefix bound";
        return rep;
    }

    const ClosedInterval& B = t.final_interval();
    const mpfr_prec_t wp = audit_res(tree, B);
    const MPMap& map = tree.map();

    // A smaller index means a larger forbidden set, so capping the index
    // only makes the check harder; without the cap the branch ladder would
    // have to be grown to an astronomical index.
    const long m_eff = std::min(t.M, 10000L);
    if (m_eff < t.M) rep.note = "checked against the larger forbidden set of index " +
                                std::to_string(m_eff);
    const HPReal rM = map.r(m_eff, wp);
    const HPReal r1 = map.r1().with_prec(wp);
    const HPReal ex = HPReal(1L, wp) + map.gamma().with_prec(wp);

    HPReal lo = B.left.with_prec(wp);
    HPReal hi = B.right.with_prec(wp);
    long cleared = 0;
    bool breached = false;
    for (long step = 0; step <= 4000; ++step) {
        if (lo < rM) {
            breached = true;
            rep.note = "iterate " + std::to_string(step) + " enters the forbidden prefix";
            break;
        }
        cleared = step + 1;
        if (hi - lo > HPReal(1L, wp) / 4L) break;  // image too coarse to keep iterating
        if (lo >= r1) {
            lo = map.eval(lo);
            hi = map.eval(hi);
        } else if (hi <= r1) {
            // left branch, extended continuously to its right edge
            lo = lo + lo.pow(ex);
            hi = hi + hi.pow(ex);
        } else {
            break;  // straddles the branch cut, monotonicity gone
        }
    }

    rep.verified_t = cleared;
    rep.status = breached ? "fail" : (cleared > 0 ? "pass" : "inconclusive");
    return rep;
}

}  // namespace

AvoidanceReport verify_avoidance(const Transcript& t, AvoidanceKind kind,
                                 const CylinderTree& tree) {
    if (t.history.empty()) {
        AvoidanceReport rep;
        rep.kind = kind == AvoidanceKind::EF ? "EF" : "Ef";
        rep.note = "empty transcript";
        return rep;
    }
    return kind == AvoidanceKind::EF ? verify_EF(t, tree) : verify_Ef(t, tree);
}

}  // namespace mpgame
