#include <algorithm>
#include <utility>

#include "mpgame/errors.hpp"
#include "mpgame/game.hpp"

namespace mpgame {

namespace {

constexpr long kC5Depth = 4;
constexpr long kC5KMax = 200;

// Two computed points closer than this are treated as the same geometric
// point. Relative to the reference width, which shrinks with the game, so
// the band stays far below every real gap and far above endpoint error.
HPReal coincidence_band(const HPReal& w) {
    return w * HPReal::pow2(-24, std::max<mpfr_prec_t>(w.prec(), HPReal::kMinPrec));
}

HPReal hundredth_over(const HPReal& x, mpfr_prec_t wp) {
    return x * (HPReal(101L, wp) / HPReal(100L, wp));
}

// The alpha-block sharing its right endpoint with `anchor`, clamped into B.
// Outward rounding keeps the true width at or above alpha*|B|.
ClosedInterval block_ending_at(const HPReal& anchor, const ClosedInterval& B, const HPReal& alpha,
                               mpfr_prec_t wp) {
    const HPReal w = B.right.with_prec(wp) - B.left.with_prec(wp);
    const HPReal need = HPReal::mul_up(alpha.with_prec(wp), w);
    HPReal right = min(anchor.with_prec(wp), B.right.with_prec(wp));
    HPReal left = HPReal::sub_down(right, need);
    if (left < B.left) left = B.left.with_prec(wp);
    return ClosedInterval(left, right);
}

// The alpha-block sharing its left endpoint with `anchor`.
ClosedInterval block_starting_at(const HPReal& anchor, const ClosedInterval& B,
                                 const HPReal& alpha, mpfr_prec_t wp) {
    const HPReal w = B.right.with_prec(wp) - B.left.with_prec(wp);
    const HPReal need = HPReal::mul_up(alpha.with_prec(wp), w);
    HPReal left = max(anchor.with_prec(wp), B.left.with_prec(wp));
    HPReal right = HPReal::add_up(left, need);
    if (right > B.right) right = B.right.with_prec(wp);
    return ClosedInterval(left, right);
}

ClosedInterval block_centered_at(const HPReal& center, const ClosedInterval& B,
                                 const HPReal& alpha, mpfr_prec_t wp) {
    const HPReal w = B.right.with_prec(wp) - B.left.with_prec(wp);
    const HPReal half = HPReal::mul_up(alpha.with_prec(wp), w) / 2L;
    HPReal left = HPReal::sub_down(center.with_prec(wp), half);
    HPReal right = HPReal::add_up(center.with_prec(wp), half);
    if (left < B.left) left = B.left.with_prec(wp);
    if (right > B.right) right = B.right.with_prec(wp);
    return ClosedInterval(left, right);
}

// First move: any alpha-block clear of both field endpoints.
ClosedInterval warmup_block(const ClosedInterval& B, const ClosedInterval& field,
                            const HPReal& alpha, mpfr_prec_t wp) {
    const HPReal band = coincidence_band(B.right.with_prec(wp) - B.left.with_prec(wp));
    if (field.right - B.right > band) return block_ending_at(B.right, B, alpha, wp);
    if (B.left - field.left > band) return block_starting_at(B.left, B, alpha, wp);
    return block_centered_at(B.midpoint(), B, alpha, wp);
}

// At the first checkpoint the thresholds are fitted from the measured
// geometry of B_2: d1 bounds the width ratio against the coarser cells
// meeting B, d2 clears B of every coarser left-edge zone, and both are
// raised to the floors the avoidance argument needs. K_target is the
// resulting symbol bound ceil((C5*d2)^gamma).
void fit_thresholds(AliceStateEF& st, const ClosedInterval& B, long g, const HPReal& beta,
                    mpfr_prec_t res) {
    const CylinderTree& tree = *st.tree;
    const mpfr_prec_t wp = res + 64;
    const HPReal w = B.right.with_prec(wp) - B.left.with_prec(wp);
    const HPReal band = coincidence_band(w);

    HPReal d1p(1L, wp);
    for (const Cylinder& c : tree.elements_meeting(B, g - 1, res))
        d1p = max(d1p, (c.interval.right.with_prec(wp) - c.interval.left.with_prec(wp)) / w);

    // Only the cells containing B.left can push a left-edge zone into B;
    // walk that ancestor chain through the strictly coarser generations.
    HPReal d2p(1L, wp);
    Itinerary chain;
    for (long gen = 0; gen <= g - 2; ++gen) {
        const auto ep = tree.endpoints(chain, res);
        const HPReal cw = ep.right.with_prec(wp) - ep.left.with_prec(wp);
        const HPReal off = B.left.with_prec(wp) - ep.left.with_prec(wp);
        if (off <= band)
            throw PrecisionError("interval left endpoint sits on a coarse cell boundary");
        d2p = max(d2p, cw / off);
        chain.push_back(tree.locate_K(chain, off / cw, res));
    }

    const HPReal gamma = tree.map().gamma().with_prec(wp);
    const HPReal one(1L, wp);
    const HPReal two(2L, wp);
    const HPReal ab = st.alpha.with_prec(wp) * beta.with_prec(wp);
    const HPReal c5 = st.C5_hat.with_prec(wp);

    const HPReal d1_floor = two.pow(one + one / gamma) * c5 * c5 / ab;
    st.d1 = hundredth_over(max(d1p, d1_floor), wp);

    const HPReal d2_floor = two.pow(one + two / gamma) * c5 * c5 * c5 * c5 / ab;
    const HPReal d2_gap = two * st.d1 / (one - two * st.alpha.with_prec(wp));
    st.d2 = hundredth_over(max(max(d2p, d2_floor), d2_gap), wp);

    const HPReal k_real = (c5 * st.d2).pow(gamma);
    long k = k_real.floor_long();
    if (HPReal(k, wp) < k_real) k += 1;
    st.K_target = k;
}

std::pair<ClosedInterval, AliceStateEF> checkpoint_move(const GameState& state, AliceStateEF st,
                                                        const CommensurabilityResult& cg,
                                                        mpfr_prec_t res) {
    const CylinderTree& tree = *st.tree;
    const ClosedInterval& B = state.history.back();
    const mpfr_prec_t wp = res;
    const long g = cg.generation;
    if (g < 1) throw PrecisionError("checkpoint interval certified at the root generation");

    st.j += 1;
    st.n_j = state.round;
    st.g_j = g;
    st.phase = AliceStateEF::Phase::checkpoint;
    if (st.j == 1) fit_thresholds(st, B, g, state.config.beta, res);

    CheckpointEntry entry{st.j, st.n_j, st.g_j, CaseTag::none, 0};
    const HPReal w = B.right.with_prec(wp) - B.left.with_prec(wp);
    const HPReal band = coincidence_band(w);
    const HPReal mid = B.midpoint();

    // Left endpoints of strictly coarser cells in the right half of B decide
    // the case split. A hit within the band of the midpoint counts as the
    // midpoint itself and is ignored.
    std::vector<LeftEndpointHit> hits;
    for (auto& h : tree.left_endpoint_scan(ClosedInterval(mid, B.right), g - 1, res))
        if (h.point - mid > band) hits.push_back(std::move(h));

    ClosedInterval A = B;
    if (hits.empty()) {
        // The rightmost generation-g member inside B and its parent. The
        // parent starts at or left of the midpoint and runs past B.
        Itinerary parent = cg.witness.itinerary;
        parent.pop_back();
        const auto ep = tree.endpoints(parent, res);
        if (ep.left - mid > band || B.right - ep.right > band)
            throw PrecisionError("witness parent cell out of position at a checkpoint");

        Itinerary first_child = parent;
        first_child.push_back(1);
        entry.tag = CaseTag::case1;
        if (tree.endpoints(first_child, res).left - B.right > band) {
            // The parent's rightmost child starts beyond B: B's right edge
            // is already clear of every coarse left-edge zone.
            entry.subcase = 1;
            A = block_ending_at(B.right, B, st.alpha, wp);
        } else {
            // Anchor at the right edge of the second child, which reaches
            // into B with room to spare.
            entry.subcase = 2;
            Itinerary second_child = parent;
            second_child.push_back(2);
            const HPReal anchor = min(tree.endpoints(second_child, res).right,
                                      B.right.with_prec(wp));
            A = block_ending_at(anchor, B, st.alpha, wp);
        }
    } else {
        // A coarse cell starts in the right half: its left neighbor ends
        // there, and the block left of that edge sits inside the neighbor's
        // rightmost child. The next interval of Bob is a checkpoint again.
        entry.tag = CaseTag::case2;
        A = block_ending_at(hits.front().point, B, st.alpha, wp);
    }

    st.log.push_back(entry);
    return {A, std::move(st)};
}

}  // namespace

HPReal winning_alpha(const HPReal& gamma, const HPReal& C5_hat, mpfr_prec_t prec) {
    const HPReal one(1L, prec);
    const HPReal e = HPReal(-2L, prec) - one / gamma.with_prec(prec);
    return HPReal(2L, prec).pow(e) / C5_hat.with_prec(prec);
}

AliceStateEF make_alice_EF(std::shared_ptr<const CylinderTree> tree, const GameConfig& config,
                           const HPReal* C5_hat) {
    AliceStateEF st;
    st.tree = std::move(tree);
    st.C5_hat = C5_hat ? *C5_hat : st.tree->estimate_C5(kC5Depth, kC5KMax);
    if (!(st.C5_hat > 0L)) throw DomainError("C5 estimate must be positive");
    st.alpha = config.alpha;

    const mpfr_prec_t wp = std::max(config.prec_bits, st.tree->base_prec());
    const HPReal amax = winning_alpha(st.tree->map().gamma(), st.C5_hat, wp);
    if (config.alpha.with_prec(wp) > amax)
        throw DomainError("alpha exceeds the winning ratio for this exponent");
    return st;
}

std::pair<ClosedInterval, AliceStateEF> alice_move_EF(const GameState& state,
                                                      const AliceStateEF& astate) {
    if (state.to_move != Player::alice) throw DomainError("not alice's move");
    if (!astate.tree) throw DomainError("strategy state has no cylinder tree");

    AliceStateEF st = astate;
    const CylinderTree& tree = *st.tree;
    const ClosedInterval& B = state.history.back();
    const mpfr_prec_t res = std::max<mpfr_prec_t>(state.prec, tree.base_prec());

    if (state.round == 1) {
        st.phase = AliceStateEF::Phase::warmup;
        return {warmup_block(B, state.config.field, st.alpha, res), std::move(st)};
    }

    const CommensurabilityResult cg = tree.commensurate_generation(B, res);
    if (st.j == 0 && cg.generation < 1) {
        // still warming up: B does not yet sit inside a generation-1 cell
        st.phase = AliceStateEF::Phase::warmup;
        return {block_ending_at(B.right, B, st.alpha, res), std::move(st)};
    }
    if (cg.generation < st.g_j)
        throw PrecisionError("certified generation decreased between checkpoints");
    if (st.j == 0 || cg.generation > st.g_j)
        return checkpoint_move(state, std::move(st), cg, res);

    st.phase = AliceStateEF::Phase::waiting;
    return {block_ending_at(B.right, B, st.alpha, res), std::move(st)};
}

EFStrategy::EFStrategy(std::shared_ptr<const CylinderTree> tree, const GameConfig& config,
                       const HPReal* C5_hat)
    : state_(make_alice_EF(std::move(tree), config, C5_hat)) {}

ClosedInterval EFStrategy::move(const GameState& state) {
    auto [iv, st] = alice_move_EF(state, state_);
    state_ = std::move(st);
    return iv;
}

void EFStrategy::stamp(Transcript& t) const {
    t.alice_kind = "EF";
    t.gamma = state_.tree->map().gamma();
    t.C5_hat = state_.C5_hat;
    t.d1 = state_.d1;
    t.d2 = state_.d2;
    t.K_target = state_.K_target;
    t.checkpoints = state_.log;
}

}  // namespace mpgame
