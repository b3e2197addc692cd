#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "mpgame/constants.hpp"
#include "mpgame/errors.hpp"
#include "mpgame/game.hpp"

namespace mpgame {

namespace {

constexpr long kC5Depth = 4;
constexpr long kC5KMax = 200;
constexpr long kRungWalkCap = 2000000;

HPReal coincidence_band(const HPReal& w) {
    return w * HPReal::pow2(-24, std::max<mpfr_prec_t>(w.prec(), HPReal::kMinPrec));
}

ClosedInterval block_ending_at(const HPReal& anchor, const ClosedInterval& B, const HPReal& alpha,
                               mpfr_prec_t wp) {
    const HPReal w = B.right.with_prec(wp) - B.left.with_prec(wp);
    const HPReal need = HPReal::mul_up(alpha.with_prec(wp), w);
    HPReal right = min(anchor.with_prec(wp), B.right.with_prec(wp));
    HPReal left = HPReal::sub_down(right, need);
    if (left < B.left) left = B.left.with_prec(wp);
    return ClosedInterval(left, right);
}

ClosedInterval block_starting_at(const HPReal& anchor, const ClosedInterval& B,
                                 const HPReal& alpha, mpfr_prec_t wp) {
    const HPReal w = B.right.with_prec(wp) - B.left.with_prec(wp);
    const HPReal need = HPReal::mul_up(alpha.with_prec(wp), w);
    HPReal left = max(anchor.with_prec(wp), B.left.with_prec(wp));
    HPReal right = HPReal::add_up(left, need);
    if (right > B.right) right = B.right.with_prec(wp);
    return ClosedInterval(left, right);
}

// Largest n with r_{n+1} <= x, so x sits in the branch rung [r_{n+1}, r_n].
long rung_index(const MPMap& map, const HPReal& x, mpfr_prec_t wp) {
    if (!(x > 0L)) throw DomainError("rung index needs a positive point");
    long n = 0;
    while (map.r(n + 1, wp) > x) {
        if (++n > kRungWalkCap) throw ResourceError("rung walk exceeded the ladder budget");
    }
    return n;
}

// True when no branch point r_k cuts through the interior of X.
bool clear_of_rungs(const MPMap& map, const ClosedInterval& X, mpfr_prec_t wp,
                    const HPReal& band) {
    const long kr = rung_index(map, X.right, wp);
    const long kl = rung_index(map, X.left, wp);
    for (long k = kr + 1; k <= kl; ++k) {
        const HPReal rk = map.r(k, wp);
        if (rk - X.left > band && X.right - rk > band) return false;
    }
    return true;
}

// n forward steps through the left branch, which is where every rung lives.
HPReal forward_n(const MPMap& map, const HPReal& x0, long n, mpfr_prec_t wp) {
    const HPReal ex = HPReal(1L, wp) + map.gamma().with_prec(wp);
    HPReal x = x0.with_prec(wp + 32);
    for (long i = 0; i < n; ++i) x = x + x.pow(ex);
    return x;
}

ClosedInterval pull_back_n(const MPMap& map, const ClosedInterval& Ap, long n,
                           const ClosedInterval& B, mpfr_prec_t wp) {
    HPReal lo = Ap.left;
    HPReal hi = Ap.right;
    for (long i = 0; i < n; ++i) {
        lo = map.left_inverse(lo, wp + 64);
        hi = map.left_inverse(hi, wp + 64);
    }
    // the true pullback lies in B; shave the rounding fuzz off
    lo = max(lo, B.left.with_prec(wp));
    hi = min(hi, B.right.with_prec(wp));
    return ClosedInterval(lo, hi);
}

void require_ratio(const ClosedInterval& outer, const ClosedInterval& inner, const HPReal& floor,
                   mpfr_prec_t wp, mpfr_prec_t prec_bits, const HPReal& reference,
                   const HPReal& C2_hat, const char* which) {
    const HPReal w_out = outer.right.with_prec(wp) - outer.left.with_prec(wp);
    const HPReal w_in = inner.right.with_prec(wp) - inner.left.with_prec(wp);
    const HPReal tol = HPReal::pow2(-static_cast<long>(prec_bits / 2), wp);
    if (w_in < floor.with_prec(wp) * w_out * (HPReal(1L, wp) - tol)) {
        const double realized = (w_in / w_out).to_double();
        const double needed = std::log(reference.to_double() / realized);
        const double factor = 1.1 * needed / C2_hat.to_double();
        throw ConstantUnderestimate(std::string(which) +
                                        " ratio fell below the distortion allowance",
                                    factor > 1.0 ? factor : 1.1);
    }
}

}  // namespace

AliceStateEf make_alice_Ef(std::shared_ptr<const CylinderTree> tree, const GameConfig& config,
                           const HPReal* C5_hat, const HPReal* C2_hat) {
    if (!tree) throw DomainError("strategy needs a cylinder tree");
    if (config.variant != Variant::strong)
        throw DomainError("the lifted strategy plays the strong variant only");

    AliceStateEf st;
    st.tree = tree;
    const MPMap& map = tree->map();
    const mpfr_prec_t wp = std::max(config.prec_bits, tree->base_prec());

    st.C2_hat = C2_hat ? *C2_hat : estimate_constants(map.params(), 100, 30).C2_hat;
    if (!(st.C2_hat > 0L)) throw DomainError("C2 estimate must be positive");
    const HPReal shrink = (-st.C2_hat.with_prec(wp)).exp();  // exp(-C2)
    const HPReal grow = st.C2_hat.with_prec(wp).exp();

    const HPReal c5 = C5_hat ? *C5_hat : tree->estimate_C5(kC5Depth, kC5KMax);
    st.alpha_F = winning_alpha(map.gamma(), c5, wp);
    st.alpha_f = config.alpha;
    st.beta_f = config.beta;
    st.beta_F = grow * st.beta_f.with_prec(wp);
    st.beta_eff = shrink * st.beta_f.with_prec(wp);

    if (!(config.beta.with_prec(wp) < shrink))
        throw DomainError("beta must stay below exp(-C2) for the lift to exist");
    if (config.alpha.with_prec(wp) > shrink * st.alpha_F)
        throw DomainError("alpha exceeds the lifted winning ratio");

    GameConfig inner_cfg{st.alpha_F, st.beta_eff, Variant::strong, 0, config.prec_bits,
                         map.field()};
    st.inner = make_alice_EF(std::move(tree), inner_cfg, &c5);
    return st;
}

std::pair<ClosedInterval, AliceStateEf> alice_move_Ef(const GameState& state,
                                                      const AliceStateEf& astate) {
    if (state.to_move != Player::alice) throw DomainError("not alice's move");
    if (!astate.tree) throw DomainError("strategy state has no cylinder tree");

    AliceStateEf st = astate;
    const CylinderTree& tree = *st.tree;
    const MPMap& map = tree.map();
    const ClosedInterval& B = state.history.back();
    const mpfr_prec_t wp = std::max<mpfr_prec_t>(state.prec, tree.base_prec()) + 64;
    const HPReal w = B.right.with_prec(wp) - B.left.with_prec(wp);
    const HPReal band = coincidence_band(w);

    if (st.phase == AliceStateEf::Phase::prelude) {
        // The opening block dodges 0 by sharing B's right endpoint.
        if (state.round == 1) return {block_ending_at(B.right, B, st.alpha_f, wp), std::move(st)};

        long kr = rung_index(map, B.right, wp);
        const long kl = rung_index(map, B.left, wp);
        // A right endpoint sitting on the rung boundary r_kl belongs to the
        // closed rung below it, so [r_2, r_1] locks at once.
        if (kl == kr + 1 && (B.right.with_prec(wp) - map.r(kl, wp)).abs() <= band) kr = kl;
        if (kl != kr) {
            // Still straddling a branch point. At most one of the two edge
            // blocks can contain any given point, so trying both shakes the
            // last branch point off within two rounds.
            const ClosedInterval at_right = block_ending_at(B.right, B, st.alpha_f, wp);
            if (clear_of_rungs(map, at_right, wp, band)) return {at_right, std::move(st)};
            const ClosedInterval at_left = block_starting_at(B.left, B, st.alpha_f, wp);
            if (clear_of_rungs(map, at_left, wp, band)) return {at_left, std::move(st)};
            return {at_right, std::move(st)};
        }

        // Locked into the rung [r_{n+1}, r_n]: open the auxiliary game on
        // the return-map field with the forward image of B. The auxiliary
        // intervals are rounded inward to the auxiliary game's precision so
        // the inner strategy sees uniform-precision endpoints.
        st.n = kl;
        st.phase = AliceStateEf::Phase::lifted;
        const ClosedInterval field = map.field();
        HPReal lo = max(forward_n(map, B.left, st.n, wp), field.left);
        HPReal hi = min(forward_n(map, B.right, st.n, wp), field.right);
        GameConfig aux_cfg{st.alpha_F, st.beta_eff, Variant::strong, 0, state.config.prec_bits,
                           field};
        st.aux = new_game(aux_cfg, ClosedInterval(lo.with_prec_up(aux_cfg.prec_bits),
                                                  hi.with_prec_down(aux_cfg.prec_bits)));
    } else {
        // Push Bob's newest interval forward into the auxiliary game,
        // rounded inward to the auxiliary game's working precision.
        const ClosedInterval& prev_block = st.aux->history.back();
        HPReal lo = max(forward_n(map, B.left, st.n, wp), prev_block.left);
        HPReal hi = min(forward_n(map, B.right, st.n, wp), prev_block.right);
        const ClosedInterval Bp(lo.with_prec_up(st.aux->prec), hi.with_prec_down(st.aux->prec));
        require_ratio(prev_block, Bp, st.beta_eff, wp, state.config.prec_bits, st.beta_f,
                      st.C2_hat, "forward image");
        st.aux = apply_move(*st.aux, Bp);
    }

    auto [Ap, inner_next] = alice_move_EF(*st.aux, st.inner);
    st.inner = std::move(inner_next);
    st.aux = apply_move(*st.aux, Ap);

    const ClosedInterval A = pull_back_n(map, Ap, st.n, B, wp);
    require_ratio(B, A, st.alpha_f, wp, state.config.prec_bits, st.alpha_F, st.C2_hat,
                  "pulled-back block");
    return {A, std::move(st)};
}

EfStrategy::EfStrategy(std::shared_ptr<const CylinderTree> tree, const GameConfig& config,
                       const HPReal* C5_hat, const HPReal* C2_hat)
    : state_(make_alice_Ef(std::move(tree), config, C5_hat, C2_hat)) {}

ClosedInterval EfStrategy::move(const GameState& state) {
    auto [iv, st] = alice_move_Ef(state, state_);
    state_ = std::move(st);
    return iv;
}

void EfStrategy::stamp(Transcript& t) const {
    t.alice_kind = "Ef";
    t.gamma = state_.tree->map().gamma();
    t.C2_hat = state_.C2_hat;
    t.C5_hat = state_.inner.C5_hat;
    t.d1 = state_.inner.d1;
    t.d2 = state_.inner.d2;
    t.K_target = state_.inner.K_target;
    // checkpoint rounds in the log count auxiliary-game rounds
    t.checkpoints = state_.inner.log;
    t.lift_n = state_.n;
    if (state_.phase == AliceStateEf::Phase::lifted && state_.inner.K_target > 0)
        t.M = 2 + std::max(state_.inner.K_target, state_.n);
}

}  // namespace mpgame
