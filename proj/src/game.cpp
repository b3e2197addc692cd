#include "mpgame/game.hpp"

#include <algorithm>

#include "mpgame/errors.hpp"

namespace mpgame {

namespace {

const char* player_name(Player p) { return p == Player::alice ? "alice" : "bob"; }

// Working precision high enough to evaluate widths of both intervals
// exactly (their endpoints have at most max(...) bits each).
mpfr_prec_t width_prec(const GameState& state, const ClosedInterval& iv) {
    mpfr_prec_t wp = state.prec;
    const ClosedInterval& prev = state.history.back();
    for (const HPReal* x : {&prev.left, &prev.right, &iv.left, &iv.right})
        wp = std::max(wp, x->prec());
    return wp + 64;
}

}  // namespace

std::vector<ClosedInterval> Transcript::bob_intervals() const {
    std::vector<ClosedInterval> out;
    for (std::size_t i = 0; i < history.size(); i += 2) out.push_back(history[i]);
    return out;
}

GameState new_game(const GameConfig& config, const ClosedInterval& B1) {
    if (!(config.alpha > 0L) || !(config.alpha < 1L) || !(config.beta > 0L) ||
        !(config.beta < 1L))
        throw DomainError("alpha and beta must lie in (0, 1)");
    if (config.prec_bits < HPReal::kMinPrec) throw DomainError("prec_bits below the precision floor");
    if (config.max_rounds < 0) throw DomainError("max_rounds must be >= 0");
    if (!config.field.contains(B1)) throw DomainError("opening interval leaves the playing field");

    GameState state{config, {B1}, 1, Player::alice, config.prec_bits};
    while (B1.width() < HPReal::pow2(-static_cast<long>(state.prec / 2))) state.prec *= 2;
    return state;
}

GameState apply_move(const GameState& state, const ClosedInterval& interval) {
    const ClosedInterval& prev = state.history.back();
    const Player mover = state.to_move;
    const int round = static_cast<int>(state.round);

    if (!prev.contains(interval))
        throw RuleViolation("move is not nested in the current interval", player_name(mover),
                            round);

    const mpfr_prec_t wp = width_prec(state, interval);
    const HPReal w_prev = prev.right.with_prec(wp) - prev.left.with_prec(wp);
    const HPReal w_new = interval.right.with_prec(wp) - interval.left.with_prec(wp);
    const HPReal& ratio = (mover == Player::alice) ? state.config.alpha : state.config.beta;
    const HPReal required = ratio.with_prec(wp) * w_prev;
    // Relative guard so correctly rounded endpoint arithmetic cannot flip a
    // verdict on an honestly constructed block.
    const HPReal tol = HPReal::pow2(-static_cast<long>(state.config.prec_bits / 2), wp);

    if (state.config.variant == Variant::classic) {
        const HPReal rel = w_new / required - HPReal(1L, wp);
        if (rel.abs() > tol)
            throw RuleViolation("classic variant requires the exact size ratio",
                                player_name(mover), round);
    } else {
        if (w_new < required * (HPReal(1L, wp) - tol))
            throw RuleViolation("move is smaller than the ratio allows", player_name(mover),
                                round);
    }

    GameState next = state;
    next.history.push_back(interval);
    if (mover == Player::alice) {
        next.to_move = Player::bob;
    } else {
        next.to_move = Player::alice;
        next.round += 1;
    }
    while (w_new < HPReal::pow2(-static_cast<long>(next.prec / 2))) next.prec *= 2;
    return next;
}

Transcript run_game(const GameConfig& config, AliceStrategy& alice, BobPolicy& bob,
                    const ClosedInterval& B1, long rounds) {
    if (rounds < 0) throw DomainError("rounds must be >= 0");
    long cap = rounds;
    if (config.max_rounds > 0) cap = std::min(cap, config.max_rounds);

    GameState state = new_game(config, B1);
    for (long k = 0; k < cap; ++k) {
        state = apply_move(state, alice.move(state));
        state = apply_move(state, bob.move(state));
    }

    Transcript t{.config = config};
    t.history = state.history;
    alice.stamp(t);
    bob.stamp(t);
    t.status = "completed";
    return t;
}

// ---------------------------------------------------------------------------
// Bob policies.

RandomBob::RandomBob(std::uint64_t seed) : seed_(seed), rng_(seed) {}

ClosedInterval RandomBob::move(const GameState& state) {
    const ClosedInterval& A = state.history.back();
    const mpfr_prec_t wp = state.prec;
    const HPReal a = A.left.with_prec(wp);
    const HPReal b = A.right.with_prec(wp);
    const HPReal w = HPReal::mul_up(state.config.beta.with_prec(wp), b - a);

    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
    HPReal left = a + HPReal(u, wp) * ((b - a) - w);
    HPReal right = HPReal::add_up(left, w);
    if (right > b) {  // shift the block back inside
        right = b;
        left = HPReal::sub_down(b, w);
    }
    if (left < a) left = a;
    return ClosedInterval(left, right);
}

void RandomBob::stamp(Transcript& t) const {
    t.bob_kind = "random";
    t.bob_seed = seed_;
}

ClosedInterval SqueezeLeftBob::move(const GameState& state) {
    const ClosedInterval& A = state.history.back();
    const mpfr_prec_t wp = state.prec;
    const HPReal a = A.left.with_prec(wp);
    const HPReal w = HPReal::mul_up(state.config.beta.with_prec(wp), A.right.with_prec(wp) - a);
    const HPReal right = min(HPReal::add_up(a, w), A.right.with_prec(wp));
    return ClosedInterval(a, right);
}

void SqueezeLeftBob::stamp(Transcript& t) const { t.bob_kind = "squeeze_left"; }

BoundaryHuggerBob::BoundaryHuggerBob(std::shared_ptr<const CylinderTree> tree)
    : tree_(std::move(tree)) {}

ClosedInterval BoundaryHuggerBob::move(const GameState& state) {
    const ClosedInterval& A = state.history.back();
    const mpfr_prec_t wp = state.prec;
    const mpfr_prec_t res = std::max(wp, tree_->base_prec());

    // Aim at the basic-interval left endpoint closest to the middle of A.
    // The scan depth and child-index cap stay fixed: the interesting attacks
    // are on coarse boundaries, and once A hugs an accumulation point the
    // nearby indices explode, so the probe must fail fast, not resolve them.
    // With no hit in range, squeeze left instead.
    constexpr long kHugDepth = 8;
    constexpr long kHugIndexCap = 4096;
    try {
        const auto hits = tree_->left_endpoint_scan(A, kHugDepth, res, kHugIndexCap);
        if (!hits.empty()) {
            const HPReal mid = A.midpoint();
            const LeftEndpointHit* best = &hits.front();
            for (const auto& h : hits)
                if ((h.point - mid).abs() < (best->point - mid).abs()) best = &h;

            const HPReal a = A.left.with_prec(wp);
            const HPReal b = A.right.with_prec(wp);
            const HPReal w = HPReal::mul_up(state.config.beta.with_prec(wp), b - a);
            HPReal left = best->point.with_prec(wp) - w / 2L;
            HPReal right = HPReal::add_up(left, w);
            if (left < a) {
                left = a;
                right = HPReal::add_up(a, w);
            }
            if (right > b) {
                right = b;
                left = HPReal::sub_down(b, w);
            }
            if (left < a) left = a;
            return ClosedInterval(left, right);
        }
    } catch (const PrecisionError&) {
        // fall through to the squeeze
    } catch (const ResourceError&) {
    } catch (const DomainError&) {
        // outside the tree's field (lifted games play on [0,1])
    }
    SqueezeLeftBob squeeze;
    return squeeze.move(state);
}

void BoundaryHuggerBob::stamp(Transcript& t) const { t.bob_kind = "boundary_hugger"; }

ScriptedBob::ScriptedBob(std::vector<ClosedInterval> moves) : moves_(std::move(moves)) {}

ClosedInterval ScriptedBob::move(const GameState&) {
    if (next_ >= moves_.size()) throw DomainError("bob script exhausted");
    return moves_[next_++];
}

void ScriptedBob::stamp(Transcript& t) const { t.bob_kind = "scripted"; }

Transcript replay_transcript(const Transcript& t, std::shared_ptr<const CylinderTree> tree) {
    std::vector<ClosedInterval> bobs = t.bob_intervals();
    if (bobs.empty()) throw DomainError("transcript has no opening interval");
    const ClosedInterval B1 = bobs.front();
    bobs.erase(bobs.begin());
    const long rounds = static_cast<long>(bobs.size());

    ScriptedBob bob(std::move(bobs));
    if (t.alice_kind == "EF") {
        EFStrategy alice(std::move(tree), t.config, &t.C5_hat);
        return run_game(t.config, alice, bob, B1, rounds);
    }
    if (t.alice_kind == "Ef") {
        EfStrategy alice(std::move(tree), t.config, &t.C5_hat, &t.C2_hat);
        return run_game(t.config, alice, bob, B1, rounds);
    }
    throw DomainError("cannot replay alice of kind '" + t.alice_kind + "'");
}

}  // namespace mpgame
