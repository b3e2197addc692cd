#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mpgame/cylinders.hpp"
#include "mpgame/interval.hpp"

namespace mpgame {

enum class Variant { classic, strong };
enum class Player { alice, bob };

// Rules of one Schmidt game. In the classic variant each move must realize
// its ratio exactly (to a relative tolerance of 2^-(prec_bits/2)); in the
// strong variant alpha and beta are lower bounds.
struct GameConfig {
    HPReal alpha;
    HPReal beta;
    Variant variant = Variant::strong;
    long max_rounds = 0;  // 0 means uncapped
    mpfr_prec_t prec_bits = HPReal::kDefaultPrec;
    ClosedInterval field;
};

// Referee state. history holds B1, A1, B2, A2, ... and every entry is a
// subset of its predecessor. `round` indexes the current B (1-based);
// `prec` is the working precision, doubled whenever the current interval
// gets narrower than 2^-(prec/2) so that endpoint arithmetic never runs
// out of bits.
struct GameState {
    GameConfig config;
    std::vector<ClosedInterval> history;
    long round = 1;
    Player to_move = Player::alice;
    mpfr_prec_t prec = 0;
};

GameState new_game(const GameConfig& config, const ClosedInterval& B1);

// Validates nesting and the size ratio for whoever is to move, appends the
// interval and toggles the mover. Throws RuleViolation naming the offender.
GameState apply_move(const GameState& state, const ClosedInterval& interval);

enum class CaseTag { none, case1, case2 };

struct CheckpointEntry {
    long j = 0;    // checkpoint index, 1-based
    long n_j = 0;  // round at which it fired
    long g_j = 0;  // certified generation of B_{n_j}
    CaseTag tag = CaseTag::none;
    int subcase = 0;  // 1 or 2 within case 1, else 0
};

// Completed game record. Everything needed to replay the game bit for bit
// and to audit it offline: the rule set, both players' identities, the
// fitted constants the strategy ran with, and the full move list.
struct Transcript {
    GameConfig config;
    std::string alice_kind{};
    std::string bob_kind{};
    std::uint64_t bob_seed = 0;
    HPReal gamma{0L};
    HPReal C5_hat{0L};
    HPReal C2_hat{0L};  // lifted games only
    HPReal d1{0L};
    HPReal d2{0L};
    long K_target = 0;
    long M = 0;       // lifted games: forbidden prefix bound
    long lift_n = 0;  // lifted games: locked branch index
    std::vector<ClosedInterval> history{};
    std::vector<CheckpointEntry> checkpoints{};
    std::string status = "completed";

    const ClosedInterval& final_interval() const { return history.back(); }
    std::vector<ClosedInterval> bob_intervals() const;
};

class AliceStrategy {
  public:
    virtual ~AliceStrategy() = default;
    virtual ClosedInterval move(const GameState& state) = 0;
    // Record identity and fitted constants into a finished transcript.
    virtual void stamp(Transcript& t) const = 0;
};

class BobPolicy {
  public:
    virtual ~BobPolicy() = default;
    virtual ClosedInterval move(const GameState& state) = 0;
    virtual void stamp(Transcript& t) const = 0;
};

// Plays `rounds` full (Alice, Bob) exchanges from B1 and returns the
// transcript; history ends up with 2*rounds+1 intervals. rounds is clamped
// to config.max_rounds when that is positive. Rule violations and policy
// errors propagate.
Transcript run_game(const GameConfig& config, AliceStrategy& alice, BobPolicy& bob,
                    const ClosedInterval& B1, long rounds);

// ---------------------------------------------------------------------------
// Alice on the induced-map field [r1, 1].

// The winning ratio 2^(-2-1/gamma) / C5_hat.
HPReal winning_alpha(const HPReal& gamma, const HPReal& C5_hat, mpfr_prec_t prec = HPReal::kDefaultPrec);

// State of the checkpoint strategy. d1/d2/K_target are 0 until the first
// checkpoint fixes them from the measured geometry of B_2.
struct AliceStateEF {
    enum class Phase { warmup, waiting, checkpoint };

    std::shared_ptr<const CylinderTree> tree;
    HPReal alpha{0L};
    HPReal C5_hat{0L};
    HPReal d1{0L};
    HPReal d2{0L};
    long K_target = 0;
    long j = 0;    // checkpoints fired so far
    long n_j = 0;  // round of the latest checkpoint
    long g_j = 0;  // its certified generation
    Phase phase = Phase::warmup;
    std::vector<CheckpointEntry> log;
};

// Builds the initial strategy state. C5_hat may be supplied to share one
// estimate across many games; otherwise estimate_C5(4, 200) runs here.
// Requires config.alpha <= winning_alpha for the tree's exponent.
AliceStateEF make_alice_EF(std::shared_ptr<const CylinderTree> tree, const GameConfig& config,
                           const HPReal* C5_hat = nullptr);

// One move of the checkpoint strategy: warmup block on round 1, constant
// fitting plus the first checkpoint on round 2, and afterwards either a
// waiting block or a case move whenever Bob's interval reached a deeper
// certified generation.
std::pair<ClosedInterval, AliceStateEF> alice_move_EF(const GameState& state,
                                                      const AliceStateEF& astate);

class EFStrategy : public AliceStrategy {
  public:
    EFStrategy(std::shared_ptr<const CylinderTree> tree, const GameConfig& config,
               const HPReal* C5_hat = nullptr);

    ClosedInterval move(const GameState& state) override;
    void stamp(Transcript& t) const override;
    const AliceStateEF& state() const { return state_; }

  private:
    AliceStateEF state_;
};

// ---------------------------------------------------------------------------
// Alice on the full field [0, 1], by conjugating the induced-map strategy.

// Prelude: steer Bob's interval into a single branch rung [r_{n+1}, r_n].
// Lifted: push Bob's moves forward through f^n, consult the inner strategy,
// pull its block back. beta_F records exp(C2_hat) * beta_f; the auxiliary
// referee runs at beta_eff = exp(-C2_hat) * beta_f, the ratio the forward
// images actually satisfy.
struct AliceStateEf {
    enum class Phase { prelude, lifted };

    std::shared_ptr<const CylinderTree> tree;
    long n = 0;  // branch index once locked
    AliceStateEF inner;
    HPReal alpha_f{0L};
    HPReal beta_f{0L};
    HPReal alpha_F{0L};
    HPReal beta_F{0L};
    HPReal C2_hat{0L};
    HPReal beta_eff{0L};
    Phase phase = Phase::prelude;
    std::optional<GameState> aux;  // the induced-map game, once locked
};

// Requires the strong variant, config.alpha <= exp(-C2_hat) * winning_alpha
// and config.beta < exp(-C2_hat). C5_hat/C2_hat may be supplied to share
// fitted constants across games.
AliceStateEf make_alice_Ef(std::shared_ptr<const CylinderTree> tree, const GameConfig& config,
                           const HPReal* C5_hat = nullptr, const HPReal* C2_hat = nullptr);

// Throws ConstantUnderestimate when a pulled-back or pushed-forward ratio
// falls short of what the fitted distortion constant promised.
std::pair<ClosedInterval, AliceStateEf> alice_move_Ef(const GameState& state,
                                                      const AliceStateEf& astate);

class EfStrategy : public AliceStrategy {
  public:
    EfStrategy(std::shared_ptr<const CylinderTree> tree, const GameConfig& config,
               const HPReal* C5_hat = nullptr, const HPReal* C2_hat = nullptr);

    ClosedInterval move(const GameState& state) override;
    void stamp(Transcript& t) const override;
    const AliceStateEf& state() const { return state_; }

  private:
    AliceStateEf state_;
};

// ---------------------------------------------------------------------------
// Bob policies.

// Uniformly random placement of a ratio-beta interval inside Alice's block.
class RandomBob : public BobPolicy {
  public:
    explicit RandomBob(std::uint64_t seed);
    ClosedInterval move(const GameState& state) override;
    void stamp(Transcript& t) const override;

  private:
    std::uint64_t seed_;
    std::mt19937_64 rng_;
};

// Leftmost legal placement, pushing toward the small high-index cells.
class SqueezeLeftBob : public BobPolicy {
  public:
    ClosedInterval move(const GameState& state) override;
    void stamp(Transcript& t) const override;
};

// Centers its interval on the basic-interval left endpoint nearest the
// middle of Alice's block, the point the strategy's audits care about.
class BoundaryHuggerBob : public BobPolicy {
  public:
    explicit BoundaryHuggerBob(std::shared_ptr<const CylinderTree> tree);
    ClosedInterval move(const GameState& state) override;
    void stamp(Transcript& t) const override;

  private:
    std::shared_ptr<const CylinderTree> tree_;
};

// Replays a fixed move list; used for transcript replay. Throws DomainError
// when the script runs out.
class ScriptedBob : public BobPolicy {
  public:
    explicit ScriptedBob(std::vector<ClosedInterval> moves);
    ClosedInterval move(const GameState& state) override;
    void stamp(Transcript& t) const override;

  private:
    std::vector<ClosedInterval> moves_;
    std::size_t next_ = 0;
};

// Re-runs the engine against the transcript's logged Bob moves with a fresh
// strategy of the recorded kind and returns the regenerated transcript.
Transcript replay_transcript(const Transcript& t, std::shared_ptr<const CylinderTree> tree);

// ---------------------------------------------------------------------------
// Offline checks.

struct CheckpointAudit {
    long j = 0;
    bool P1 = false;  // logged generation matches a recomputation
    bool P2 = false;  // B_{n_j} is d1-commensurate with generation g_j - 1
    bool P3 = false;  // no forbidden left-edge zone meets B_{n_j} or A_{n_j}
    std::string note;
    bool pass() const { return P1 && P2 && P3; }
};

struct AuditReport {
    std::vector<CheckpointAudit> checkpoints;
    bool pass() const;
};

// Recomputes the three checkpoint invariants for every logged checkpoint,
// straight from the cylinder tree. Pure check: never throws, failures come
// back in the report.
AuditReport audit_P_invariants(const Transcript& t, const AliceStateEF& astate);

enum class AvoidanceKind { EF, Ef };

struct AvoidanceReport {
    std::string kind;
    std::string status = "inconclusive";  // "pass", "fail" or "inconclusive"
    long verified_t = 0;                  // iterates certified clear of the forbidden set
    std::vector<long> symbols;            // EF: certified itinerary of the final interval
    std::string note;
    bool pass() const { return status == "pass"; }
};

// Independent of the strategy: descends the final interval through the
// cylinder hierarchy (EF, forbidden set (r1, p_K)) or iterates f on its
// endpoints (Ef, forbidden set [0, r_M)) for as many iterates as stay
// resolvable, and reports how far the orbit is certified clear.
AvoidanceReport verify_avoidance(const Transcript& t, AvoidanceKind kind,
                                 const CylinderTree& tree);

}  // namespace mpgame
