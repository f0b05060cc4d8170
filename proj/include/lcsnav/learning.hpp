#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lcsnav/gridworld.hpp"
#include "lcsnav/lcs.hpp"
#include "lcsnav/pathfind.hpp"
#include "lcsnav/predicates.hpp"
#include "lcsnav/rng.hpp"

namespace lcsnav {

enum class Potential : std::uint8_t { Supervised, Classical, Retrospective };

std::string_view potential_name(Potential p);
Potential parse_potential(std::string_view s);

struct LearningConfig {
    double beta = 30.0;
    Potential potential = Potential::Supervised;
    int hold = 0;              // M, retrospective delay in steps
    int hold_increment = 2;    // added to M after every generation
    double step_limit_factor = 4.0;
    std::int64_t max_commands = 0;  // overrides the factor when positive
    FusionRule fusion = FusionRule::Rule2;
    // A fused Forward into a cell known to be blocked is replaced by the naive action.
    bool wall_guard = true;
    // On revisiting a state before the map has changed, the naive planner takes
    // over until new cells are seen. Without it an evaluation stops as looped.
    bool loop_escape = true;
    // Under rule 2, a naive override still rewards the genes that voted for the action taken.
    bool credit_overrides = false;
    VisionConfig vision;
};

std::int64_t step_limit(const GridDomain& domain, double factor);
std::int64_t step_limit(const GridDomain& domain, const LearningConfig& cfg);

// Genes credited for one decision.
struct Credit {
    FusionRule rule = FusionRule::Rule2;
    std::size_t winner = 0;      // rule 1
    Contributions shares;        // rule 2: (gene, c) with c > 0 for the performed action
    bool empty() const { return rule == FusionRule::Rule2 && shares.empty(); }
};

struct PotentialDelta {
    double value = 0.0;
    bool inconsistent = false;  // some estimated distance was unreachable
};

double delta_c_supervised(const DistanceField& truth, const RobotState& s, const RobotState& s_next,
                          const RobotState& s0);
double delta_c_supervised(const GridDomain& domain, const RobotState& s, const RobotState& s_next,
                          const RobotState& s0);
// Distances from the accumulated map with unknown cells as free.
PotentialDelta delta_c_estimated(const DistanceField& optimistic, const RobotState& s,
                                 const RobotState& s_next, const RobotState& s0);
PotentialDelta delta_c_estimated(const ObservationMap& map, Cell goal, const RobotState& s,
                                 const RobotState& s_next, const RobotState& s0);

struct PendingEvaluation {
    std::int64_t step = 0;
    RobotState before;
    RobotState after;
    RobotState initial;
    Credit credit;
};

struct FlushedEvaluation {
    Credit credit;
    PotentialDelta delta;
    std::int64_t step = 0;
};

class RetrospectiveBuffer {
public:
    void schedule(PendingEvaluation e) { pending_.push_back(std::move(e)); }
    // Evaluates, in order, every entry due at `now` (step + hold <= now), or
    // all of them at episode end, against the current map's distances.
    std::vector<FlushedEvaluation> flush(const DistanceField& optimistic, std::int64_t now, int hold,
                                         bool at_end);
    std::size_t size() const { return pending_.size(); }

private:
    std::deque<PendingEvaluation> pending_;
};

// Returns the total weight change applied.
double apply_reward_rule1(GeneSet& G, std::size_t winner, double delta_c, double beta);
double apply_reward_rule2(GeneSet& G, const Contributions& contributions, double delta_c, double beta);
double apply_reward(GeneSet& G, const Credit& credit, double delta_c, double beta);

struct CreditRecord {
    std::int64_t step;
    double delta_c;
    double credited;  // sum of weight changes
};

struct EpisodeResult {
    std::vector<Action> commands;
    bool reached = false;
    double cost = 0.0;
    std::uint32_t optimal = 0;     // |p*|
    std::int64_t step_limit = 0;
    bool looped = false;           // stationary cycle detected (evaluation only)
    bool inconsistent = false;
    std::vector<RobotState> poses; // initial pose plus one per command, when traced
    std::vector<CreditRecord> credits;  // when traced and learning
};

struct EpisodeOptions {
    bool learn = false;
    bool trace = false;
};

// Learning episode; mutates weights of G.
EpisodeResult run_episode(const GridDomain& domain, GeneSet& G, const PredicateRegistry& reg,
                          const LearningConfig& cfg, EpisodeOptions opts);
// Evaluation-only episode.
EpisodeResult run_episode(const GridDomain& domain, const GeneSet& G, const PredicateRegistry& reg,
                          const LearningConfig& cfg, bool trace = false);
// Replanning naive follower with no gene set.
EpisodeResult run_naive_episode(const GridDomain& domain, const VisionConfig& vision,
                                std::int64_t limit, bool trace = false);

struct CostReport {
    double mean = 0.0;
    double stddev = 0.0;
    std::vector<std::pair<std::size_t, double>> per_domain;  // (domain index, cost) in run order
    std::size_t failures = 0;
};

CostReport make_report(const DomainEnsemble& ensemble,
                       std::vector<std::pair<std::size_t, double>> costs, std::size_t failures);

// One pass over the ensemble in shuffled order with learning; selection after
// each episode; the retrospective hold grows at the end.
CostReport run_generation(const DomainEnsemble& ensemble, GeneSet& G, const PredicateRegistry& reg,
                          LearningConfig& cfg, Rng& rng);

// Learning-free episodes on every domain. Domains run concurrently; the
// serial variant is the reference.
CostReport evaluate_policy(const DomainEnsemble& ensemble, const GeneSet& G,
                           const PredicateRegistry& reg, const LearningConfig& cfg);
CostReport evaluate_policy_serial(const DomainEnsemble& ensemble, const GeneSet& G,
                                  const PredicateRegistry& reg, const LearningConfig& cfg);
CostReport evaluate_naive(const DomainEnsemble& ensemble, const LearningConfig& cfg);

}  // namespace lcsnav
