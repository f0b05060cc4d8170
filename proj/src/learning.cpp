#include "lcsnav/learning.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lcsnav/kernels.hpp"

namespace lcsnav {

std::string_view potential_name(Potential p) {
    switch (p) {
        case Potential::Supervised: return "supervised";
        case Potential::Classical: return "classical";
        case Potential::Retrospective: return "retrospective";
    }
    return "supervised";
}

Potential parse_potential(std::string_view s) {
    if (s == "supervised") return Potential::Supervised;
    if (s == "classical") return Potential::Classical;
    if (s == "retrospective") return Potential::Retrospective;
    throw std::invalid_argument("potential must be supervised, classical or retrospective");
}

std::int64_t step_limit(const GridDomain& domain, double factor) {
    const double raw = std::ceil(factor * domain.width() * domain.height());
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(raw));
}

std::int64_t step_limit(const GridDomain& domain, const LearningConfig& cfg) {
    return cfg.max_commands > 0 ? cfg.max_commands : step_limit(domain, cfg.step_limit_factor);
}

double delta_c_supervised(const DistanceField& truth, const RobotState& s, const RobotState& s_next,
                          const RobotState& s0) {
    const std::uint32_t r = truth.distance(s), rn = truth.distance(s_next), r0 = truth.distance(s0);
    if (r == kUnreachable || rn == kUnreachable || r0 == kUnreachable)
        throw std::logic_error("supervised potential on an unsolvable domain");
    if (r0 == 0) throw std::logic_error("supervised potential needs a non-goal initial state");
    return (static_cast<double>(r) - static_cast<double>(rn)) / static_cast<double>(r0);
}

double delta_c_supervised(const GridDomain& domain, const RobotState& s, const RobotState& s_next,
                          const RobotState& s0) {
    return delta_c_supervised(true_distances(domain), s, s_next, s0);
}

PotentialDelta delta_c_estimated(const DistanceField& optimistic, const RobotState& s,
                                 const RobotState& s_next, const RobotState& s0) {
    const std::uint32_t r = optimistic.distance(s), rn = optimistic.distance(s_next),
                        r0 = optimistic.distance(s0);
    if (r == kUnreachable || rn == kUnreachable || r0 == kUnreachable || r0 == 0) return {0.0, true};
    return {(static_cast<double>(r) - static_cast<double>(rn)) / static_cast<double>(r0), false};
}

PotentialDelta delta_c_estimated(const ObservationMap& map, Cell goal, const RobotState& s,
                                 const RobotState& s_next, const RobotState& s0) {
    return delta_c_estimated(DistanceField(GridView(map, UnknownMode::AsFree), goal), s, s_next, s0);
}

std::vector<FlushedEvaluation> RetrospectiveBuffer::flush(const DistanceField& optimistic,
                                                          std::int64_t now, int hold, bool at_end) {
    std::vector<FlushedEvaluation> out;
    while (!pending_.empty() && (at_end || pending_.front().step + hold <= now)) {
        PendingEvaluation& e = pending_.front();
        out.push_back({std::move(e.credit), delta_c_estimated(optimistic, e.before, e.after, e.initial),
                       e.step});
        pending_.pop_front();
    }
    return out;
}

double apply_reward_rule1(GeneSet& G, std::size_t winner, double delta_c, double beta) {
    const double r = beta * delta_c;
    G.genes().at(winner).weight += r;
    return r;
}

double apply_reward_rule2(GeneSet& G, const Contributions& contributions, double delta_c,
                          double beta) {
    double z = 0.0;
    for (const auto& [i, c] : contributions) z += c;
    if (!(z > 0.0)) return 0.0;
    const double r = beta * delta_c / z;
    double total = 0.0;
    auto& genes = G.genes();
    for (const auto& [i, c] : contributions) {
        const double dw = r * c;
        genes.at(i).weight += dw;
        total += dw;
    }
    return total;
}

double apply_reward(GeneSet& G, const Credit& credit, double delta_c, double beta) {
    return credit.rule == FusionRule::Rule1 ? apply_reward_rule1(G, credit.winner, delta_c, beta)
                                            : apply_reward_rule2(G, credit.shares, delta_c, beta);
}

namespace {

std::size_t state_slot(const GridDomain& d, const RobotState& s) {
    return d.index(s.position) * 4 + static_cast<std::size_t>(s.direction);
}

// Shared episode loop. `learner` is null for evaluation.
EpisodeResult episode(const GridDomain& domain, const GeneSet& G, GeneSet* learner,
                      const PredicateRegistry* reg, const LearningConfig& cfg, bool trace) {
    EpisodeResult res;
    const DistanceField truth = true_distances(domain);
    const RobotState s0 = domain.start();
    res.optimal = truth.distance(s0);
    res.step_limit = step_limit(domain, cfg);
    if (res.optimal == kUnreachable) throw UnsolvableError("domain has no path to the goal");

    const bool learn = learner != nullptr;
    const bool estimated = learn && cfg.potential != Potential::Supervised;
    const bool need_optimistic = !reg || reg->needs_optimistic() || estimated;
    const bool need_pessimistic = reg && reg->needs_pessimistic();

    ObservationMap map(domain.width(), domain.height());
    RobotState state = s0;
    std::uint64_t version = 0;
    std::optional<DistanceField> optimistic, pessimistic;
    std::uint64_t optimistic_version = ~0ULL, pessimistic_version = ~0ULL;
    auto refresh_fields = [&](bool want_pessimistic) {
        if (optimistic_version != version) {
            optimistic.emplace(GridView(map, UnknownMode::AsFree), domain.goal());
            optimistic_version = version;
        }
        if (want_pessimistic && pessimistic_version != version) {
            pessimistic.emplace(GridView(map, UnknownMode::AsOccupied), domain.goal());
            pessimistic_version = version;
        }
    };

    std::vector<std::uint64_t> last_seen(static_cast<std::size_t>(domain.width()) * domain.height() * 4, ~0ULL);
    // Map version at which a revisit was detected; the naive planner drives
    // until something new is seen.
    std::uint64_t escaping = ~0ULL;
    PredicateVector values(reg ? reg->size() : 0);
    std::vector<double> conditions(G.genes().size());
    RetrospectiveBuffer buffer;

    auto credit_all = [&](const std::vector<FlushedEvaluation>& flushed) {
        for (const auto& f : flushed) {
            res.inconsistent = res.inconsistent || f.delta.inconsistent;
            const double credited = apply_reward(*learner, f.credit, f.delta.value, cfg.beta);
            if (trace) res.credits.push_back({f.step, f.delta.value, credited});
        }
    };

    if (trace) res.poses.push_back(state);
    for (std::int64_t t = 0;; ++t) {
        if (observe(map, domain, state.position, cfg.vision) > 0) ++version;
        if (state.position == domain.goal()) {
            res.reached = true;
            break;
        }
        if (static_cast<std::int64_t>(res.commands.size()) >= res.step_limit) break;
        {
            // Revisiting a state with an unchanged map: a fixed policy would loop forever.
            auto& seen = last_seen[state_slot(domain, state)];
            if (seen == version && escaping != version) {
                res.looped = true;
                if (!cfg.loop_escape) {
                    if (!learn) break;
                } else {
                    escaping = version;
                }
            }
            seen = version;
        }
        if (need_optimistic) refresh_fields(need_pessimistic);

        if (learn && cfg.potential == Potential::Retrospective)
            credit_all(buffer.flush(*optimistic, t, cfg.hold, false));

        Action action = Action::Forward;
        Credit credit;
        bool decided = false;
        bool evaluated = false;
        // Every living gene that voted for `a` shares the reward, incubating ones included.
        auto voters_for = [&](Action a) {
            Contributions shares;
            const auto& genes = G.genes();
            for (std::size_t i = 0; i < genes.size(); ++i)
                if (genes[i].action == a && conditions[i] > 0.0 && G.alive(genes[i]) &&
                    (genes[i].active || G.config().credit_incubating))
                    shares.emplace_back(i, conditions[i]);
            return shares;
        };
        if (reg && (escaping != version || (learn && cfg.credit_overrides))) {
            reg->evaluate({{state, &map, domain.goal()},
                           need_optimistic ? &*optimistic : nullptr,
                           need_pessimistic ? &*pessimistic : nullptr},
                          values);
            kernels::conditions(G.genes(), values, conditions);
            evaluated = true;
        }
        if (evaluated && escaping != version) {
            try {
                if (cfg.fusion == FusionRule::Rule1) {
                    const Rule1Choice c = fuse_rule1(G, std::span<const double>(conditions));
                    action = c.action;
                    credit.rule = FusionRule::Rule1;
                    credit.winner = c.winner;
                } else {
                    action = fuse_rule2(G, std::span<const double>(conditions)).action;
                    credit.rule = FusionRule::Rule2;
                    credit.shares = voters_for(action);
                }
                decided = true;
            } catch (const EmptyActiveZone&) {
                decided = false;
            }
        }
        if (decided && cfg.wall_guard && action == Action::Forward) {
            const Cell ahead{state.position.x + dx(state.direction), state.position.y + dy(state.direction)};
            if (!map.in_bounds(ahead) || map.at(ahead) == kOccupied) decided = false;
        }
        if (!decided) {
            refresh_fields(false);
            action = naive_action(*optimistic, state);
            credit = Credit{FusionRule::Rule2, 0, {}};
            if (learn && evaluated && cfg.credit_overrides && cfg.fusion == FusionRule::Rule2)
                credit.shares = voters_for(action);
        }

        const RobotState next = step(domain, state, action);
        if (learn && !credit.empty()) {
            switch (cfg.potential) {
                case Potential::Supervised: {
                    const double dc = delta_c_supervised(truth, state, next, s0);
                    const double credited = apply_reward(*learner, credit, dc, cfg.beta);
                    if (trace) res.credits.push_back({t, dc, credited});
                    break;
                }
                case Potential::Classical: {
                    const PotentialDelta dc = delta_c_estimated(*optimistic, state, next, s0);
                    res.inconsistent = res.inconsistent || dc.inconsistent;
                    const double credited = apply_reward(*learner, credit, dc.value, cfg.beta);
                    if (trace) res.credits.push_back({t, dc.value, credited});
                    break;
                }
                case Potential::Retrospective:
                    buffer.schedule({t, state, next, s0, std::move(credit)});
                    if (cfg.hold <= 0) credit_all(buffer.flush(*optimistic, t, 0, false));
                    break;
            }
        }
        res.commands.push_back(action);
        state = next;
        if (trace) res.poses.push_back(state);
        if (learn) {
            learner->tick();
            if (learner->config().refresh_each_step) refresh_active(*learner, learner->clock());
        }
    }
    if (learn && cfg.potential == Potential::Retrospective && buffer.size() > 0) {
        refresh_fields(false);
        credit_all(buffer.flush(*optimistic, 0, 0, true));
    }
    const double n = res.reached ? static_cast<double>(res.commands.size())
                                 : static_cast<double>(res.step_limit);
    res.cost = n / static_cast<double>(res.optimal);
    return res;
}

}  // namespace

EpisodeResult run_episode(const GridDomain& domain, GeneSet& G, const PredicateRegistry& reg,
                          const LearningConfig& cfg, EpisodeOptions opts) {
    return episode(domain, G, opts.learn ? &G : nullptr, &reg, cfg, opts.trace);
}

EpisodeResult run_episode(const GridDomain& domain, const GeneSet& G, const PredicateRegistry& reg,
                          const LearningConfig& cfg, bool trace) {
    return episode(domain, G, nullptr, &reg, cfg, trace);
}

EpisodeResult run_naive_episode(const GridDomain& domain, const VisionConfig& vision,
                                std::int64_t limit, bool trace) {
    LearningConfig cfg;
    cfg.vision = vision;
    cfg.max_commands = limit;
    static const GeneSet empty;
    return episode(domain, empty, nullptr, nullptr, cfg, trace);
}

CostReport make_report(const DomainEnsemble& ensemble,
                       std::vector<std::pair<std::size_t, double>> costs, std::size_t failures) {
    CostReport r;
    r.per_domain = std::move(costs);
    r.failures = failures;
    double wsum = 0.0, mean = 0.0;
    for (const auto& [i, c] : r.per_domain) {
        mean += ensemble.weights[i] * c;
        wsum += ensemble.weights[i];
    }
    r.mean = wsum > 0 ? mean / wsum : 0.0;
    double var = 0.0;
    for (const auto& [i, c] : r.per_domain) var += ensemble.weights[i] * (c - r.mean) * (c - r.mean);
    r.stddev = wsum > 0 ? std::sqrt(var / wsum) : 0.0;
    return r;
}

CostReport run_generation(const DomainEnsemble& ensemble, GeneSet& G, const PredicateRegistry& reg,
                          LearningConfig& cfg, Rng& rng) {
    ensemble.validate();
    std::vector<std::size_t> order(ensemble.domains.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

    std::vector<std::pair<std::size_t, double>> costs;
    std::size_t failures = 0;
    for (std::size_t idx : order) {
        const EpisodeResult r = run_episode(ensemble.domains[idx], G, reg, cfg, {.learn = true});
        costs.emplace_back(idx, r.cost);
        failures += !r.reached;
        select(G, G.clock(), rng);
    }
    if (cfg.potential == Potential::Retrospective) cfg.hold += cfg.hold_increment;
    return make_report(ensemble, std::move(costs), failures);
}

namespace {

CostReport evaluate_impl(const DomainEnsemble& ensemble, const GeneSet& G,
                         const PredicateRegistry* reg, const LearningConfig& cfg, bool parallel) {
    ensemble.validate();
    const auto count = static_cast<std::ptrdiff_t>(ensemble.domains.size());
    std::vector<double> cost(ensemble.domains.size());
    std::vector<char> reached(ensemble.domains.size());
    auto run = [&](std::ptrdiff_t k) {
        const auto i = static_cast<std::size_t>(k);
        const EpisodeResult r = episode(ensemble.domains[i], G, nullptr, reg, cfg, false);
        cost[i] = r.cost;
        reached[i] = r.reached;
    };
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t k = 0; k < count; ++k) run(k);
    } else {
        for (std::ptrdiff_t k = 0; k < count; ++k) run(k);
    }
    std::vector<std::pair<std::size_t, double>> costs;
    std::size_t failures = 0;
    for (std::size_t i = 0; i < cost.size(); ++i) {
        costs.emplace_back(i, cost[i]);
        failures += !reached[i];
    }
    return make_report(ensemble, std::move(costs), failures);
}

}  // namespace

CostReport evaluate_policy(const DomainEnsemble& ensemble, const GeneSet& G,
                           const PredicateRegistry& reg, const LearningConfig& cfg) {
    return evaluate_impl(ensemble, G, &reg, cfg, true);
}

CostReport evaluate_policy_serial(const DomainEnsemble& ensemble, const GeneSet& G,
                                  const PredicateRegistry& reg, const LearningConfig& cfg) {
    return evaluate_impl(ensemble, G, &reg, cfg, false);
}

CostReport evaluate_naive(const DomainEnsemble& ensemble, const LearningConfig& cfg) {
    static const GeneSet empty;
    return evaluate_impl(ensemble, empty, nullptr, cfg, true);
}

}  // namespace lcsnav
