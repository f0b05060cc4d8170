#include <doctest.h>

#include <cmath>
#include <cstring>

#include "lcsnav/learning.hpp"
#include "oracles.hpp"

using namespace lcsnav;

namespace {

double total_weight(const GeneSet& G) {
    double s = 0;
    for (const Gene& g : G.genes()) s += g.weight;
    return s;
}

bool same_genes(const GeneSet& a, const GeneSet& b) {
    if (a.genes().size() != b.genes().size()) return false;
    for (std::size_t i = 0; i < a.genes().size(); ++i) {
        const Gene& x = a.genes()[i];
        const Gene& y = b.genes()[i];
        if (x.alpha != y.alpha || x.action != y.action || x.birth_step != y.birth_step) return false;
        if (std::memcmp(&x.weight, &y.weight, sizeof(double)) != 0) return false;
    }
    return true;
}

GridDomain open_map(int w, int h, Cell start, Cell goal) {
    std::vector<std::int8_t> cells(static_cast<std::size_t>(w) * h, kFree);
    return GridDomain(w, h, cells, start, goal);
}

GeneSet seeds_only(const PredicateRegistry& reg, double weight) {
    PopulationConfig cfg;
    cfg.capacity = 3;
    Rng rng(0);
    cfg.seed_weight = weight;
    return initial_population(reg, cfg, rng);
}

}  // namespace

TEST_CASE("supervised potential differences") {
    const GridDomain d = load_map_string("12 1\nS..........G\n");
    const RobotState s0{{0, 0}, Direction::East};
    // rho(s0) = 11 here, so pick states with rho 10 and 9 along the row.
    CHECK(delta_c_supervised(d, {{1, 0}, Direction::East}, {{2, 0}, Direction::East}, {{1, 0}, Direction::East}) ==
          doctest::Approx(0.1).epsilon(1e-15));
    CHECK(delta_c_supervised(d, s0, {{1, 0}, Direction::East}, s0) == doctest::Approx(1.0 / 11));
    const GridDomain open = open_map(5, 5, {0, 0}, {4, 4});
    CHECK(delta_c_supervised(open, {{2, 2}, Direction::East}, {{2, 2}, Direction::South},
                             {{0, 0}, Direction::South}) == 0.0);
    CHECK_THROWS(delta_c_supervised(d, s0, s0, {{11, 0}, Direction::East}));
}

TEST_CASE("estimated potential equals supervised on a revealed map") {
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const GridDomain d = oracle::random_solvable(rng, 7, 7, 0.25);
        const ObservationMap full = ObservationMap::revealed(d);
        const RobotState s0 = d.start();
        if (d.start_cell() == d.goal()) continue;
        RobotState s = s0;
        for (int k = 0; k < 10; ++k) {
            const RobotState n = step(d, s, kActions[rng.below(3)]);
            const PotentialDelta e = delta_c_estimated(full, d.goal(), s, n, s0);
            CHECK_FALSE(e.inconsistent);
            CHECK(e.value == delta_c_supervised(d, s, n, s0));
            s = n;
        }
    }
    ObservationMap sealed(3, 1);
    sealed.set({1, 0}, kOccupied);
    const RobotState a{{0, 0}, Direction::East};
    const PotentialDelta bad = delta_c_estimated(sealed, {2, 0}, a, a, a);
    CHECK(bad.inconsistent);
    CHECK(bad.value == 0.0);
}

TEST_CASE("a hidden dead end misleads the estimate until it is seen") {
    // The top row looks like a shortcut while its end is unknown.
    const GridDomain d = load_map_string("7 3\nS.....#\n.######\n......G\n");
    const RobotState s0{{0, 0}, Direction::East};
    const RobotState s{{2, 0}, Direction::East};
    const RobotState n{{3, 0}, Direction::East};

    ObservationMap early(7, 3);
    for (Cell c : {Cell{0, 0}, Cell{1, 0}, Cell{2, 0}, Cell{3, 0}, Cell{0, 1}}) early.set(c, kFree);
    for (Cell c : {Cell{1, 1}, Cell{2, 1}, Cell{3, 1}}) early.set(c, kOccupied);
    const PotentialDelta hopeful = delta_c_estimated(early, d.goal(), s, n, s0);
    const auto rho = [&](const ObservationMap& m, RobotState x) {
        return static_cast<double>(*oracle::shortest_commands(m, x, d.goal(), true));
    };
    CHECK(hopeful.value == doctest::Approx((rho(early, s) - rho(early, n)) / rho(early, s0)));
    CHECK(hopeful.value > 0.0);
    CHECK(delta_c_supervised(d, s, n, s0) < 0.0);

    RetrospectiveBuffer buffer;
    buffer.schedule({4, s, n, s0, {}});
    const ObservationMap full = ObservationMap::revealed(d);
    const DistanceField later(GridView(full, UnknownMode::AsFree), d.goal());
    CHECK(buffer.flush(later, 7, 5, false).empty());
    const auto out = buffer.flush(later, 9, 5, false);
    REQUIRE(out.size() == 1);
    CHECK(out[0].delta.value == delta_c_supervised(d, s, n, s0));
    CHECK(out[0].step == 4);
    CHECK(buffer.size() == 0);
}

TEST_CASE("retrospective buffer flushes in order, once") {
    const GridDomain d = open_map(6, 6, {0, 0}, {5, 5});
    const DistanceField f(GridView(ObservationMap::revealed(d), UnknownMode::AsFree), d.goal());
    RetrospectiveBuffer b;
    const RobotState s0 = d.start();
    for (std::int64_t t = 0; t < 6; ++t) b.schedule({t, s0, s0, s0, {}});
    auto out = b.flush(f, 3, 2, false);
    REQUIRE(out.size() == 2);
    CHECK(out[0].step == 0);
    CHECK(out[1].step == 1);
    CHECK(b.flush(f, 3, 2, false).empty());
    out = b.flush(f, 0, 100, true);
    REQUIRE(out.size() == 4);
    CHECK(out.back().step == 5);
    CHECK(b.size() == 0);
}

TEST_CASE("reward rules") {
    PopulationConfig cfg;
    GeneSet G(1, cfg);
    for (int i = 0; i < 3; ++i) {
        Gene g;
        g.alpha = {1.0};
        g.weight = 1.0;
        G.add(g);
    }
    CHECK(apply_reward_rule1(G, 1, 0.1, 2.0) == doctest::Approx(0.2));
    CHECK(G.genes()[1].weight == doctest::Approx(1.2));
    CHECK(G.genes()[0].weight == 1.0);
    CHECK(apply_reward_rule1(G, 0, 0.0, 2.0) == 0.0);
    CHECK(G.genes()[0].weight == 1.0);

    CHECK(apply_reward_rule2(G, {{0, 0.5}, {2, 0.5}}, 0.3, 1.0) == doctest::Approx(0.3));
    CHECK(G.genes()[0].weight == doctest::Approx(1.15));
    CHECK(G.genes()[2].weight == doctest::Approx(1.15));
    CHECK(G.genes()[1].weight == doctest::Approx(1.2));

    CHECK(apply_reward_rule2(G, {{1, 0.01}}, 0.5, 1.0) == doctest::Approx(0.5));
    CHECK(G.genes()[1].weight == doctest::Approx(1.7));
    CHECK(apply_reward_rule2(G, {}, 0.5, 1.0) == 0.0);

    // A large penalty pushes a gene under the cull level; the next selection removes it.
    apply_reward_rule1(G, 2, -2.0, 1.0);
    Rng rng(1);
    G.config().capacity = 2;
    select(G, 0, rng);
    CHECK(G.genes().size() == 2);
    CHECK(G.genes()[1].weight == doctest::Approx(1.7));
}

TEST_CASE("credit telescopes over goal-reaching episodes") {
    const PredicateRegistry reg = build_registry(RegistryConfig{});
    Rng rng(41);
    int episodes = 0;
    for (int attempt = 0; attempt < 400 && episodes < 100; ++attempt) {
        const int w = 5 + static_cast<int>(rng.below(12)), h = 5 + static_cast<int>(rng.below(12));
        const GridDomain d = oracle::random_solvable(rng, w, h, 0.2);
        if (d.start_cell() == d.goal()) continue;
        PopulationConfig pop;
        pop.capacity = 40;
        pop.min_lifetime = 0;
        pop.seed_weight = 5.0;
        pop.cull_threshold = -1e9;  // nobody falls silent, so every step is credited
        GeneSet G = initial_population(reg, pop, rng);
        LearningConfig cfg;
        cfg.beta = 0.5 + rng.uniform() * 3;
        cfg.fusion = attempt % 2 ? FusionRule::Rule1 : FusionRule::Rule2;
        cfg.wall_guard = false;
        cfg.loop_escape = false;
        cfg.vision = {1.0 + static_cast<double>(rng.below(4))};
        const double before = total_weight(G);
        const EpisodeResult r = run_episode(d, G, reg, cfg, {.learn = true, .trace = true});
        if (!r.reached) continue;
        ++episodes;
        REQUIRE(r.credits.size() == r.commands.size());
        double sum = 0;
        for (const CreditRecord& c : r.credits) {
            sum += c.delta_c;
            CHECK(std::abs(c.credited - cfg.beta * c.delta_c) <= 1e-9);
        }
        CHECK(std::abs(sum - 1.0) <= 1e-9);
        CHECK(std::abs(total_weight(G) - before - cfg.beta) <= 1e-9);
    }
    CHECK(episodes == 100);
}

TEST_CASE("retrospective with no hold reproduces classical") {
    std::vector<GridDomain> maps;
    for (std::uint64_t s = 0; s < 3; ++s) maps.push_back(generate_office_map(s, 24, 24));
    const DomainEnsemble ensemble = DomainEnsemble::uniform(maps);
    const PredicateRegistry reg = build_registry(RegistryConfig{});
    PopulationConfig pop;
    pop.capacity = 60;
    pop.min_lifetime = 50;

    auto train = [&](Potential p, double radius) {
        Rng rng(77);
        GeneSet G = initial_population(reg, pop, rng);
        LearningConfig cfg;
        cfg.beta = 5.0;
        cfg.potential = p;
        cfg.hold = 0;
        cfg.hold_increment = 0;
        cfg.vision = {radius};
        std::vector<double> means;
        for (int g = 0; g < 3; ++g) means.push_back(run_generation(ensemble, G, reg, cfg, rng).mean);
        return std::pair{std::move(G), means};
    };
    const auto classical = train(Potential::Classical, 5.0);
    const auto retro = train(Potential::Retrospective, 5.0);
    CHECK(same_genes(classical.first, retro.first));
    CHECK(classical.second == retro.second);

    // Vision covering the whole grid reveals it at the first step.
    const auto sup = train(Potential::Supervised, 100.0);
    CHECK(same_genes(train(Potential::Classical, 100.0).first, sup.first));
    CHECK(same_genes(train(Potential::Retrospective, 100.0).first, sup.first));
    CHECK_FALSE(same_genes(classical.first, sup.first));
}

TEST_CASE("the growing hold changes the retrospective run") {
    const DomainEnsemble ensemble = DomainEnsemble::uniform({generate_office_map(4, 24, 24)});
    const PredicateRegistry reg = build_registry(RegistryConfig{});
    PopulationConfig pop;
    pop.capacity = 40;
    Rng rng(5);
    GeneSet G = initial_population(reg, pop, rng);
    LearningConfig cfg;
    cfg.potential = Potential::Retrospective;
    run_generation(ensemble, G, reg, cfg, rng);
    run_generation(ensemble, G, reg, cfg, rng);
    CHECK(cfg.hold == 4);
    cfg.potential = Potential::Classical;
    run_generation(ensemble, G, reg, cfg, rng);
    CHECK(cfg.hold == 4);
}

TEST_CASE("naive seeds alone behave as the naive planner") {
    const PredicateRegistry reg = build_registry(RegistryConfig{});
    for (FusionRule rule : {FusionRule::Rule1, FusionRule::Rule2}) {
        const GeneSet G = seeds_only(reg, 1.0);
        LearningConfig cfg;
        cfg.fusion = rule;
        for (std::uint64_t s = 0; s < 8; ++s) {
            const GridDomain d = generate_office_map(s, 40, 40);
            const EpisodeResult r = run_episode(d, G, reg, cfg);
            const oracle::Replay replay = oracle::naive_replay(d, cfg.vision.radius, step_limit(d, cfg));
            CHECK(r.reached);
            CHECK(replay.reached);
            CHECK(r.commands == replay.commands);
            CHECK(r.cost == doctest::Approx(static_cast<double>(replay.commands.size()) /
                                            *oracle::shortest_commands(d, d.start()))
                                .epsilon(1e-15));
            CHECK(r.commands == run_naive_episode(d, cfg.vision, step_limit(d, cfg)).commands);
        }
    }
}

TEST_CASE("straight open run costs exactly one") {
    const PredicateRegistry reg = build_registry(RegistryConfig{});
    const GridDomain d = open_map(10, 10, {4, 0}, {4, 9});
    const EpisodeResult r = run_episode(d, seeds_only(reg, 1.0), reg, LearningConfig{});
    CHECK(r.reached);
    CHECK(r.cost == 1.0);
    CHECK(r.optimal == 9);

    const DomainEnsemble one = DomainEnsemble::uniform({load_map_string("4 1\nS..G\n")});
    // Start heading is South, so two turns come first in a one-row corridor.
    CHECK(evaluate_policy(one, seeds_only(reg, 1.0), reg, LearningConfig{}).mean == 1.0);
}

TEST_CASE("episode bookkeeping") {
    const PredicateRegistry reg = build_registry(RegistryConfig{});
    const GridDomain d = generate_office_map(2, 30, 30);
    LearningConfig cfg;
    cfg.max_commands = 5;
    const EpisodeResult r = run_episode(d, seeds_only(reg, 1.0), reg, cfg, true);
    CHECK_FALSE(r.reached);
    CHECK(r.commands.size() == 5);
    CHECK(r.poses.size() == 6);
    CHECK(r.cost == 5.0 / r.optimal);
    CHECK(step_limit(d, 4.0) == 3600);
    CHECK(step_limit(load_map_string("3 1\nS.G\n"), 0.01) == 1);

    // The failure cap exceeds any reached cost on the same domain.
    LearningConfig normal;
    const EpisodeResult ok = run_episode(d, seeds_only(reg, 1.0), reg, normal);
    CHECK(ok.reached);
    CHECK(ok.cost >= 1.0);
    CHECK(static_cast<double>(step_limit(d, normal)) / ok.optimal > ok.cost);
}

TEST_CASE("wall guard and loop escape") {
    const PredicateRegistry reg = build_registry(RegistryConfig{});
    // A single gene that always wants to go Forward and outweighs the seeds.
    PopulationConfig pop;
    pop.capacity = 4;
    pop.min_lifetime = 0;
    pop.seed_weight = 0.1;
    Rng rng(0);
    GeneSet G = initial_population(reg, pop, rng);
    Gene push;
    push.alpha.assign(reg.size(), 0.0);
    const auto names = reg.names();
    // The robot's own cell always reads free (-1), so this condition is always 1.
    push.alpha[static_cast<std::size_t>(std::find(names.begin(), names.end(), "v[0,0]") - names.begin())] = -1.0;
    push.action = Action::Forward;
    push.weight = 100.0;
    push.active = true;
    G.genes().back() = push;

    const GridDomain d = load_map_string("3 3\nS..\n...\n..G\n");
    LearningConfig cfg;
    cfg.fusion = FusionRule::Rule1;
    cfg.wall_guard = false;
    cfg.loop_escape = false;
    const EpisodeResult stuck = run_episode(d, G, reg, cfg);
    CHECK_FALSE(stuck.reached);
    CHECK(stuck.looped);

    cfg.wall_guard = true;
    const EpisodeResult guarded = run_episode(d, G, reg, cfg);
    CHECK(guarded.reached);

    cfg.wall_guard = false;
    cfg.loop_escape = true;
    const EpisodeResult escaped = run_episode(d, G, reg, cfg);
    CHECK(escaped.reached);
    CHECK(escaped.looped);
}

TEST_CASE("generations are deterministic") {
    std::vector<GridDomain> maps;
    for (std::uint64_t s = 10; s < 14; ++s) maps.push_back(generate_office_map(s, 24, 24));
    const DomainEnsemble ensemble = DomainEnsemble::uniform(maps);
    const PredicateRegistry reg = build_registry(RegistryConfig{});
    auto run = [&] {
        Rng rng(8);
        PopulationConfig pop;
        pop.capacity = 50;
        GeneSet G = initial_population(reg, pop, rng);
        LearningConfig cfg;
        cfg.beta = 10;
        std::vector<CostReport> reports;
        for (int g = 0; g < 2; ++g) reports.push_back(run_generation(ensemble, G, reg, cfg, rng));
        return std::pair{std::move(G), reports};
    };
    const auto a = run();
    const auto b = run();
    CHECK(same_genes(a.first, b.first));
    for (std::size_t i = 0; i < a.second.size(); ++i) {
        CHECK(a.second[i].per_domain == b.second[i].per_domain);
        CHECK(a.second[i].mean == b.second[i].mean);
    }
    REQUIRE(a.second[0].per_domain.size() == 4);

    const DomainEnsemble single = DomainEnsemble::uniform({maps[0]});
    Rng rng(1);
    PopulationConfig pop;
    pop.capacity = 20;
    GeneSet G = initial_population(reg, pop, rng);
    LearningConfig cfg;
    const CostReport r = run_generation(single, G, reg, cfg, rng);
    REQUIRE(r.per_domain.size() == 1);
    CHECK(r.mean == r.per_domain[0].second);
}

TEST_CASE("reports average with the ensemble weights") {
    std::vector<GridDomain> maps{open_map(4, 4, {0, 0}, {3, 3}), open_map(5, 5, {0, 0}, {4, 4}),
                                 open_map(6, 3, {0, 0}, {5, 2})};
    DomainEnsemble e = DomainEnsemble::uniform(maps);
    e.weights = {0.5, 0.25, 0.25};
    const CostReport r = make_report(e, {{2, 3.0}, {0, 1.0}, {1, 2.0}}, 1);
    CHECK(r.mean == doctest::Approx(0.5 * 1.0 + 0.25 * 2.0 + 0.25 * 3.0));
    CHECK(r.failures == 1);

    const PredicateRegistry reg = build_registry(RegistryConfig{});
    const CostReport ev = evaluate_policy(e, seeds_only(reg, 1.0), reg, LearningConfig{});
    double expected = 0;
    for (const auto& [i, c] : ev.per_domain) expected += e.weights[i] * c;
    CHECK(ev.mean == doctest::Approx(expected).epsilon(1e-14));
    CHECK(evaluate_naive(e, LearningConfig{}).mean == doctest::Approx(ev.mean).epsilon(1e-14));
}

TEST_CASE("training with default settings rarely hits the step cap") {
    std::vector<GridDomain> maps;
    for (std::uint64_t s = 30; s < 36; ++s) maps.push_back(generate_office_map(s, 40, 40));
    const DomainEnsemble ensemble = DomainEnsemble::uniform(maps);
    const PredicateRegistry reg = build_registry(RegistryConfig{});
    for (Potential p : {Potential::Supervised, Potential::Classical, Potential::Retrospective}) {
        CAPTURE(potential_name(p));
        Rng rng(5);
        GeneSet G = initial_population(reg, PopulationConfig{}, rng);
        LearningConfig cfg;
        cfg.potential = p;
        std::size_t capped = 0, episodes = 0;
        for (int g = 0; g < 8; ++g) {
            const CostReport r = run_generation(ensemble, G, reg, cfg, rng);
            capped += r.failures;
            episodes += r.per_domain.size();
        }
        CHECK(static_cast<double>(capped) < 0.05 * static_cast<double>(episodes));
    }
}
