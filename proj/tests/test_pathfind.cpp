#include <doctest.h>

#include "lcsnav/pathfind.hpp"
#include "oracles.hpp"

using namespace lcsnav;

namespace {

ObservationMap random_view(Rng& rng, const GridDomain& d, int patches) {
    ObservationMap map(d.width(), d.height());
    for (int i = 0; i < patches; ++i) {
        const Cell c{static_cast<int>(rng.below(d.width())), static_cast<int>(rng.below(d.height()))};
        map = accumulate(map, visible_patch(d, c, {1.0 + static_cast<double>(rng.below(3))}));
    }
    return map;
}

RobotState random_state(Rng& rng, const GridDomain& d) {
    for (;;) {
        const Cell c{static_cast<int>(rng.below(d.width())), static_cast<int>(rng.below(d.height()))};
        if (d.free(c)) return {c, kDirections[rng.below(4)]};
    }
}

std::uint32_t as_length(const std::optional<int>& v) {
    return v ? static_cast<std::uint32_t>(*v) : kUnreachable;
}

}  // namespace

TEST_CASE("corridor distances") {
    const GridDomain d = load_map_string("3 1\nS.G\n");
    const ObservationMap full = ObservationMap::revealed(d);
    const GridView view(full, UnknownMode::AsFree);

    const PathResult east = shortest_path(view, {{0, 0}, Direction::East}, d.goal());
    CHECK(east.length == 2);
    CHECK(east.first_action == Action::Forward);

    const PathResult west = shortest_path(view, {{0, 0}, Direction::West}, d.goal());
    CHECK(west.length == 4);
    CHECK(west.first_action == Action::TurnLeft);

    const PathResult there = shortest_path(view, {{2, 0}, Direction::North}, d.goal());
    CHECK(there.length == 0);
    CHECK_FALSE(there.first_action.has_value());
}

TEST_CASE("unreachable goal is reported, not thrown") {
    ObservationMap map(3, 1);
    map.set({1, 0}, kOccupied);
    const PathResult r = shortest_path(GridView(map, UnknownMode::AsFree), {{0, 0}, Direction::East}, {2, 0});
    CHECK_FALSE(r.reachable());
    CHECK_FALSE(r.first_action.has_value());
}

TEST_CASE("goal cell is traversable even when unknown or marked") {
    ObservationMap map(3, 1);
    map.set({0, 0}, kFree);
    map.set({1, 0}, kFree);
    CHECK(shortest_path(GridView(map, UnknownMode::AsOccupied), {{0, 0}, Direction::East}, {2, 0}).length == 2);
}

TEST_CASE("lengths and first actions match the exhaustive search") {
    Rng rng(7);
    for (int trial = 0; trial < 150; ++trial) {
        const int w = 2 + static_cast<int>(rng.below(7)), h = 2 + static_cast<int>(rng.below(7));
        const GridDomain d = oracle::random_solvable(rng, w, h, 0.3);
        ObservationMap view = trial % 2 ? ObservationMap::revealed(d) : random_view(rng, d, 3);
        for (int k = 0; k < 6; ++k) {
            const RobotState s = random_state(rng, d);
            view.set(s.position, kFree);  // the robot always knows its own cell
            for (UnknownMode mode : {UnknownMode::AsFree, UnknownMode::AsOccupied}) {
                const bool free = mode == UnknownMode::AsFree;
                const PathResult r = shortest_path(GridView(view, mode), s, d.goal());
                REQUIRE(r.length == as_length(oracle::shortest_commands(view, s, d.goal(), free)));
                CHECK(r.first_action == oracle::first_action(view, s, d.goal(), free));
            }
        }
    }
}

TEST_CASE("more obstacles never shorten a path") {
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const GridDomain d = oracle::random_solvable(rng, 7, 6, 0.2);
        ObservationMap map = random_view(rng, d, 2);
        const RobotState s = random_state(rng, d);
        const auto before = shortest_path(GridView(map, UnknownMode::AsFree), s, d.goal()).length;
        CHECK(before <= shortest_path(GridView(map, UnknownMode::AsOccupied), s, d.goal()).length);
        for (int i = 0; i < 5; ++i) {
            const Cell c{static_cast<int>(rng.below(7)), static_cast<int>(rng.below(6))};
            if (c == s.position || c == d.goal()) continue;
            map.set(c, kOccupied);
        }
        CHECK(shortest_path(GridView(map, UnknownMode::AsFree), s, d.goal()).length >= before);
    }
}

TEST_CASE("true distances satisfy the one-step recurrence") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const GridDomain d = oracle::random_solvable(rng, 8, 8, 0.25);
        const DistanceField f = true_distances(d);
        for (int k = 0; k < 20; ++k) {
            const RobotState s = random_state(rng, d);
            if (f.distance(s) == kUnreachable) continue;
            const auto here = f.distance(s);
            std::uint32_t best = kUnreachable;
            for (Action a : kActions) {
                const auto n = f.distance(step(d, s, a));
                REQUIRE(n != kUnreachable);
                CHECK(here <= n + 1);
                if (a != Action::Forward) CHECK(n <= here + 1);
                best = std::min(best, n);
            }
            if (here > 0) CHECK(best + 1 == here);
        }
    }
}

TEST_CASE("naive policy") {
    const GridDomain corridor = load_map_string("3 1\nS.G\n");
    ObservationMap map = ObservationMap::revealed(corridor);
    CHECK(naive_policy({{{1, 0}, Direction::East}, &map, corridor.goal()}) == Action::Forward);

    ObservationMap unknown(1, 8);
    CHECK(naive_policy({{{0, 0}, Direction::South}, &unknown, {0, 5}}) == Action::Forward);

    // A wall revealed across the straight line forces a detour.
    const GridDomain d = load_map_string("5 5\n..S..\n.###.\n.....\n.....\n..G..\n");
    ObservationMap seen = visible_patch(d, d.start_cell(), {2.0});
    const RobotState s = d.start();
    const Action a = naive_policy({s, &seen, d.goal()});
    CHECK(a != Action::Forward);
    CHECK(oracle::first_action(seen, s, d.goal(), true) == a);

    ObservationMap sealed(3, 1);
    sealed.set({1, 0}, kOccupied);
    CHECK_THROWS_AS(naive_policy({{{0, 0}, Direction::East}, &sealed, {2, 0}}), UnsolvableError);
}

TEST_CASE("distance bounds") {
    const GridDomain d = load_map_string("4 4\nS...\n.##.\n....\n...G\n");
    const ObservationMap full = ObservationMap::revealed(d);
    const DistanceBounds known = distance_bounds({d.start(), &full, d.goal()}, d.start());
    const auto truth = true_distances(d).distance(d.start());
    CHECK(known.lower == truth);
    CHECK(known.upper == truth);

    ObservationMap blank(1, 6);
    const RobotState s{{0, 0}, Direction::South};
    const DistanceBounds b = distance_bounds({s, &blank, {0, 5}}, s);
    CHECK(b.lower == 5);
    CHECK(b.upper == kUnreachable);
    const RobotState west{{0, 0}, Direction::North};
    CHECK(distance_bounds({west, &blank, {0, 5}}, west).lower == 7);
    const DistanceBounds adjacent = distance_bounds({s, &blank, {0, 1}}, s);
    CHECK(adjacent.upper == 1);
}

TEST_CASE("distance bounds sandwich the hidden distance") {
    Rng rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        const GridDomain d = oracle::random_solvable(rng, 10, 10, 0.25);
        const ObservationMap view = random_view(rng, d, 1 + static_cast<int>(rng.below(6)));
        const RobotState s = random_state(rng, d);
        const auto truth = oracle::shortest_commands(d, s);
        const DistanceBounds b = distance_bounds({s, &view, d.goal()}, s);
        const auto t = as_length(truth);
        CHECK(b.lower <= t);
        CHECK(t <= b.upper);
    }
}

TEST_CASE("naive follower reaches the goal") {
    Rng rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        const int w = 3 + static_cast<int>(rng.below(10)), h = 3 + static_cast<int>(rng.below(10));
        const GridDomain d = oracle::random_solvable(rng, w, h, 0.3);
        const oracle::Replay r = oracle::naive_replay(d, 1.0 + static_cast<double>(rng.below(4)), 10L * w * h);
        CHECK(r.reached);
    }
}
