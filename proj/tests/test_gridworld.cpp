#include <doctest.h>

#include <set>

#include "lcsnav/gridworld.hpp"
#include "oracles.hpp"

using namespace lcsnav;

namespace {

GridDomain open_map(int w, int h) {
    std::vector<std::int8_t> cells(static_cast<std::size_t>(w) * h, kFree);
    return GridDomain(w, h, cells, {0, 0}, {w - 1, h - 1});
}

MapError::Kind load_error(const std::string& text) {
    try {
        load_map_string(text);
    } catch (const MapError& e) {
        return e.kind();
    }
    FAIL("map loaded without error: " << text);
    return MapError::Kind::Header;
}

}  // namespace

TEST_CASE("heading helpers") {
    CHECK(turn_left(Direction::East) == Direction::North);
    CHECK(turn_right(Direction::East) == Direction::South);
    CHECK(reverse(Direction::West) == Direction::East);
    for (Direction d : kDirections) {
        CHECK(turn_left(turn_right(d)) == d);
        CHECK(direction_from_step(dx(d), dy(d)) == d);
    }
    CHECK_FALSE(direction_from_step(1, 1).has_value());
    CHECK(parse_action("TurnLeft") == Action::TurnLeft);
    CHECK_FALSE(parse_action("Backward").has_value());
    CHECK(Action::Forward < Action::TurnLeft);
    CHECK(Action::TurnLeft < Action::TurnRight);
}

TEST_CASE("load a one-row corridor") {
    const GridDomain d = load_map_string("3 1\nS.G\n");
    CHECK(d.width() == 3);
    CHECK(d.height() == 1);
    CHECK(d.start_cell() == Cell{0, 0});
    CHECK(d.goal() == Cell{2, 0});
    CHECK(d.start().direction == Direction::South);
}

TEST_CASE("map loader errors") {
    CHECK(load_error("3 1\nS#G\n") == MapError::Kind::Unsolvable);
    CHECK(load_error("3 1\nS?G\n") == MapError::Kind::BadCharacter);
    CHECK(load_error("3 1\nS.G.\n") == MapError::Kind::RowLength);
    CHECK(load_error("3 2\nS.G\n") == MapError::Kind::RowCount);
    CHECK(load_error("3 1\nS.G\n...\n") == MapError::Kind::RowCount);
    CHECK(load_error("3 1\n..G\n") == MapError::Kind::MissingStart);
    CHECK(load_error("3 1\nS..\n") == MapError::Kind::MissingGoal);
    CHECK(load_error("4 1\nSSG.\n") == MapError::Kind::DuplicateStart);
    CHECK(load_error("4 1\nSGG.\n") == MapError::Kind::DuplicateGoal);
    CHECK(load_error("x 1\nS.G\n") == MapError::Kind::Header);
    CHECK(load_error("") == MapError::Kind::Header);

    try {
        load_map_string("4 2\nS..G\n.?..\n");
        FAIL("expected error");
    } catch (const MapError& e) {
        CHECK(e.line() == 3);
        CHECK(e.column() == 2);
    }
}

TEST_CASE("save and load round trip") {
    for (const std::string text : {"2 1\nSG\n", "3 1\nS.G\n", "4 3\nS..#\n.#..\n...G\n"}) {
        const GridDomain d = load_map_string(text);
        CHECK(save_map(d) == text);
        CHECK(save_map(d) == save_map(d));
    }
    const GridDomain d = load_map_string("3 2\nS#G\n...\n");
    CHECK(d.at({1, 0}) == kOccupied);
    CHECK(save_map(d).substr(4, 3) == "S#G");
}

TEST_CASE("domain constructor rejects bad inputs") {
    std::vector<std::int8_t> cells(4, kFree);
    CHECK_THROWS(GridDomain(2, 2, cells, {0, 0}, {0, 0}));
    CHECK_THROWS(GridDomain(2, 2, cells, {0, 0}, {2, 0}));
    CHECK_THROWS(GridDomain(3, 2, cells, {0, 0}, {1, 0}));
    cells[1] = kOccupied;
    CHECK_THROWS(GridDomain(2, 2, cells, {0, 0}, {1, 0}));
    cells[1] = 0;
    CHECK_THROWS(GridDomain(2, 2, cells, {0, 0}, {1, 1}));
}

TEST_CASE("vision disc boundary") {
    const GridDomain d = open_map(11, 11);
    const ObservationMap p = visible_patch(d, {5, 5}, {2.0});
    CHECK(p.at({5, 7}) == kFree);
    CHECK(p.at({7, 7}) == kUnknown);
    CHECK(p.at({7, 5}) == kFree);
    CHECK(p.at({6, 6}) == kFree);
    CHECK(p.at({5, 8}) == kUnknown);
}

TEST_CASE("vision reports occupied cells") {
    std::vector<std::int8_t> cells(100, kFree);
    cells[6 * 10 + 5] = kOccupied;
    const GridDomain d(10, 10, cells, {0, 0}, {9, 9});
    const ObservationMap p = visible_patch(d, {5, 5}, {2.0});
    CHECK(p.at({5, 6}) == kOccupied);
}

TEST_CASE("vision disc size matches enumeration") {
    const GridDomain d = open_map(13, 9);
    for (double r : {1.0, 2.0, 2.5, 5.0})
        for (Cell c : {Cell{0, 0}, Cell{6, 4}, Cell{12, 8}, Cell{3, 7}})
            CHECK(visible_patch(d, c, {r}).known_count() ==
                  static_cast<std::size_t>(oracle::disc_count(13, 9, c, r)));
}

TEST_CASE("accumulate keeps knowledge") {
    const GridDomain d = open_map(5, 5);
    ObservationMap blank(5, 5);
    ObservationMap patch(5, 5);
    patch.set({1, 1}, kFree);
    CHECK(accumulate(blank, patch).at({1, 1}) == kFree);

    ObservationMap known(5, 5);
    known.set({3, 3}, kOccupied);
    CHECK(accumulate(known, blank).at({3, 3}) == kOccupied);
    CHECK(accumulate(known, known) == known);

    ObservationMap wrong(5, 5);
    wrong.set({3, 3}, kFree);
    CHECK_THROWS_AS(accumulate(known, wrong), std::logic_error);
    CHECK_THROWS(accumulate(known, ObservationMap(4, 5)));

    ObservationMap in_place(5, 5);
    CHECK(observe(in_place, d, {2, 2}, {1.0}) == 5);
    CHECK(observe(in_place, d, {2, 2}, {1.0}) == 0);
}

TEST_CASE("kinematics") {
    std::vector<std::int8_t> cells(25, kFree);
    cells[2 * 5 + 3] = kOccupied;
    const GridDomain d(5, 5, cells, {0, 0}, {4, 4});

    const RobotState east{{2, 1}, Direction::East};
    CHECK(step(d, east, Action::Forward) == RobotState{{3, 1}, Direction::East});

    RobotState s{{2, 2}, Direction::East};
    RobotState t = s;
    for (int i = 0; i < 4; ++i) t = step(d, t, Action::TurnLeft);
    CHECK(t == s);
    CHECK(step(d, s, Action::Forward) == s);
    CHECK(step(d, s, Action::TurnLeft).direction == Direction::North);
    CHECK(step(d, s, Action::TurnRight).direction == Direction::South);
    CHECK(step(d, {{0, 0}, Direction::North}, Action::Forward) == RobotState{{0, 0}, Direction::North});
}

TEST_CASE("random walks stay on free cells and vision is never wrong") {
    Rng rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        const GridDomain d = oracle::random_solvable(rng, 4 + trial % 9, 3 + trial % 7, 0.3);
        ObservationMap map(d.width(), d.height());
        RobotState s = d.start();
        std::size_t known = 0;
        for (int k = 0; k < 200; ++k) {
            const ObservationMap before = map;
            map = accumulate(map, visible_patch(d, s.position, {1.5 + trial % 4}));
            CHECK(map.known_count() >= known);
            known = map.known_count();
            for (int y = 0; y < d.height(); ++y)
                for (int x = 0; x < d.width(); ++x) {
                    const auto v = map.at({x, y});
                    if (v != kUnknown) CHECK(v == d.at({x, y}));
                    if (before.at({x, y}) != kUnknown) CHECK(v == before.at({x, y}));
                }
            s = step(d, s, kActions[rng.below(3)]);
            REQUIRE(d.free(s.position));
        }
    }
}

TEST_CASE("office generator") {
    const GridDomain a = generate_office_map(1, 100, 100);
    CHECK(a.start_cell().y == 0);
    CHECK(a.goal().y == 99);
    CHECK(oracle::shortest_commands(a, a.start()).has_value());
    CHECK(save_map(generate_office_map(1, 100, 100)) == save_map(a));
    CHECK(save_map(generate_office_map(2, 100, 100)) != save_map(a));
    CHECK_THROWS(generate_office_map(1, 15, 40));

    std::size_t walls = 0;
    for (auto v : a.cells()) walls += v == kOccupied;
    CHECK(walls > a.cells().size() / 20);
    CHECK(walls < a.cells().size() / 2);

    std::set<int> start_columns;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const GridDomain d = generate_office_map(seed, 40, 40);
        REQUIRE(oracle::shortest_commands(d, d.start()).has_value());
        CHECK(d.start_cell().y == 0);
        CHECK(d.goal().y == 39);
        start_columns.insert(d.start_cell().x);
    }
    CHECK(start_columns.size() > 5);
}

TEST_CASE("ensemble validation") {
    std::vector<GridDomain> ds{open_map(3, 3), open_map(4, 4)};
    DomainEnsemble e = DomainEnsemble::uniform(ds);
    CHECK_NOTHROW(e.validate());
    e.weights = {0.7, 0.3};
    CHECK_NOTHROW(e.validate());
    e.weights = {1.0, 0.0};
    CHECK_THROWS(e.validate());
    e.weights = {0.5, 0.6};
    CHECK_THROWS(e.validate());
    CHECK_THROWS(DomainEnsemble::uniform({}).validate());
}
