#include <algorithm>
#include <stdexcept>

#include "lcsnav/gridworld.hpp"
#include "lcsnav/rng.hpp"

namespace lcsnav {

namespace {

struct Rect {
    int x0, y0, x1, y1;  // inclusive
    int w() const { return x1 - x0 + 1; }
    int h() const { return y1 - y0 + 1; }
};

class OfficeBuilder {
public:
    OfficeBuilder(int width, int height, const OfficeParams& p, Rng& rng)
        : w_(width), h_(height), p_(p), rng_(rng),
          cells_(static_cast<std::size_t>(width) * height, kFree) {}

    std::vector<std::int8_t> build() {
        const auto xs = bands(w_);
        const auto ys = bands(h_);
        for (const auto& [bx0, bx1] : xs)
            for (const auto& [by0, by1] : ys) block({bx0, by0, bx1, by1});
        sprinkle();
        return cells_;
    }

private:
    bool in(int x, int y) const { return x >= 0 && y >= 0 && x < w_ && y < h_; }
    std::int8_t& at(int x, int y) { return cells_[static_cast<std::size_t>(y) * w_ + x]; }
    bool free(int x, int y) const {
        return in(x, y) && cells_[static_cast<std::size_t>(y) * w_ + x] == kFree;
    }
    int pick(int lo, int hi) { return lo + static_cast<int>(rng_.below(static_cast<std::uint64_t>(hi - lo + 1))); }

    // Splits [0, n) into building blocks separated by corridors.
    std::vector<std::pair<int, int>> bands(int n) {
        std::vector<std::pair<int, int>> out;
        int pos = 0;
        while (pos < n) {
            int size = pick(p_.block_min, p_.block_max);
            if (n - (pos + size + p_.corridor_width) < p_.block_min) size = n - pos;
            out.emplace_back(pos, pos + size - 1);
            pos += size + p_.corridor_width;
        }
        return out;
    }

    void block(Rect r) {
        // Perimeter walls only where the block faces a corridor; the map edge
        // is already a wall.
        const bool wl = r.x0 > 0, wr = r.x1 < w_ - 1, wt = r.y0 > 0, wb = r.y1 < h_ - 1;
        for (int y = r.y0; y <= r.y1; ++y) {
            if (wl) at(r.x0, y) = kOccupied;
            if (wr) at(r.x1, y) = kOccupied;
        }
        for (int x = r.x0; x <= r.x1; ++x) {
            if (wt) at(x, r.y0) = kOccupied;
            if (wb) at(x, r.y1) = kOccupied;
        }
        const Rect inner{r.x0 + wl, r.y0 + wt, r.x1 - wr, r.y1 - wb};
        std::vector<Rect> rooms;
        divide(inner, rooms);

        int doors = 0;
        for (const Rect& room : rooms) {
            if (wl && room.x0 == inner.x0 && rng_.bernoulli(p_.corridor_door_prob))
                doors += door_vertical(r.x0, room.y0, room.y1);
            if (wr && room.x1 == inner.x1 && rng_.bernoulli(p_.corridor_door_prob))
                doors += door_vertical(r.x1, room.y0, room.y1);
            if (wt && room.y0 == inner.y0 && rng_.bernoulli(p_.corridor_door_prob))
                doors += door_horizontal(r.y0, room.x0, room.x1);
            if (wb && room.y1 == inner.y1 && rng_.bernoulli(p_.corridor_door_prob))
                doors += door_horizontal(r.y1, room.x0, room.x1);
        }
        // Every block opens onto at least one corridor.
        for (int attempt = 0; doors == 0 && attempt < 16; ++attempt) {
            const Rect& room = rooms[rng_.below(rooms.size())];
            if (wl && room.x0 == inner.x0) doors += door_vertical(r.x0, room.y0, room.y1);
            else if (wr && room.x1 == inner.x1) doors += door_vertical(r.x1, room.y0, room.y1);
            else if (wt && room.y0 == inner.y0) doors += door_horizontal(r.y0, room.x0, room.x1);
            else if (wb && room.y1 == inner.y1) doors += door_horizontal(r.y1, room.x0, room.x1);
        }
    }

    // Door in a vertical wall at column x, spanning rows [y0, y1] of the room side.
    int door_vertical(int x, int y0, int y1) {
        const int span = y1 - y0 + 1;
        if (span < p_.door_width) return 0;
        for (int attempt = 0; attempt < 8; ++attempt) {
            const int s = pick(y0, y1 - p_.door_width + 1);
            bool ok = true;
            for (int y = s; y < s + p_.door_width; ++y)
                ok = ok && (free(x - 1, y) || !in(x - 1, y)) && (free(x + 1, y) || !in(x + 1, y));
            if (!ok) continue;
            for (int y = s; y < s + p_.door_width; ++y) at(x, y) = kFree;
            return 1;
        }
        return 0;
    }

    int door_horizontal(int y, int x0, int x1) {
        const int span = x1 - x0 + 1;
        if (span < p_.door_width) return 0;
        for (int attempt = 0; attempt < 8; ++attempt) {
            const int s = pick(x0, x1 - p_.door_width + 1);
            bool ok = true;
            for (int x = s; x < s + p_.door_width; ++x)
                ok = ok && (free(x, y - 1) || !in(x, y - 1)) && (free(x, y + 1) || !in(x, y + 1));
            if (!ok) continue;
            for (int x = s; x < s + p_.door_width; ++x) at(x, y) = kFree;
            return 1;
        }
        return 0;
    }

    // Recursive division into rooms; each dividing wall receives one door.
    void divide(Rect r, std::vector<Rect>& rooms) {
        const int minside = p_.room_min;
        const bool can_v = r.w() >= 2 * minside + 1;
        const bool can_h = r.h() >= 2 * minside + 1;
        if (!can_v && !can_h) {
            rooms.push_back(r);
            return;
        }
        const bool vertical = can_v && (!can_h || r.w() > r.h() || (r.w() == r.h() && rng_.bernoulli(0.5)));
        for (int attempt = 0; attempt < 8; ++attempt) {
            if (vertical) {
                const int x = pick(r.x0 + minside, r.x1 - minside);
                // keep wall ends off existing openings
                if (free(x, r.y0 - 1) || free(x, r.y1 + 1)) continue;
                for (int y = r.y0; y <= r.y1; ++y) at(x, y) = kOccupied;
                const int d = pick(r.y0, r.y1 - p_.door_width + 1);
                for (int y = d; y < d + p_.door_width; ++y) at(x, y) = kFree;
                divide({r.x0, r.y0, x - 1, r.y1}, rooms);
                divide({x + 1, r.y0, r.x1, r.y1}, rooms);
                return;
            }
            const int y = pick(r.y0 + minside, r.y1 - minside);
            if (free(r.x0 - 1, y) || free(r.x1 + 1, y)) continue;
            for (int x = r.x0; x <= r.x1; ++x) at(x, y) = kOccupied;
            const int d = pick(r.x0, r.x1 - p_.door_width + 1);
            for (int x = d; x < d + p_.door_width; ++x) at(x, y) = kFree;
            divide({r.x0, r.y0, r.x1, y - 1}, rooms);
            divide({r.x0, y + 1, r.x1, r.y1}, rooms);
            return;
        }
        rooms.push_back(r);
    }

    // Isolated furniture: single cells whose 8-neighbourhood is entirely free.
    void sprinkle() {
        if (p_.clutter <= 0.0) return;
        const auto n = static_cast<int>(p_.clutter * w_ * h_);
        for (int i = 0; i < n; ++i) {
            const int x = pick(1, w_ - 2), y = pick(1, h_ - 2);
            bool clear = true;
            for (int oy = -1; oy <= 1 && clear; ++oy)
                for (int ox = -1; ox <= 1 && clear; ++ox) clear = free(x + ox, y + oy);
            if (clear) at(x, y) = kOccupied;
        }
    }

    int w_, h_;
    OfficeParams p_;
    Rng& rng_;
    std::vector<std::int8_t> cells_;
};

}  // namespace

GridDomain generate_office_map(std::uint64_t seed, int width, int height,
                               const OfficeParams& params) {
    if (width < 16 || height < 16)
        throw std::invalid_argument("office maps need width and height of at least 16");
    if (params.block_min < 2 * params.room_min + 3 || params.block_max < params.block_min ||
        params.corridor_width < 1 || params.door_width < 1)
        throw std::invalid_argument("inconsistent office map parameters");
    Rng rng = Rng::derive(seed, 0x0FF1CE);
    for (int attempt = 0; attempt < params.max_retries; ++attempt) {
        auto cells = OfficeBuilder(width, height, params, rng).build();
        std::vector<int> top, bottom;
        for (int x = 0; x < width; ++x) {
            if (cells[static_cast<std::size_t>(x)] == kFree) top.push_back(x);
            if (cells[static_cast<std::size_t>(height - 1) * width + x] == kFree) bottom.push_back(x);
        }
        if (top.empty() || bottom.empty()) continue;
        const Cell start{top[rng.below(top.size())], 0};
        const Cell goal{bottom[rng.below(bottom.size())], height - 1};
        try {
            return GridDomain(width, height, std::move(cells), start, goal, Direction::South);
        } catch (const MapError&) {
            continue;
        }
    }
    throw std::runtime_error("office map generator could not produce a solvable map");
}

}  // namespace lcsnav
