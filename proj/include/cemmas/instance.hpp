#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cemmas/errors.hpp"
#include "cemmas/geometry.hpp"
#include "cemmas/rng.hpp"

namespace cemmas {

enum class InstanceKind { G1, Grid, Explicit };

// Convex hull summary of a grid instance: side length, boundary vertex labels
// in counterclockwise order, and the number of strictly interior vertices.
struct GridMeta {
    int m = 0;
    std::vector<int> hull;
    int interior_count = 0;
};

// A symmetric TSP instance. Vertices are labeled 1..n in every interface.
// Instances are immutable after construction and safe to share across threads.
//
// Three families:
//   G1        d({i,i+1}) = d({n,1}) = 1, every other pair costs n. The unique
//             optimal cycle is (1,2,...,n) with cost n.
//   Grid      n distinct lattice points in [0,m]^2, no three collinear,
//             Euclidean distances.
//   Explicit  caller-supplied symmetric nonnegative matrix.
class Instance {
public:
    static Instance g1(int n) {
        if (n < 4) throw std::invalid_argument("g1 instance: n must be >= 4");
        Instance inst;
        inst.kind_ = InstanceKind::G1;
        inst.n_ = n;
        return inst;
    }

    static Instance grid(int m, std::vector<GridPoint> positions,
                         std::optional<std::uint64_t> seed = std::nullopt) {
        Instance inst;
        inst.kind_ = InstanceKind::Grid;
        inst.n_ = static_cast<int>(positions.size());
        inst.m_ = m;
        inst.positions_ = std::move(positions);
        inst.seed_ = seed;
        inst.validate_grid();
        inst.build_grid_distances();
        return inst;
    }

    static Instance explicit_matrix(const std::vector<std::vector<double>>& d) {
        Instance inst;
        inst.kind_ = InstanceKind::Explicit;
        inst.n_ = static_cast<int>(d.size());
        if (inst.n_ < 3) throw std::invalid_argument("explicit instance: n must be >= 3");
        inst.dist_.assign(static_cast<std::size_t>(inst.n_) * inst.n_, 0.0);
        for (int i = 0; i < inst.n_; ++i) {
            if (static_cast<int>(d[i].size()) != inst.n_)
                throw std::invalid_argument("explicit instance: matrix must be square");
            for (int j = 0; j < inst.n_; ++j) {
                const double v = d[i][j];
                if (i == j) {
                    if (v != 0.0) throw std::invalid_argument("explicit instance: nonzero diagonal");
                } else if (!(v >= 0.0) || !std::isfinite(v)) {
                    throw std::invalid_argument("explicit instance: distances must be finite and nonnegative");
                } else if (d[j][i] != v) {
                    throw std::invalid_argument("explicit instance: matrix must be symmetric");
                }
                inst.dist_[static_cast<std::size_t>(i) * inst.n_ + j] = v;
            }
        }
        return inst;
    }

    InstanceKind kind() const { return kind_; }
    int n() const { return n_; }
    int m() const { return m_; }
    const std::vector<GridPoint>& positions() const { return positions_; }
    std::optional<std::uint64_t> seed() const { return seed_; }

    // Distance between distinct vertex labels i, j in 1..n.
    double distance(int i, int j) const {
        check_label(i);
        check_label(j);
        if (i == j) throw std::invalid_argument("distance: self-distances are undefined");
        if (kind_ == InstanceKind::G1) {
            const int diff = i > j ? i - j : j - i;
            return (diff == 1 || diff == n_ - 1) ? 1.0 : static_cast<double>(n_);
        }
        return dist_[static_cast<std::size_t>(i - 1) * n_ + (j - 1)];
    }

private:
    Instance() = default;

    void check_label(int v) const {
        if (v < 1 || v > n_) throw std::invalid_argument("vertex label out of range");
    }

    void validate_grid() const {
        if (n_ < 3) throw std::invalid_argument("grid instance: n must be >= 3");
        if (m_ < 1) throw std::invalid_argument("grid instance: m must be >= 1");
        if (2 * m_ < n_) throw std::invalid_argument("grid instance: requires m >= n/2");
        for (int i = 0; i < n_; ++i) {
            const auto& p = positions_[i];
            if (p.x < 0 || p.x > m_ || p.y < 0 || p.y > m_)
                throw std::invalid_argument("grid instance: position outside [0,m]^2");
            for (int j = 0; j < i; ++j) {
                if (positions_[j] == p) throw std::invalid_argument("grid instance: duplicate position");
                for (int k = 0; k < j; ++k) {
                    if (collinear(positions_[k], positions_[j], p))
                        throw std::invalid_argument("grid instance: three collinear positions");
                }
            }
        }
    }

    void build_grid_distances() {
        dist_.assign(static_cast<std::size_t>(n_) * n_, 0.0);
        for (int i = 0; i < n_; ++i) {
            for (int j = i + 1; j < n_; ++j) {
                const long long dx = positions_[i].x - positions_[j].x;
                const long long dy = positions_[i].y - positions_[j].y;
                const double d = std::sqrt(static_cast<double>(dx * dx + dy * dy));
                dist_[static_cast<std::size_t>(i) * n_ + j] = d;
                dist_[static_cast<std::size_t>(j) * n_ + i] = d;
            }
        }
    }

    InstanceKind kind_ = InstanceKind::G1;
    int n_ = 0;
    int m_ = 0;
    std::vector<GridPoint> positions_;
    std::vector<double> dist_;
    std::optional<std::uint64_t> seed_;
};

inline Instance make_g1(int n) { return Instance::g1(n); }

struct GridInstance {
    Instance instance;
    GridMeta meta;
};

inline GridMeta grid_meta(const Instance& inst) {
    if (inst.kind() != InstanceKind::Grid)
        throw std::invalid_argument("grid_meta: not a grid instance");
    GridMeta meta;
    meta.m = inst.m();
    const auto hull_idx = convex_hull(inst.positions());
    meta.hull.reserve(hull_idx.size());
    for (int i : hull_idx) meta.hull.push_back(i + 1);
    meta.interior_count = inst.n() - static_cast<int>(meta.hull.size());
    return meta;
}

// Uniform rejection sampling of n distinct lattice points in [0,m]^2 with no
// three collinear. Each candidate point is checked incrementally against all
// accepted pairs; the attempt budget covers sampled points, not instances.
// Identical (n, m, seed) always produce the identical instance.
inline GridInstance make_grid(int n, int m, std::uint64_t seed) {
    if (n < 3) throw std::invalid_argument("make_grid: n must be >= 3");
    if (m < 1) throw std::invalid_argument("make_grid: m must be >= 1");
    if (2 * m < n) throw std::invalid_argument("make_grid: requires m >= n/2");

    constexpr long long kAttemptBudget = 1'000'000;
    Rng rng(derive_seed(seed, {0x67726964ULL}));
    std::vector<GridPoint> pts;
    pts.reserve(n);
    long long attempts = 0;
    const auto side = static_cast<std::uint64_t>(m) + 1;
    while (static_cast<int>(pts.size()) < n) {
        if (++attempts > kAttemptBudget) {
            throw generation_error("make_grid: rejection budget exhausted after " +
                                   std::to_string(attempts - 1) + " attempted points");
        }
        GridPoint p{static_cast<long long>(rng.next_below(side)),
                    static_cast<long long>(rng.next_below(side))};
        bool ok = true;
        for (std::size_t i = 0; ok && i < pts.size(); ++i) {
            if (pts[i] == p) ok = false;
            for (std::size_t j = 0; ok && j < i; ++j) {
                if (collinear(pts[j], pts[i], p)) ok = false;
            }
        }
        if (ok) pts.push_back(p);
    }

    Instance inst = Instance::grid(m, std::move(pts), seed);
    GridMeta meta = grid_meta(inst);
    return {std::move(inst), std::move(meta)};
}

// ---------------------------------------------------------------------------
// JSON instance files
//
// {"kind":"g1"|"grid"|"explicit","n":int,"m":int?,"positions":[[x,y],...]?,
//  "matrix":[[...]]?,"seed":int?}
// Round trips are lossless: grid coordinates are integers and explicit
// matrices serialize with shortest-round-trip doubles.

inline nlohmann::json instance_to_json(const Instance& inst) {
    nlohmann::json j;
    j["n"] = inst.n();
    switch (inst.kind()) {
    case InstanceKind::G1:
        j["kind"] = "g1";
        break;
    case InstanceKind::Grid: {
        j["kind"] = "grid";
        j["m"] = inst.m();
        auto positions = nlohmann::json::array();
        for (const auto& p : inst.positions()) positions.push_back({p.x, p.y});
        j["positions"] = std::move(positions);
        if (inst.seed()) j["seed"] = *inst.seed();
        break;
    }
    case InstanceKind::Explicit: {
        j["kind"] = "explicit";
        auto matrix = nlohmann::json::array();
        for (int i = 1; i <= inst.n(); ++i) {
            auto row = nlohmann::json::array();
            for (int k = 1; k <= inst.n(); ++k) row.push_back(i == k ? 0.0 : inst.distance(i, k));
            matrix.push_back(std::move(row));
        }
        j["matrix"] = std::move(matrix);
        break;
    }
    }
    return j;
}

inline Instance instance_from_json(const nlohmann::json& j) {
    const auto kind = j.at("kind").get<std::string>();
    const int n = j.at("n").get<int>();
    if (kind == "g1") return Instance::g1(n);
    if (kind == "grid") {
        const int m = j.at("m").get<int>();
        std::vector<GridPoint> pts;
        for (const auto& row : j.at("positions")) {
            pts.push_back({row.at(0).get<long long>(), row.at(1).get<long long>()});
        }
        if (static_cast<int>(pts.size()) != n)
            throw std::invalid_argument("instance json: positions length does not match n");
        std::optional<std::uint64_t> seed;
        if (j.contains("seed")) seed = j.at("seed").get<std::uint64_t>();
        return Instance::grid(m, std::move(pts), seed);
    }
    if (kind == "explicit") {
        auto matrix = j.at("matrix").get<std::vector<std::vector<double>>>();
        if (static_cast<int>(matrix.size()) != n)
            throw std::invalid_argument("instance json: matrix size does not match n");
        return Instance::explicit_matrix(matrix);
    }
    throw std::invalid_argument("instance json: unknown kind '" + kind + "'");
}

inline void save_instance(const Instance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << instance_to_json(inst).dump(2) << '\n';
}

inline Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    nlohmann::json j;
    in >> j;
    return instance_from_json(j);
}

// FNV-1a over the canonical JSON text; used to tie solver outputs back to the
// instance they ran on.
inline std::string instance_hash_hex(const Instance& inst) {
    const std::string text = instance_to_json(inst).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

} // namespace cemmas
