#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "cemmas/errors.hpp"
#include "cemmas/instance.hpp"

namespace cemmas {

// Unordered vertex pair, stored as (min, max).
using Edge = std::pair<int, int>;

inline Edge make_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

// A Hamiltonian cycle over vertices 1..n, stored as a permutation. Two tours
// are the same solution iff their edge sets are equal; rotation and direction
// of the stored permutation carry no meaning. Tours are immutable values and
// all operations on them are pure.
class Tour {
public:
    explicit Tour(std::vector<int> perm) : perm_(std::move(perm)) {
        const auto n = static_cast<int>(perm_.size());
        if (n < 3) throw std::invalid_argument("tour: needs at least 3 vertices");
        std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
        for (int v : perm_) {
            if (v < 1 || v > n || seen[v]) throw std::invalid_argument("tour: not a permutation of 1..n");
            seen[v] = 1;
        }
    }

    int n() const { return static_cast<int>(perm_.size()); }
    const std::vector<int>& perm() const { return perm_; }
    int at(int pos) const { return perm_[pos]; } // 0-based position

    // The n cycle edges, normalized.
    std::vector<Edge> edges() const {
        std::vector<Edge> e;
        e.reserve(perm_.size());
        for (std::size_t i = 0; i < perm_.size(); ++i) {
            e.push_back(make_edge(perm_[i], perm_[(i + 1) % perm_.size()]));
        }
        return e;
    }

    // neighbors[v] = the two cycle neighbors of vertex v, ascending. Index 0 unused.
    std::vector<std::array<int, 2>> neighbors() const {
        std::vector<std::array<int, 2>> nb(perm_.size() + 1);
        const auto n = perm_.size();
        for (std::size_t i = 0; i < n; ++i) {
            const int v = perm_[i];
            int a = perm_[(i + n - 1) % n];
            int b = perm_[(i + 1) % n];
            if (a > b) std::swap(a, b);
            nb[v] = {a, b};
        }
        return nb;
    }

    bool contains_edge(int u, int v) const {
        const auto n = perm_.size();
        for (std::size_t i = 0; i < n; ++i) {
            const int a = perm_[i];
            const int b = perm_[(i + 1) % n];
            if ((a == u && b == v) || (a == v && b == u)) return true;
        }
        return false;
    }

    friend bool operator==(const Tour& a, const Tour& b) {
        return a.n() == b.n() && a.neighbors() == b.neighbors();
    }

private:
    std::vector<int> perm_;
};

// Canonical representative of a tour's cycle: rotate the permutation to start
// at vertex 1, then keep the lexicographically smaller of the two directions.
// canonical(a) == canonical(b) iff a and b are the same cycle.
inline Tour canonical(const Tour& tour) {
    const auto& p = tour.perm();
    const auto n = p.size();
    std::size_t start = 0;
    while (p[start] != 1) ++start;
    std::vector<int> fwd(n), rev(n);
    for (std::size_t i = 0; i < n; ++i) {
        fwd[i] = p[(start + i) % n];
        rev[i] = p[(start + n - i) % n];
    }
    rev[0] = 1;
    return Tour(fwd <= rev ? std::move(fwd) : std::move(rev));
}

// Total traveling cost: the sum of the instance distances over the n cycle
// edges. The edges are summed in normalized sorted order so that the result
// is bit-identical under rotation and reversal of the permutation.
inline double cost(const Instance& inst, const Tour& tour) {
    if (tour.n() != inst.n()) throw std::invalid_argument("cost: tour size does not match instance");
    auto e = tour.edges();
    std::sort(e.begin(), e.end());
    double total = 0.0;
    for (const auto& [u, v] : e) total += inst.distance(u, v);
    return total;
}

// Number of edges common to both cycles; n iff the tours are equal.
inline int shared_edges(const Tour& a, const Tour& b) {
    if (a.n() != b.n()) throw std::invalid_argument("shared_edges: tours of different size");
    const auto nb = b.neighbors();
    int count = 0;
    const auto& p = a.perm();
    const auto n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
        const int u = p[i];
        const int v = p[(i + 1) % n];
        if (nb[u][0] == v || nb[u][1] == v) ++count;
    }
    return count;
}

// A k-exchange: remove k edges from the cycle, add k new edges, such that the
// result is again a single Hamiltonian cycle.
struct ExchangeMove {
    std::vector<Edge> removed;
    std::vector<Edge> added;
    int order() const { return static_cast<int>(removed.size()); }
};

// Applies the move and validates the result: the removed edges must belong to
// the tour, the added edges must be new, and the surviving edge set must form
// one cycle through all n vertices. Validation rebuilds the adjacency and
// walks the cycle in O(n).
inline Tour apply_exchange(const Tour& tour, const ExchangeMove& move) {
    const int n = tour.n();
    if (move.removed.empty()) throw std::invalid_argument("apply_exchange: empty move");
    if (move.removed.size() != move.added.size())
        throw std::invalid_argument("apply_exchange: removed/added size mismatch");

    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n) + 1);
    for (const auto& [u, v] : tour.edges()) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    auto drop = [&](int u, int v) -> bool {
        auto it = std::find(adj[u].begin(), adj[u].end(), v);
        if (it == adj[u].end()) return false;
        adj[u].erase(it);
        return true;
    };
    for (const auto& [u, v] : move.removed) {
        if (!drop(u, v) || !drop(v, u))
            throw invalid_move_error("apply_exchange: removed edge not in tour");
    }
    for (const auto& [u, v] : move.added) {
        if (u == v || u < 1 || v < 1 || u > n || v > n)
            throw invalid_move_error("apply_exchange: bad added edge");
        if (std::find(adj[u].begin(), adj[u].end(), v) != adj[u].end())
            throw invalid_move_error("apply_exchange: added edge already present");
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    for (int v = 1; v <= n; ++v) {
        if (adj[v].size() != 2) throw invalid_move_error("apply_exchange: result vertex degree != 2");
    }
    std::vector<int> perm;
    perm.reserve(n);
    int prev = 0, cur = 1;
    do {
        perm.push_back(cur);
        const int next = adj[cur][0] == prev ? adj[cur][1] : adj[cur][0];
        prev = cur;
        cur = next;
    } while (cur != 1 && static_cast<int>(perm.size()) <= n);
    if (static_cast<int>(perm.size()) != n)
        throw invalid_move_error("apply_exchange: result is not a single cycle");
    return Tour(std::move(perm));
}

// Jump move: the vertex at position i moves to position j (1-based positions)
// and the vertices between them shift by one. Equivalent to a 2-exchange when
// |i-j| = 1 and to a 3-exchange otherwise.
inline Tour jump(const Tour& tour, int i, int j) {
    const int n = tour.n();
    if (i < 1 || j < 1 || i > n || j > n) throw std::invalid_argument("jump: position out of range");
    if (i == j) throw std::invalid_argument("jump: positions must differ");
    std::vector<int> p = tour.perm();
    if (i < j) {
        std::rotate(p.begin() + (i - 1), p.begin() + i, p.begin() + j);
    } else {
        std::rotate(p.begin() + (j - 1), p.begin() + (i - 1), p.begin() + i);
    }
    return Tour(std::move(p));
}

namespace detail {
// Edge e of a tour as positions: (perm[i], perm[i+1 mod n]).
inline const GridPoint& tour_pos(const Instance& inst, const Tour& t, int i) {
    return inst.positions()[t.at(i) - 1];
}
} // namespace detail

// Number of properly crossing pairs of tour edges on a grid instance.
inline int count_intersections(const Instance& inst, const Tour& tour) {
    if (inst.kind() != InstanceKind::Grid)
        throw std::invalid_argument("count_intersections: grid instances only");
    const int n = tour.n();
    int count = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (segments_intersect(detail::tour_pos(inst, tour, i),
                                   detail::tour_pos(inst, tour, (i + 1) % n),
                                   detail::tour_pos(inst, tour, j),
                                   detail::tour_pos(inst, tour, (j + 1) % n))) {
                ++count;
            }
        }
    }
    return count;
}

// Finds the first properly crossing pair of tour edges (scanning edge index
// pairs in a fixed order) and returns the unique 2-exchange that removes the
// crossing: edges (p[i],p[i+1]) and (p[j],p[j+1]) are replaced by (p[i],p[j])
// and (p[i+1],p[j+1]). By the triangle inequality this strictly reduces the
// cost. Returns nullopt iff the tour is intersection-free.
inline std::optional<ExchangeMove> find_intersection_removal(const Instance& inst, const Tour& tour) {
    if (inst.kind() != InstanceKind::Grid)
        throw std::invalid_argument("find_intersection_removal: grid instances only");
    const int n = tour.n();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (!segments_intersect(detail::tour_pos(inst, tour, i),
                                    detail::tour_pos(inst, tour, (i + 1) % n),
                                    detail::tour_pos(inst, tour, j),
                                    detail::tour_pos(inst, tour, (j + 1) % n))) {
                continue;
            }
            ExchangeMove move;
            move.removed = {make_edge(tour.at(i), tour.at((i + 1) % n)),
                            make_edge(tour.at(j), tour.at((j + 1) % n))};
            move.added = {make_edge(tour.at(i), tour.at(j)),
                          make_edge(tour.at((i + 1) % n), tour.at((j + 1) % n))};
            return move;
        }
    }
    return std::nullopt;
}

// True iff the cyclic subsequence of the tour restricted to hull vertices
// equals the hull boundary order, up to rotation and reflection.
inline bool hull_order_respected(const Tour& tour, const GridMeta& meta) {
    const int n = tour.n();
    std::vector<char> on_hull(static_cast<std::size_t>(n) + 1, 0);
    for (int v : meta.hull) on_hull[v] = 1;
    std::vector<int> restricted;
    restricted.reserve(meta.hull.size());
    for (int v : tour.perm()) {
        if (on_hull[v]) restricted.push_back(v);
    }
    const auto h = meta.hull.size();
    if (restricted.size() != h) return false;
    auto matches = [&](const std::vector<int>& ring) {
        for (std::size_t shift = 0; shift < h; ++shift) {
            bool ok = true;
            for (std::size_t i = 0; ok && i < h; ++i) {
                if (ring[(shift + i) % h] != restricted[i]) ok = false;
            }
            if (ok) return true;
        }
        return false;
    };
    std::vector<int> reversed(meta.hull.rbegin(), meta.hull.rend());
    return matches(meta.hull) || matches(reversed);
}

} // namespace cemmas
