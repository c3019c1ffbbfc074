#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "cemmas/errors.hpp"
#include "cemmas/pheromone.hpp"
#include "cemmas/rng.hpp"
#include "cemmas/tour.hpp"

namespace cemmas {

enum class Scheme { VertexBased, EdgeBased };

inline const char* scheme_name(Scheme s) {
    return s == Scheme::VertexBased ? "vertex" : "edge";
}

inline Scheme scheme_from_name(const std::string& name) {
    if (name == "vertex") return Scheme::VertexBased;
    if (name == "edge") return Scheme::EdgeBased;
    throw std::invalid_argument("unknown scheme '" + name + "'");
}

// Growing set of tour edges, as built by the edge-based sampler. An edge is
// admissible while adding it creates neither a cycle nor a vertex of degree 3;
// the single exception is the cycle-closing edge once n-1 edges are in place.
class PartialEdgeSet {
public:
    explicit PartialEdgeSet(int n)
        : n_(n), chosen_(0), deg_(n + 1, 0), parent_(n + 1), comp_open_(n + 1, 1),
          open_(n), open_pos_(n + 1), adj_(n + 1, {0, 0}), open_sq_sum_(n) {
        std::iota(parent_.begin(), parent_.end(), 0);
        std::iota(open_.begin(), open_.end(), 1);
        for (int v = 1; v <= n; ++v) open_pos_[v] = v - 1;
    }

    int n() const { return n_; }
    int size() const { return chosen_; }
    int degree(int v) const { return deg_[v]; }

    int component(int v) const {
        while (parent_[v] != v) {
            parent_[v] = parent_[parent_[v]];
            v = parent_[v];
        }
        return v;
    }

    bool admissible(Edge e) const {
        const auto [u, v] = e;
        if (u == v || u < 1 || v < 1 || u > n_ || v > n_) return false;
        if (deg_[u] >= 2 || deg_[v] >= 2) return false;
        if (component(u) != component(v)) return true;
        return chosen_ == n_ - 1; // closing edge of the Hamiltonian path
    }

    void add(Edge e) {
        if (!admissible(e)) throw std::logic_error("partial edge set: inadmissible edge added");
        const auto [u, v] = e;
        adj_[u][deg_[u]] = v;
        adj_[v][deg_[v]] = u;
        const int ru = component(u), rv = component(v);
        if (ru != rv) {
            open_sq_sum_ -= comp_open_[ru] * comp_open_[ru] + comp_open_[rv] * comp_open_[rv];
            parent_[ru] = rv;
            comp_open_[rv] += comp_open_[ru];
        } else {
            open_sq_sum_ -= comp_open_[ru] * comp_open_[ru];
        }
        const int root = component(u);
        for (int w : {u, v}) {
            if (++deg_[w] == 2) {
                const int pos = open_pos_[w];
                const int last = open_.back();
                open_[pos] = last;
                open_pos_[last] = pos;
                open_.pop_back();
                open_pos_[w] = -1;
                --comp_open_[root];
            }
        }
        open_sq_sum_ += comp_open_[root] * comp_open_[root];
        ++chosen_;
    }

    // Number of admissible edges, excluding the closing-edge exception:
    // unordered pairs of open vertices lying in different components.
    long long admissible_pair_count() const {
        const auto s = static_cast<long long>(open_.size());
        return (s * s - open_sq_sum_) / 2;
    }

    const std::vector<int>& open_vertices() const { return open_; }

    // With all n edges placed, walks the cycle from vertex 1 toward its
    // smaller neighbor, which is exactly the canonical permutation.
    std::vector<int> cycle_permutation() const {
        if (chosen_ != n_) throw std::logic_error("partial edge set: cycle not complete");
        std::vector<int> perm;
        perm.reserve(n_);
        int prev = 0, cur = 1;
        do {
            perm.push_back(cur);
            int next = std::min(adj_[cur][0], adj_[cur][1]);
            if (next == prev) next = std::max(adj_[cur][0], adj_[cur][1]);
            prev = cur;
            cur = next;
        } while (cur != 1);
        return perm;
    }

private:
    int n_;
    int chosen_;
    std::vector<int> deg_;
    mutable std::vector<int> parent_;
    std::vector<long long> comp_open_;
    std::vector<int> open_;
    std::vector<int> open_pos_;
    std::vector<std::array<int, 2>> adj_;
    long long open_sq_sum_;
};

inline bool admissible_after(const PartialEdgeSet& pe, Edge e) { return pe.admissible(e); }

// Reusable per-worker buffers so the samplers never allocate in their inner
// loops. One scratch per thread; draws themselves are pure given (matrix,
// stream).
struct DrawScratch {
    std::vector<int> pool;
    std::vector<double> cum;
    std::vector<int> perm;
    std::vector<char> high_mark; // packed (n+1)^2 map, zeroed between draws
    std::vector<Edge> high_adm;
    std::vector<Edge> edge_pool;
    std::vector<double> edge_cum;
};

// Per-selection record for step-level instrumentation of the edge scheme.
struct EdgeStepInfo {
    int step = 0;              // 0-based selection index
    int low_chosen_before = 0; // low edges picked in earlier steps
    long long admissible_high = 0;
    long long admissible_low = 0;
    bool picked_high = false;
};
using EdgeStepObserver = std::function<void(const EdgeStepInfo&)>;

// Vertex-based construction: a uniformly random start vertex, then repeated
// roulette-wheel selection of the next vertex among the unvisited ones with
// probability pi(cur, v) / sum over unvisited. One uniform variate per step;
// boundary ties resolve toward the lower index.
inline Tour draw_vertex_based(const PheromoneMatrix& pi, Rng& rng, DrawScratch& s) {
    const int n = pi.n();
    s.pool.resize(n);
    std::iota(s.pool.begin(), s.pool.end(), 1);
    s.perm.clear();
    s.cum.resize(n);

    const auto start = static_cast<int>(rng.next_below(n));
    int cur = s.pool[start];
    s.pool[start] = s.pool[n - 1];
    s.perm.push_back(cur);

    for (int remaining = n - 1; remaining > 0; --remaining) {
        double total = 0.0;
        for (int i = 0; i < remaining; ++i) {
            total += pi.at(cur, s.pool[i]);
            s.cum[i] = total;
        }
        if (!(total > 0.0) || !std::isfinite(total))
            throw std::logic_error("vertex draw: weight row over unvisited set is degenerate");
        const double r = rng.next_unit() * total;
        int k = 0;
        while (k + 1 < remaining && s.cum[k] < r) ++k;
        cur = s.pool[k];
        s.pool[k] = s.pool[remaining - 1];
        s.perm.push_back(cur);
    }
    return Tour(s.perm);
}

namespace detail {

inline int pack_edge(int n, Edge e) { return e.first * (n + 1) + e.second; }

// Weighted selection over the full admissible edge list; used whenever the
// matrix carries no two-valued structure.
inline Tour draw_edge_generic(const PheromoneMatrix& pi, Rng& rng, DrawScratch& s) {
    const int n = pi.n();
    PartialEdgeSet pe(n);
    while (pe.size() < n - 1) {
        s.edge_pool.clear();
        s.edge_cum.clear();
        double total = 0.0;
        for (int i = 1; i <= n; ++i) {
            for (int j = i + 1; j <= n; ++j) {
                if (!pe.admissible({i, j})) continue;
                total += pi.at(i, j) + pi.at(j, i);
                s.edge_pool.push_back({i, j});
                s.edge_cum.push_back(total);
            }
        }
        if (s.edge_pool.empty() || !(total > 0.0) || !std::isfinite(total))
            throw std::logic_error("edge draw: admissible set is empty or degenerate");
        const double r = rng.next_unit() * total;
        std::size_t k = 0;
        while (k + 1 < s.edge_cum.size() && s.edge_cum[k] < r) ++k;
        pe.add(s.edge_pool[k]);
    }
    const auto& open = pe.open_vertices();
    pe.add(make_edge(open[0], open[1]));
    return Tour(pe.cycle_permutation());
}

// Selection for two-valued matrices: the admissible set splits into the high
// edges (at most n, scanned directly) and the low edges (everything else,
// counted in O(1) and sampled uniformly by rejection over open vertex pairs).
// The induced distribution over edges is identical to the generic scan.
inline Tour draw_edge_structured(const PheromoneMatrix& pi, const PheromoneMatrix::Structure& st,
                                 Rng& rng, DrawScratch& s, const EdgeStepObserver* observer) {
    const int n = pi.n();
    PartialEdgeSet pe(n);
    // high_mark stays all-zero between draws; only the n high entries are
    // touched and they are cleared again on exit.
    const auto need = static_cast<std::size_t>(n + 1) * (n + 1);
    if (s.high_mark.size() < need) s.high_mark.assign(need, 0);
    for (const auto& e : st.high) s.high_mark[pack_edge(n, e)] = 1;
    struct MarkGuard {
        DrawScratch& s;
        const PheromoneMatrix::Structure& st;
        int n;
        ~MarkGuard() {
            for (const auto& e : st.high) s.high_mark[pack_edge(n, e)] = 0;
        }
    } guard{s, st, n};

    int low_chosen = 0;
    while (pe.size() < n - 1) {
        s.high_adm.clear();
        for (const auto& e : st.high) {
            if (pe.admissible(e)) s.high_adm.push_back(e);
        }
        const auto high_cnt = static_cast<long long>(s.high_adm.size());
        const long long low_cnt = pe.admissible_pair_count() - high_cnt;
        const double w_high = 2.0 * st.hi * static_cast<double>(high_cnt);
        const double w_low = 2.0 * st.lo * static_cast<double>(low_cnt);
        const double total = w_high + w_low;
        if (!(total > 0.0) || !std::isfinite(total))
            throw std::logic_error("edge draw: admissible set is empty or degenerate");

        const double r = rng.next_unit() * total;
        Edge picked;
        bool picked_high;
        if (high_cnt > 0 && r <= w_high) {
            auto k = static_cast<long long>(r / (2.0 * st.hi));
            if (k >= high_cnt) k = high_cnt - 1;
            picked = s.high_adm[static_cast<std::size_t>(k)];
            picked_high = true;
        } else {
            const auto& open = pe.open_vertices();
            const auto sz = static_cast<std::uint64_t>(open.size());
            while (true) {
                const int u = open[rng.next_below(sz)];
                const int v = open[rng.next_below(sz)];
                if (u == v) continue;
                const Edge e = make_edge(u, v);
                if (s.high_mark[pack_edge(n, e)]) continue;
                if (pe.component(u) == pe.component(v)) continue;
                picked = e;
                break;
            }
            picked_high = false;
        }
        if (observer && *observer) {
            (*observer)({pe.size(), low_chosen, high_cnt, low_cnt, picked_high});
        }
        pe.add(picked);
        if (!picked_high) ++low_chosen;
    }

    const auto& open = pe.open_vertices();
    pe.add(make_edge(open[0], open[1]));
    return Tour(pe.cycle_permutation());
}

} // namespace detail

// Edge-based construction: repeatedly select an admissible edge with
// probability (pi(i,j) + pi(j,i)) / sum over admissible edges until n-1 edges
// form a Hamiltonian path; the forced closing edge completes the cycle and
// the result is reported as the canonical permutation starting at vertex 1.
//
// Step observers require a two-valued matrix (they report the high/low split).
inline Tour draw_edge_based(const PheromoneMatrix& pi, Rng& rng, DrawScratch& s,
                            const EdgeStepObserver* observer = nullptr) {
    if (pi.n() < 4) throw std::invalid_argument("edge draw: n must be >= 4");
    if (pi.structure()) return detail::draw_edge_structured(pi, *pi.structure(), rng, s, observer);
    if (observer && *observer)
        throw std::invalid_argument("edge draw: step observer needs a two-valued matrix");
    return detail::draw_edge_generic(pi, rng, s);
}

inline Tour draw(const PheromoneMatrix& pi, Scheme scheme, Rng& rng, DrawScratch& s) {
    if (pi.n() < 4) throw std::invalid_argument("draw: n must be >= 4");
    return scheme == Scheme::VertexBased ? draw_vertex_based(pi, rng, s)
                                         : draw_edge_based(pi, rng, s);
}

} // namespace cemmas
