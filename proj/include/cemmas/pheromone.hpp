#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <vector>

#include "cemmas/errors.hpp"
#include "cemmas/tour.hpp"

namespace cemmas {

// Calibration bounds for the sampling matrix.
struct Bounds {
    double pi_min = 0.0;
    double pi_max = 1.0;

    // pi_min = 1/(n(n-2)), pi_max = 1 - 1/n.
    static Bounds defaults_for(int n) {
        if (n < 4) throw std::invalid_argument("bounds: n must be >= 4");
        return {1.0 / (static_cast<double>(n) * (n - 2)), 1.0 - 1.0 / n};
    }

    void validate() const {
        if (!(pi_min > 0.0 && pi_min < 1.0 && pi_max > 0.0 && pi_max < 1.0 && pi_min < pi_max))
            throw std::invalid_argument("bounds: need 0 < pi_min < pi_max < 1");
    }
};

// The n x n symmetric sampling-weight matrix. Zero diagonal, symmetric, and
// (after any calibrated update) every off-diagonal entry in [pi_min, pi_max].
//
// When every off-diagonal entry takes one of exactly two values the matrix
// additionally carries a structure descriptor (the "high" edge list); the
// samplers use it to skip full-matrix scans. The descriptor is a cache, not
// part of the value: it never changes sampling distributions.
class PheromoneMatrix {
public:
    struct Structure {
        double lo = 0.0;
        double hi = 0.0;
        std::vector<Edge> high; // edges carrying hi; empty when lo == hi
    };

    explicit PheromoneMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {
        if (n < 4) throw std::invalid_argument("pheromone matrix: n must be >= 4");
    }

    int n() const { return n_; }

    // 1-based vertex labels.
    double at(int i, int j) const { return a_[idx(i, j)]; }

    void set_symmetric(int i, int j, double v) {
        if (i == j) throw std::invalid_argument("pheromone matrix: diagonal is fixed at zero");
        a_[idx(i, j)] = v;
        a_[idx(j, i)] = v;
        structure_.reset();
    }

    double row_sum(int i) const {
        double s = 0.0;
        for (int j = 1; j <= n_; ++j) s += a_[idx(i, j)];
        return s;
    }

    const std::optional<Structure>& structure() const { return structure_; }

    // The high list is kept sorted so that draws depend only on the matrix
    // value, not on how the structure was assembled.
    void set_structure(Structure s) {
        std::sort(s.high.begin(), s.high.end());
        structure_ = std::move(s);
    }
    PheromoneMatrix without_structure() const {
        PheromoneMatrix copy = *this;
        copy.structure_.reset();
        return copy;
    }

private:
    std::size_t idx(int i, int j) const {
        if (i < 1 || j < 1 || i > n_ || j > n_)
            throw std::invalid_argument("pheromone matrix: label out of range");
        return static_cast<std::size_t>(i - 1) * n_ + (j - 1);
    }

    int n_;
    std::vector<double> a_;
    std::optional<Structure> structure_;
};

// Initial distribution: every off-diagonal entry 1/(n-1), rows summing to 1.
// Rows sum to 1 only here; reinforced matrices are renormalized by the
// samplers at selection time.
inline PheromoneMatrix uniform_init(int n) {
    PheromoneMatrix pi(n);
    const double v = 1.0 / (n - 1);
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) pi.set_symmetric(i, j, v);
    pi.set_structure({v, v, {}});
    return pi;
}

// Empirical edge frequencies of the elite solutions: w[i][j] = (number of
// elites containing edge {i,j}) / M.
struct EliteWeights {
    int n = 0;
    std::vector<double> w; // row-major, symmetric, zero diagonal

    double at(int i, int j) const { return w[static_cast<std::size_t>(i - 1) * n + (j - 1)]; }
};

inline EliteWeights elite_weights(const std::vector<Tour>& elites) {
    if (elites.empty()) throw std::invalid_argument("elite_weights: empty elite list");
    const int n = elites.front().n();
    EliteWeights ew{n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
    for (const auto& tour : elites) {
        if (tour.n() != n) throw std::invalid_argument("elite_weights: mixed tour sizes");
        for (const auto& [u, v] : tour.edges()) {
            ew.w[static_cast<std::size_t>(u - 1) * n + (v - 1)] += 1.0;
            ew.w[static_cast<std::size_t>(v - 1) * n + (u - 1)] += 1.0;
        }
    }
    const double inv = 1.0 / static_cast<double>(elites.size());
    for (auto& x : ew.w) x *= inv;
    return ew;
}

// One reinforcement step: entrywise (1-rho)*pi + rho*w, then clamp every
// off-diagonal entry into [pi_min, pi_max]. Idempotent for fixed inputs.
inline PheromoneMatrix update(const PheromoneMatrix& pi, const EliteWeights& w, double rho,
                              const Bounds& bounds) {
    if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("update: rho must be in (0,1]");
    if (w.n != pi.n()) throw std::invalid_argument("update: shape mismatch");
    bounds.validate();

    const int n = pi.n();
    PheromoneMatrix next(n);
    bool two_valued = true;
    std::vector<Edge> high;
    for (int i = 1; i <= n; ++i) {
        for (int j = i + 1; j <= n; ++j) {
            double v = (1.0 - rho) * pi.at(i, j) + rho * w.at(i, j);
            if (v < bounds.pi_min) v = bounds.pi_min;
            if (v > bounds.pi_max) v = bounds.pi_max;
            next.set_symmetric(i, j, v);
            if (v == bounds.pi_max) {
                high.push_back({i, j});
            } else if (v != bounds.pi_min) {
                two_valued = false;
            }
        }
    }
    if (two_valued) next.set_structure({bounds.pi_min, bounds.pi_max, std::move(high)});
    return next;
}

// Partition of the edge set by calibrated weight. Only defined for matrices
// whose entries are exactly two-valued at the calibration bounds, i.e. the
// result of an iteration-best update with rho = 1.
struct EdgeClasses {
    std::vector<Edge> high;
    std::vector<Edge> low;
};

inline EdgeClasses classify_edges(const PheromoneMatrix& pi, const Bounds& bounds) {
    const auto& s = pi.structure();
    if (!s || s->lo != bounds.pi_min || s->hi != bounds.pi_max || s->high.empty())
        throw not_applicable_error("classify_edges: matrix is not a calibrated two-valued matrix");
    EdgeClasses classes;
    classes.high = s->high;
    std::vector<char> is_high(static_cast<std::size_t>(pi.n() + 1) * (pi.n() + 1), 0);
    for (const auto& [u, v] : classes.high) is_high[static_cast<std::size_t>(u) * (pi.n() + 1) + v] = 1;
    for (int i = 1; i <= pi.n(); ++i)
        for (int j = i + 1; j <= pi.n(); ++j)
            if (!is_high[static_cast<std::size_t>(i) * (pi.n() + 1) + j]) classes.low.push_back({i, j});
    return classes;
}

// Row-major CSV dump, 6 significant digits. Debug aid.
inline void write_matrix_csv(const PheromoneMatrix& pi, std::ostream& out) {
    char buf[64];
    for (int i = 1; i <= pi.n(); ++i) {
        for (int j = 1; j <= pi.n(); ++j) {
            std::snprintf(buf, sizeof buf, "%.6g", pi.at(i, j));
            out << (j > 1 ? "," : "") << buf;
        }
        out << '\n';
    }
}

} // namespace cemmas
