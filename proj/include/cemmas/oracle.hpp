#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "cemmas/errors.hpp"
#include "cemmas/instance.hpp"
#include "cemmas/tour.hpp"

namespace cemmas {

enum class OracleMethod { HeldKarp, BruteForce };

struct OracleResult {
    double optimal_cost;
    Tour optimal_tour;
    OracleMethod method;
};

// Calls fn once per distinct Hamiltonian cycle, each as its canonical
// permutation (starts at 1, second element smaller than the last), in
// lexicographic order. (n-1)!/2 cycles in total.
template <class Fn>
void for_each_cycle(int n, Fn&& fn) {
    if (n < 3) throw std::invalid_argument("for_each_cycle: n must be >= 3");
    std::vector<int> rest(n - 1);
    std::iota(rest.begin(), rest.end(), 2);
    std::vector<int> perm(n);
    perm[0] = 1;
    do {
        if (rest.front() > rest.back()) continue;
        std::copy(rest.begin(), rest.end(), perm.begin() + 1);
        fn(static_cast<const std::vector<int>&>(perm));
    } while (std::next_permutation(rest.begin(), rest.end()));
}

// Exhaustive enumeration of all (n-1)!/2 cycles. The first optimum in
// lexicographic order wins, so ties resolve to the smallest canonical tour.
inline OracleResult brute_force_optimum(const Instance& inst) {
    const int n = inst.n();
    if (n > 10) throw capacity_error("brute_force_optimum: refuses n > 10");
    double best = std::numeric_limits<double>::infinity();
    std::optional<Tour> best_tour;
    for_each_cycle(n, [&](const std::vector<int>& perm) {
        Tour t(perm);
        const double c = cost(inst, t);
        if (c < best) {
            best = c;
            best_tour = std::move(t);
        }
    });
    return {best, *best_tour, OracleMethod::BruteForce};
}

// Dynamic program over vertex subsets: completion[mask][v] is the cheapest
// cost of a path that starts at v, visits exactly the vertices in mask, and
// ends with the closing edge back to vertex 1 (labels 2..n map to bits
// 0..n-2). O(2^n n^2) time, O(2^n n) memory, so refuses n > 22.
//
// The tour is rebuilt front-to-back, always taking the smallest next vertex
// that still completes at the optimal cost. Comparisons reuse the exact
// doubles the minimization produced, so the reconstruction is exact, and for
// instances with exact costs the result is the lexicographically smallest
// canonical optimal tour.
inline OracleResult held_karp(const Instance& inst) {
    const int n = inst.n();
    if (n > 22) throw capacity_error("held_karp: refuses n > 22");
    const int bits = n - 1;
    const std::size_t masks = static_cast<std::size_t>(1) << bits;
    std::vector<double> completion(masks * static_cast<std::size_t>(bits));
    auto at = [&](std::size_t mask, int vi) -> double& {
        return completion[mask * bits + vi];
    };

    for (std::size_t mask = 0; mask < masks; ++mask) {
        for (int vi = 0; vi < bits; ++vi) {
            if (mask & (1ull << vi)) continue; // v itself may not be in the remaining set
            const int v = vi + 2;
            if (mask == 0) {
                at(mask, vi) = inst.distance(v, 1);
                continue;
            }
            double best = std::numeric_limits<double>::infinity();
            for (int ui = 0; ui < bits; ++ui) {
                if (!(mask & (1ull << ui))) continue;
                const double c = inst.distance(v, ui + 2) + at(mask ^ (1ull << ui), ui);
                if (c < best) best = c;
            }
            at(mask, vi) = best;
        }
    }

    const std::size_t full = masks - 1;
    double total = std::numeric_limits<double>::infinity();
    for (int ui = 0; ui < bits; ++ui) {
        const double c = inst.distance(1, ui + 2) + at(full ^ (1ull << ui), ui);
        if (c < total) total = c;
    }

    std::vector<int> perm{1};
    perm.reserve(n);
    std::size_t mask = full;
    int cur = 1;
    double remaining = total;
    while (mask != 0) {
        bool advanced = false;
        for (int ui = 0; ui < bits; ++ui) {
            if (!(mask & (1ull << ui))) continue;
            const double c = inst.distance(cur, ui + 2) + at(mask ^ (1ull << ui), ui);
            if (c == remaining) {
                perm.push_back(ui + 2);
                remaining = at(mask ^ (1ull << ui), ui);
                mask ^= 1ull << ui;
                cur = ui + 2;
                advanced = true;
                break;
            }
        }
        if (!advanced) throw std::logic_error("held_karp: reconstruction failed");
    }
    // report the cost through the canonical edge-order summation, so equal
    // tours always carry bit-equal costs regardless of the solver
    Tour tour = canonical(Tour(std::move(perm)));
    const double normalized = cost(inst, tour);
    return {normalized, std::move(tour), OracleMethod::HeldKarp};
}

// Exact optimum by the cheapest applicable method.
inline OracleResult solve_exact(const Instance& inst) {
    return inst.n() <= 10 ? brute_force_optimum(inst) : held_karp(inst);
}

} // namespace cemmas
