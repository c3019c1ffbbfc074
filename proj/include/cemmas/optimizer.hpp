#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cemmas/generation.hpp"
#include "cemmas/instance.hpp"
#include "cemmas/parallel.hpp"
#include "cemmas/pheromone.hpp"
#include "cemmas/tour.hpp"

namespace cemmas {

// Full parameter set of one optimizer run. max_iterations <= 0 selects the
// family default budget; bounds default to the calibration defaults for n.
struct CEConfig {
    int N = 1;
    int M = 1;
    double rho = 1.0;
    std::optional<Bounds> bounds;
    Scheme scheme = Scheme::EdgeBased;
    long long max_iterations = 0;
    std::optional<double> target_cost;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct IterationRecord {
    long long t = 0;
    double best_cost = 0.0;    // best of this iteration's N samples
    double best_so_far = 0.0;  // non-increasing
    std::optional<int> shared_edges; // with the known optimum, when given
    long long wall_nanos = 0;
};

struct RunTrace {
    std::vector<IterationRecord> records;
    std::optional<long long> hit_iteration;
    long long total_evaluations = 0; // records.size() * N
    std::optional<Tour> best_tour;   // canonical
    double best_cost = std::numeric_limits<double>::infinity();
};

// Called once per iteration with the iteration-best sample.
using IterationObserver = std::function<void(long long t, const Tour& iteration_best, double cost)>;

// Iteration budget defaults: capped theorem-style budgets per family/scheme.
inline long long default_budget(const Instance& inst, Scheme scheme) {
    const double n = inst.n();
    if (inst.kind() == InstanceKind::Grid) {
        const double m = inst.m();
        return static_cast<long long>(std::min(1e6, std::pow(n, 3) * std::pow(m, 5)));
    }
    if (scheme == Scheme::EdgeBased)
        return 4 * static_cast<long long>(std::ceil(std::pow(n, 3) * std::log(n)));
    return static_cast<long long>(std::min(1e9, std::pow(n, 6)));
}

// Indices of all N samples ordered by (cost, draw index); the first M are the
// elites and index order breaks cost ties deterministically.
inline std::vector<int> sort_and_select(const std::vector<double>& costs, int M) {
    if (M < 1 || M > static_cast<int>(costs.size()))
        throw std::invalid_argument("sort_and_select: need 1 <= M <= N");
    std::vector<int> order(costs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return costs[a] != costs[b] ? costs[a] < costs[b] : a < b;
    });
    return order;
}

// The main loop: draw N tours from the current matrix, select the M best,
// reinforce, calibrate, record. Stops on reaching target_cost or the budget.
// Reruns with an identical config are bit-identical, independent of threads:
// draw i of iteration t always uses the stream derived from (seed, t, i).
inline RunTrace run(const Instance& inst, const CEConfig& cfg,
                    const std::optional<Tour>& known_optimum = std::nullopt,
                    const IterationObserver& observer = {}) {
    const int n = inst.n();
    if (n < 4) throw std::invalid_argument("run: instance must have n >= 4");
    if (cfg.N < 1 || cfg.M < 1 || cfg.M > cfg.N)
        throw std::invalid_argument("run: need 1 <= M <= N");
    if (!(cfg.rho > 0.0 && cfg.rho <= 1.0))
        throw std::invalid_argument("run: rho must be in (0,1]");
    if (known_optimum && known_optimum->n() != n)
        throw std::invalid_argument("run: known optimum size mismatch");
    const Bounds bounds = cfg.bounds ? *cfg.bounds : Bounds::defaults_for(n);
    bounds.validate();
    const long long budget = cfg.max_iterations > 0 ? cfg.max_iterations : default_budget(inst, cfg.scheme);

    PheromoneMatrix pi = uniform_init(n);
    const int workers = std::max(1, std::min(cfg.threads, cfg.N));
    std::vector<DrawScratch> scratch(workers);
    std::vector<std::optional<Tour>> samples(cfg.N);
    std::vector<double> costs(cfg.N);

    // rho = 1, M = 1 makes the next matrix a function of the elite alone; the
    // two-valued matrix is then maintained in place in O(n) per iteration.
    const bool iteration_best_mode = cfg.rho == 1.0 && cfg.M == 1;
    bool pi_is_two_valued = false;

    RunTrace trace;
    for (long long t = 0; t < budget; ++t) {
        const auto started = std::chrono::steady_clock::now();
        parallel_for(0, cfg.N, workers, [&](long long i, int w) {
            Rng rng(derive_seed(cfg.seed, {0xd7a3u, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(i)}));
            Tour tour = draw(pi, cfg.scheme, rng, scratch[w]);
            costs[i] = cost(inst, tour);
            samples[i] = std::move(tour);
        });
        const auto order = sort_and_select(costs, cfg.M);
        const Tour& iteration_best = *samples[order[0]];
        const double iteration_best_cost = costs[order[0]];
        if (iteration_best_cost < trace.best_cost) {
            trace.best_cost = iteration_best_cost;
            trace.best_tour = iteration_best;
        }
        std::optional<int> shared;
        if (known_optimum) shared = shared_edges(iteration_best, *known_optimum);

        if (iteration_best_mode) {
            if (!pi_is_two_valued) {
                for (int i = 1; i <= n; ++i)
                    for (int j = i + 1; j <= n; ++j) pi.set_symmetric(i, j, bounds.pi_min);
                pi_is_two_valued = true;
            } else {
                const std::vector<Edge> previous_high = pi.structure()->high;
                for (const auto& [u, v] : previous_high) pi.set_symmetric(u, v, bounds.pi_min);
            }
            for (const auto& [u, v] : iteration_best.edges()) pi.set_symmetric(u, v, bounds.pi_max);
            pi.set_structure({bounds.pi_min, bounds.pi_max, iteration_best.edges()});
        } else {
            std::vector<Tour> elites;
            elites.reserve(cfg.M);
            for (int e = 0; e < cfg.M; ++e) elites.push_back(*samples[order[e]]);
            pi = update(pi, elite_weights(elites), cfg.rho, bounds);
        }

        const auto wall = std::chrono::duration_cast<std::chrono::nanoseconds>(
                              std::chrono::steady_clock::now() - started)
                              .count();
        trace.records.push_back({t, iteration_best_cost, trace.best_cost, shared, wall});
        if (observer) observer(t, iteration_best, iteration_best_cost);
        if (cfg.target_cost && trace.best_cost <= *cfg.target_cost + 1e-9) {
            trace.hit_iteration = t;
            break;
        }
    }
    trace.total_evaluations = static_cast<long long>(trace.records.size()) * cfg.N;
    if (trace.best_tour) trace.best_tour = canonical(*trace.best_tour);
    return trace;
}

namespace detail {
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}
} // namespace detail

// CSV columns: t,best_cost,best_so_far,shared_edges,wall_nanos. shared_edges
// is empty when no optimum was supplied. Wall times are written as 0 unless
// timing is requested, keeping default outputs byte-identical across reruns.
inline void write_trace_csv(const RunTrace& trace, std::ostream& out, bool include_timing = false) {
    out << "t,best_cost,best_so_far,shared_edges,wall_nanos\n";
    for (const auto& r : trace.records) {
        out << r.t << ',' << detail::format_double(r.best_cost) << ','
            << detail::format_double(r.best_so_far) << ',';
        if (r.shared_edges) out << *r.shared_edges;
        out << ',' << (include_timing ? r.wall_nanos : 0) << '\n';
    }
}

inline nlohmann::json config_to_json(const CEConfig& cfg, const Bounds& bounds, long long budget) {
    nlohmann::json j;
    j["N"] = cfg.N;
    j["M"] = cfg.M;
    j["rho"] = cfg.rho;
    j["piMin"] = bounds.pi_min;
    j["piMax"] = bounds.pi_max;
    j["scheme"] = scheme_name(cfg.scheme);
    j["maxIterations"] = budget;
    if (cfg.target_cost) j["targetCost"] = *cfg.target_cost;
    else j["targetCost"] = nullptr;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    return j;
}

inline nlohmann::json summary_json(const Instance& inst, const CEConfig& cfg, const RunTrace& trace) {
    const Bounds bounds = cfg.bounds ? *cfg.bounds : Bounds::defaults_for(inst.n());
    const long long budget =
        cfg.max_iterations > 0 ? cfg.max_iterations : default_budget(inst, cfg.scheme);
    nlohmann::json j;
    j["config"] = config_to_json(cfg, bounds, budget);
    nlohmann::json ji;
    ji["kind"] = inst.kind() == InstanceKind::G1 ? "g1"
                 : inst.kind() == InstanceKind::Grid ? "grid"
                                                     : "explicit";
    ji["n"] = inst.n();
    if (inst.kind() == InstanceKind::Grid) ji["m"] = inst.m();
    ji["hash"] = instance_hash_hex(inst);
    j["instance"] = ji;
    j["iterations"] = trace.records.size();
    if (trace.hit_iteration) j["hitIteration"] = *trace.hit_iteration;
    else j["hitIteration"] = nullptr;
    j["evaluations"] = trace.total_evaluations;
    j["bestCost"] = trace.best_cost;
    if (trace.best_tour) j["bestTour"] = trace.best_tour->perm();
    else j["bestTour"] = nullptr;
    return j;
}

} // namespace cemmas
