#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "cemmas/optimizer.hpp"
#include "cemmas/oracle.hpp"
#include "cemmas/parallel.hpp"

namespace cemmas {

// A benchmark campaign: one cell per instance size, `trials` independent runs
// per cell, everything derived from masterSeed. Design files are JSON:
//
// {
//   "family": "g1" | "grid",
//   "sweep": {"n": [8,10,12], "mRule": "2n"} | {"n": [...], "m": [...]},
//   "nRule": "log2" | "pow:<x>" | "const:<k>" | "sqrt_m",
//   "scheme": "vertex" | "edge",
//   "trials": 100,
//   "budgetRule": "n6" | "n3lnn" | "n_iters" | "thm_grid_convex" |
//                 "thm_grid_interior" | "iters:<x>" | "evals:<x>",
//   "masterSeed": 1,
//   "conditioning": "none" | "convex" | "interior:<k>",   (grid only)
//   "cap": 1000000,
//   "threads": 2,
//   "checkJumpRadius": 0
// }
//
// nRule gives the per-iteration sample size from n (or m): "log2" is
// ceil(ln(n)^2), "pow:x" is ceil(n^x), "sqrt_m" is ceil(sqrt(m)).
// budgetRule gives the iteration budget; "evals:x" divides x by the sample
// size. Budgets are always capped at `cap`.
struct ExperimentDesign {
    std::string family = "g1";
    std::vector<int> ns;
    std::vector<int> ms;      // used when m_rule is empty
    std::string m_rule;       // "2n" derives m from n
    std::string n_rule = "log2";
    std::string scheme = "edge";
    int trials = 10;
    std::string budget_rule = "n3lnn";
    std::uint64_t master_seed = 1;
    std::string conditioning = "none";
    long long cap = 1'000'000;
    int threads = 1;
    int check_jump_radius = 0;
};

struct CellResult {
    int n = 0;
    int m = 0;
    int sample_size = 0;
    long long budget = 0;
    int trials = 0;
    int hits = 0;
    double success_rate = 0.0;
    double mean_hit_iteration = 0.0;
    double median_hit_iteration = 0.0;
    double mean_evaluations = 0.0;
    int non_monotone_trials = 0;   // iteration-best cost rose at least once
    int optimal_hits = 0;          // grid: hit tour equals the oracle optimum
    int hull_order_hits = 0;       // grid: hit tour intersection-free and hull ordered
    long long jump_checks = 0;     // grid: intersection-free non-optimal bests examined
    long long jump_violations = 0; // of those, not convertible within the radius
};

struct ExperimentReport {
    ExperimentDesign design;
    std::vector<CellResult> cells;
};

inline ExperimentDesign design_from_json(const nlohmann::json& j) {
    ExperimentDesign d;
    d.family = j.at("family").get<std::string>();
    if (d.family != "g1" && d.family != "grid")
        throw std::invalid_argument("design: family must be g1 or grid");
    const auto& sweep = j.at("sweep");
    d.ns = sweep.at("n").get<std::vector<int>>();
    if (sweep.contains("m")) d.ms = sweep.at("m").get<std::vector<int>>();
    if (sweep.contains("mRule")) d.m_rule = sweep.at("mRule").get<std::string>();
    d.n_rule = j.at("nRule").get<std::string>();
    d.scheme = j.at("scheme").get<std::string>();
    d.trials = j.at("trials").get<int>();
    d.budget_rule = j.at("budgetRule").get<std::string>();
    d.master_seed = j.at("masterSeed").get<std::uint64_t>();
    if (j.contains("conditioning")) d.conditioning = j.at("conditioning").get<std::string>();
    if (j.contains("cap")) d.cap = j.at("cap").get<long long>();
    if (j.contains("threads")) d.threads = j.at("threads").get<int>();
    if (j.contains("checkJumpRadius")) d.check_jump_radius = j.at("checkJumpRadius").get<int>();
    if (d.family == "grid" && d.ms.empty() && d.m_rule.empty())
        throw std::invalid_argument("design: grid sweeps need m or mRule");
    if (!d.ms.empty() && d.ms.size() != d.ns.size())
        throw std::invalid_argument("design: m list must pair with n list");
    return d;
}

inline nlohmann::json design_to_json(const ExperimentDesign& d) {
    nlohmann::json j;
    j["family"] = d.family;
    nlohmann::json sweep;
    sweep["n"] = d.ns;
    if (!d.ms.empty()) sweep["m"] = d.ms;
    if (!d.m_rule.empty()) sweep["mRule"] = d.m_rule;
    j["sweep"] = sweep;
    j["nRule"] = d.n_rule;
    j["scheme"] = d.scheme;
    j["trials"] = d.trials;
    j["budgetRule"] = d.budget_rule;
    j["masterSeed"] = d.master_seed;
    j["conditioning"] = d.conditioning;
    j["cap"] = d.cap;
    j["threads"] = d.threads;
    j["checkJumpRadius"] = d.check_jump_radius;
    return j;
}

inline ExperimentDesign load_design(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open design file: " + path);
    nlohmann::json j;
    in >> j;
    return design_from_json(j);
}

namespace detail {

inline int resolve_sample_size(const std::string& rule, int n, int m) {
    if (rule == "log2") {
        const double l = std::log(static_cast<double>(n));
        return static_cast<int>(std::ceil(l * l));
    }
    if (rule == "sqrt_m") return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(m))));
    if (rule.rfind("pow:", 0) == 0)
        return static_cast<int>(std::ceil(std::pow(static_cast<double>(n), std::stod(rule.substr(4)))));
    if (rule.rfind("const:", 0) == 0) return std::stoi(rule.substr(6));
    throw std::invalid_argument("unknown nRule '" + rule + "'");
}

inline long long resolve_budget(const std::string& rule, const ExperimentDesign& d, int n, int m,
                                int sample_size, int interior) {
    const double nd = n;
    const double md = m;
    double iters = 0.0;
    if (rule == "n6") {
        iters = std::pow(nd, 6);
    } else if (rule == "n3lnn") {
        iters = std::ceil(std::pow(nd, 3) * std::log(nd));
    } else if (rule == "n_iters") {
        iters = nd;
    } else if (rule == "thm_grid_convex") {
        iters = d.scheme == "vertex" ? std::pow(nd, 4) * std::pow(md, 5)
                                     : std::pow(nd, 3) * std::pow(md, 5);
    } else if (rule == "thm_grid_interior") {
        const double tail = d.scheme == "vertex" ? std::pow(nd, 6.0 * interior - 4.0)
                                                 : std::pow(nd, 3.0 * interior - 2.0);
        iters = nd * std::pow(md, 5) + tail;
    } else if (rule.rfind("iters:", 0) == 0) {
        iters = std::stod(rule.substr(6));
    } else if (rule.rfind("evals:", 0) == 0) {
        iters = std::floor(std::stod(rule.substr(6)) / sample_size);
    } else {
        throw std::invalid_argument("unknown budgetRule '" + rule + "'");
    }
    const double capped = std::min(static_cast<double>(d.cap), iters);
    return std::max<long long>(1, static_cast<long long>(capped));
}

inline int conditioning_interior(const std::string& conditioning) {
    if (conditioning == "none" || conditioning.empty()) return -1;
    if (conditioning == "convex") return 0;
    if (conditioning.rfind("interior:", 0) == 0) return std::stoi(conditioning.substr(9));
    throw std::invalid_argument("unknown conditioning '" + conditioning + "'");
}

// Deterministic conditioned instance: walks derived seeds until the hull
// profile matches. Convex position gets rare quickly as n grows, hence the
// wide attempt budget.
inline GridInstance conditioned_grid(int n, int m, int interior, std::uint64_t seed) {
    constexpr int kAttempts = 4'000'000;
    for (int attempt = 0; attempt < kAttempts; ++attempt) {
        auto gi = make_grid(n, m, derive_seed(seed, {0xce11u, static_cast<std::uint64_t>(attempt)}));
        if (interior < 0 || gi.meta.interior_count == interior) return gi;
    }
    throw generation_error("conditioned grid generation exhausted its attempt budget");
}

// Bounded breadth-first search over jump moves.
inline bool jump_reachable(const Tour& from, const Tour& to, int max_jumps) {
    if (from == to) return true;
    const int n = from.n();
    std::set<std::vector<int>> seen{canonical(from).perm()};
    std::vector<Tour> frontier{from};
    for (int depth = 0; depth < max_jumps; ++depth) {
        std::vector<Tour> next;
        for (const auto& t : frontier) {
            for (int i = 1; i <= n; ++i) {
                for (int j = 1; j <= n; ++j) {
                    if (i == j) continue;
                    const Tour moved = jump(t, i, j);
                    if (moved == to) return true;
                    if (depth + 1 < max_jumps && seen.insert(canonical(moved).perm()).second)
                        next.push_back(moved);
                }
            }
        }
        frontier = std::move(next);
    }
    return false;
}

struct TrialOutcome {
    bool hit = false;
    long long hit_iteration = 0;
    long long evaluations = 0;
    bool non_monotone = false;
    bool hit_optimal = false;
    bool hit_hull_order = false;
    long long jump_checks = 0;
    long long jump_violations = 0;
};

} // namespace detail

// Runs every cell of the design. Trials are independent and run in parallel;
// trial seeds derive from (masterSeed, cell, trial), so reports are
// reproducible bit for bit regardless of the thread count.
inline ExperimentReport runtime_experiment(const ExperimentDesign& design) {
    ExperimentReport report;
    report.design = design;
    const Scheme scheme = scheme_from_name(design.scheme);
    const int interior = detail::conditioning_interior(design.conditioning);

    for (std::size_t cell = 0; cell < design.ns.size(); ++cell) {
        const int n = design.ns[cell];
        int m = 0;
        if (design.family == "grid") {
            m = !design.ms.empty() ? design.ms[cell]
                : design.m_rule == "2n" ? 2 * n
                : throw std::invalid_argument("unknown mRule '" + design.m_rule + "'");
        }
        const int sample_size = detail::resolve_sample_size(design.n_rule, n, m);
        const long long budget =
            detail::resolve_budget(design.budget_rule, design, n, m, sample_size,
                                   std::max(0, interior));

        std::vector<detail::TrialOutcome> outcomes(design.trials);
        parallel_for(0, design.trials, design.threads, [&](long long trial, int) {
            const std::uint64_t trial_seed = derive_seed(
                design.master_seed, {static_cast<std::uint64_t>(cell), static_cast<std::uint64_t>(trial)});

            std::optional<GridInstance> grid;
            std::optional<Instance> instance;
            std::optional<OracleResult> oracle;
            if (design.family == "g1") {
                instance = make_g1(n);
                std::vector<int> p(n);
                std::iota(p.begin(), p.end(), 1);
                oracle = OracleResult{static_cast<double>(n), Tour(std::move(p)),
                                      OracleMethod::BruteForce};
            } else {
                grid = detail::conditioned_grid(n, m, interior, trial_seed);
                instance = grid->instance;
                oracle = solve_exact(*instance);
            }

            CEConfig cfg;
            cfg.N = sample_size;
            cfg.scheme = scheme;
            cfg.max_iterations = budget;
            cfg.target_cost = oracle->optimal_cost;
            cfg.seed = derive_seed(trial_seed, {0x50e1u});

            detail::TrialOutcome& out = outcomes[trial];
            double previous_best = std::numeric_limits<double>::infinity();
            std::set<std::vector<int>> jump_checked;
            IterationObserver observer = [&](long long, const Tour& best, double best_cost) {
                if (best_cost > previous_best + 1e-12 &&
                    previous_best != std::numeric_limits<double>::infinity()) {
                    out.non_monotone = true;
                }
                previous_best = best_cost;
                if (grid && design.check_jump_radius > 0 && !(best == oracle->optimal_tour) &&
                    count_intersections(grid->instance, best) == 0 &&
                    jump_checked.insert(canonical(best).perm()).second) {
                    ++out.jump_checks;
                    if (!detail::jump_reachable(best, oracle->optimal_tour, design.check_jump_radius))
                        ++out.jump_violations;
                }
            };

            const RunTrace trace = run(*instance, cfg, oracle->optimal_tour, observer);
            out.hit = trace.hit_iteration.has_value();
            out.hit_iteration = trace.hit_iteration.value_or(-1);
            out.evaluations = trace.total_evaluations;
            if (out.hit && grid) {
                const Tour& hit_tour = *trace.best_tour;
                out.hit_optimal = hit_tour == oracle->optimal_tour;
                out.hit_hull_order = count_intersections(grid->instance, hit_tour) == 0 &&
                                     hull_order_respected(hit_tour, grid->meta);
            }
        });

        CellResult cr;
        cr.n = n;
        cr.m = m;
        cr.sample_size = sample_size;
        cr.budget = budget;
        cr.trials = design.trials;
        std::vector<long long> hit_iters;
        double eval_sum = 0.0;
        for (const auto& out : outcomes) {
            if (out.hit) {
                ++cr.hits;
                hit_iters.push_back(out.hit_iteration);
                cr.optimal_hits += out.hit_optimal ? 1 : 0;
                cr.hull_order_hits += out.hit_hull_order ? 1 : 0;
            }
            cr.non_monotone_trials += out.non_monotone ? 1 : 0;
            cr.jump_checks += out.jump_checks;
            cr.jump_violations += out.jump_violations;
            eval_sum += static_cast<double>(out.evaluations);
        }
        cr.success_rate = design.trials > 0 ? static_cast<double>(cr.hits) / design.trials : 0.0;
        cr.mean_evaluations = design.trials > 0 ? eval_sum / design.trials : 0.0;
        if (!hit_iters.empty()) {
            double s = 0.0;
            for (long long h : hit_iters) s += static_cast<double>(h);
            cr.mean_hit_iteration = s / static_cast<double>(hit_iters.size());
            std::sort(hit_iters.begin(), hit_iters.end());
            const std::size_t mid = hit_iters.size() / 2;
            cr.median_hit_iteration =
                hit_iters.size() % 2 == 1
                    ? static_cast<double>(hit_iters[mid])
                    : (static_cast<double>(hit_iters[mid - 1]) + static_cast<double>(hit_iters[mid])) / 2.0;
        }
        report.cells.push_back(cr);
    }
    return report;
}

inline nlohmann::json report_to_json(const ExperimentReport& report) {
    nlohmann::json j;
    j["design"] = design_to_json(report.design);
    auto cells = nlohmann::json::array();
    for (const auto& c : report.cells) {
        nlohmann::json jc;
        jc["n"] = c.n;
        if (report.design.family == "grid") jc["m"] = c.m;
        jc["N"] = c.sample_size;
        jc["budget"] = c.budget;
        jc["trials"] = c.trials;
        jc["hits"] = c.hits;
        jc["successRate"] = c.success_rate;
        jc["meanHitIteration"] = c.mean_hit_iteration;
        jc["medianHitIteration"] = c.median_hit_iteration;
        jc["meanEvaluations"] = c.mean_evaluations;
        jc["nonMonotoneTrials"] = c.non_monotone_trials;
        if (report.design.family == "grid") {
            jc["optimalHits"] = c.optimal_hits;
            jc["hullOrderHits"] = c.hull_order_hits;
            if (report.design.check_jump_radius > 0) {
                jc["jumpChecks"] = c.jump_checks;
                jc["jumpViolations"] = c.jump_violations;
            }
        }
        cells.push_back(jc);
    }
    j["cells"] = cells;
    return j;
}

inline void write_report_csv(const ExperimentReport& report, std::ostream& out) {
    out << "n,m,N,budget,trials,hits,success_rate,mean_hit_iteration,median_hit_iteration,"
           "mean_evaluations,non_monotone_trials,optimal_hits,hull_order_hits\n";
    for (const auto& c : report.cells) {
        out << c.n << ',' << c.m << ',' << c.sample_size << ',' << c.budget << ',' << c.trials
            << ',' << c.hits << ',' << detail::format_double(c.success_rate) << ','
            << detail::format_double(c.mean_hit_iteration) << ','
            << detail::format_double(c.median_hit_iteration) << ','
            << detail::format_double(c.mean_evaluations) << ',' << c.non_monotone_trials << ','
            << c.optimal_hits << ',' << c.hull_order_hits << '\n';
    }
}

// Success-rate curve, gnuplot friendly.
inline void write_success_dat(const ExperimentReport& report, std::ostream& out) {
    out << "# n m N budget success_rate\n";
    for (const auto& c : report.cells) {
        out << c.n << ' ' << c.m << ' ' << c.sample_size << ' ' << c.budget << ' '
            << detail::format_double(c.success_rate) << '\n';
    }
}

} // namespace cemmas
