// Command-line front end: instance generation, solver runs, exact oracle
// queries, sampler bound checks, and experiment campaigns. All subcommands
// echo their fully resolved configuration and derive every random choice from
// an explicit seed, so any output can be reproduced from its own JSON.
//
// Exit codes: 0 success, 1 usage error, 2 capacity or generation failure,
// 3 failed --assert check.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cemmas/claims.hpp"
#include "cemmas/experiment.hpp"
#include "cemmas/instance.hpp"
#include "cemmas/optimizer.hpp"
#include "cemmas/oracle.hpp"

namespace {

using nlohmann::json;

std::uint64_t fresh_seed() {
    std::random_device rd;
    const auto now = static_cast<std::uint64_t>(
        std::chrono::steady_clock::now().time_since_epoch().count());
    return cemmas::derive_seed(now, {rd(), rd()});
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
}

void emit(const json& j, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << '\n';
    } else {
        write_text(path, j.dump(2) + "\n");
    }
}

struct GenArgs {
    std::string family;
    int n = 0;
    int m = 0;
    std::optional<std::uint64_t> seed;
    std::string out;
};

int run_gen(const GenArgs& a) {
    const std::uint64_t seed = a.seed ? *a.seed : fresh_seed();
    json config{{"family", a.family}, {"n", a.n}, {"seed", seed}};
    cemmas::Instance inst = [&] {
        if (a.family == "g1") return cemmas::make_g1(a.n);
        const int m = a.m > 0 ? a.m : 2 * a.n;
        config["m"] = m;
        return cemmas::make_grid(a.n, m, seed).instance;
    }();
    const std::string path = !a.out.empty()
                                 ? a.out
                                 : a.family + "_" + std::to_string(a.n) + ".json";
    cemmas::save_instance(inst, path);
    json echo{{"config", config}, {"path", path}, {"hash", cemmas::instance_hash_hex(inst)}};
    if (inst.kind() == cemmas::InstanceKind::Grid) {
        const auto meta = cemmas::grid_meta(inst);
        echo["hullSize"] = meta.hull.size();
        echo["interiorCount"] = meta.interior_count;
    }
    std::cout << echo.dump(2) << '\n';
    return 0;
}

struct SolveArgs {
    std::string instance_path;
    std::string scheme = "edge";
    int N = 1;
    int M = 1;
    double rho = 1.0;
    long long iters = 0;
    std::optional<double> target;
    bool target_oracle = false;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    bool timing = false;
    std::string trace_path = "trace.csv";
    std::string summary_path = "summary.json";
};

int run_solve(const SolveArgs& a) {
    const auto inst = cemmas::load_instance(a.instance_path);
    cemmas::CEConfig cfg;
    cfg.N = a.N;
    cfg.M = a.M;
    cfg.rho = a.rho;
    cfg.scheme = cemmas::scheme_from_name(a.scheme);
    cfg.max_iterations = a.iters;
    cfg.seed = a.seed ? *a.seed : fresh_seed();
    cfg.threads = a.threads;

    std::optional<cemmas::Tour> known_optimum;
    if (a.target_oracle) {
        const auto oracle = cemmas::solve_exact(inst);
        cfg.target_cost = oracle.optimal_cost;
        known_optimum = oracle.optimal_tour;
    } else if (a.target) {
        cfg.target_cost = *a.target;
    } else if (inst.kind() == cemmas::InstanceKind::G1) {
        cfg.target_cost = static_cast<double>(inst.n());
        std::vector<int> p(inst.n());
        std::iota(p.begin(), p.end(), 1);
        known_optimum = cemmas::Tour(p);
    }

    const auto trace = cemmas::run(inst, cfg, known_optimum);
    std::ostringstream csv;
    cemmas::write_trace_csv(trace, csv, a.timing);
    write_text(a.trace_path, csv.str());
    auto summary = cemmas::summary_json(inst, cfg, trace);
    summary["tracePath"] = a.trace_path;
    write_text(a.summary_path, summary.dump(2) + "\n");
    std::cout << summary.dump(2) << '\n';
    return 0;
}

int run_oracle(const std::string& instance_path, const std::string& method, const std::string& out) {
    const auto inst = cemmas::load_instance(instance_path);
    const auto result = method == "held-karp"     ? cemmas::held_karp(inst)
                        : method == "brute-force" ? cemmas::brute_force_optimum(inst)
                                                  : cemmas::solve_exact(inst);
    json j{{"config", {{"instance", instance_path}, {"method", method}}},
           {"instanceHash", cemmas::instance_hash_hex(inst)},
           {"optimalCost", result.optimal_cost},
           {"optimalTour", result.optimal_tour.perm()},
           {"method", result.method == cemmas::OracleMethod::HeldKarp ? "held-karp" : "brute-force"}};
    emit(j, out);
    return 0;
}

struct ClaimsArgs {
    std::string claim;
    int n = 0;
    std::string scheme;
    long long trials = 100000;
    int k = 2;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    bool assert_pass = false;
    std::string out;
};

int run_claims(const ClaimsArgs& a) {
    const auto id = cemmas::claim_from_name(a.claim);
    const auto scheme = a.scheme.empty() ? cemmas::claim_scheme(id)
                                         : cemmas::scheme_from_name(a.scheme);
    const std::uint64_t seed = a.seed ? *a.seed : fresh_seed();
    const auto check = cemmas::estimate_claim(id, a.n, scheme, a.trials, seed, a.threads, a.k);
    auto j = cemmas::bound_check_to_json(check);
    j["config"] = {{"claim", a.claim},   {"n", a.n}, {"scheme", cemmas::scheme_name(scheme)},
                   {"trials", a.trials}, {"k", a.k}, {"seed", seed},
                   {"threads", a.threads}};
    emit(j, a.out);
    if (a.assert_pass && !cemmas::passed(check)) return 3;
    return 0;
}

struct ExperimentArgs {
    std::string design_path;
    std::string out_dir = ".";
    int threads = 0;
    bool assert_pass = false;
    double assert_success = 0.0;
};

int run_experiment(const ExperimentArgs& a) {
    auto design = cemmas::load_design(a.design_path);
    if (a.threads > 0) design.threads = a.threads;
    const auto report = cemmas::runtime_experiment(design);

    const std::string base = a.out_dir + "/report";
    write_text(base + ".json", cemmas::report_to_json(report).dump(2) + "\n");
    std::ostringstream csv;
    cemmas::write_report_csv(report, csv);
    write_text(base + ".csv", csv.str());
    std::ostringstream dat;
    cemmas::write_success_dat(report, dat);
    write_text(base + ".dat", dat.str());
    std::cout << cemmas::report_to_json(report).dump(2) << '\n';

    if (a.assert_pass) {
        for (const auto& cell : report.cells) {
            if (cell.success_rate < a.assert_success) return 3;
        }
    }
    return 0;
}

int run_trace_plot(const std::string& trace_path, const std::string& prefix) {
    std::ifstream in(trace_path);
    if (!in) throw std::runtime_error("cannot open trace: " + trace_path);
    std::string header;
    std::getline(in, header);
    if (header.rfind("t,best_cost,best_so_far", 0) != 0)
        throw std::runtime_error("not a trace csv: " + trace_path);
    std::ostringstream best, shared;
    best << "# t best_so_far\n";
    shared << "# t shared_edges\n";
    std::string line;
    bool any_shared = false;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string t, best_cost, best_so_far, shared_edges, wall;
        std::getline(ls, t, ',');
        std::getline(ls, best_cost, ',');
        std::getline(ls, best_so_far, ',');
        std::getline(ls, shared_edges, ',');
        std::getline(ls, wall, ',');
        best << t << ' ' << best_so_far << '\n';
        if (!shared_edges.empty()) {
            shared << t << ' ' << shared_edges << '\n';
            any_shared = true;
        }
    }
    write_text(prefix + "_best.dat", best.str());
    if (any_shared) write_text(prefix + "_shared.dat", shared.str());
    std::cout << "wrote " << prefix << "_best.dat"
              << (any_shared ? " and " + prefix + "_shared.dat" : "") << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cross-entropy / max-min ant system TSP harness"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "generate an instance file");
    gen_cmd->add_option("--family", gen.family, "g1 or grid")
        ->required()
        ->check(CLI::IsMember({"g1", "grid"}));
    gen_cmd->add_option("--n", gen.n, "vertex count")->required();
    gen_cmd->add_option("--m", gen.m, "grid side (default 2n)");
    std::uint64_t gen_seed = 0;
    auto* gen_seed_opt = gen_cmd->add_option("--seed", gen_seed, "generation seed");
    gen_cmd->add_option("--out", gen.out, "output path (default <family>_<n>.json)");

    SolveArgs solve;
    auto* solve_cmd = app.add_subcommand("solve", "run the optimizer on an instance");
    solve_cmd->add_option("--instance", solve.instance_path, "instance json")->required();
    solve_cmd->add_option("--scheme", solve.scheme, "vertex or edge")
        ->check(CLI::IsMember({"vertex", "edge"}));
    solve_cmd->add_option("--N", solve.N, "sample size per iteration");
    solve_cmd->add_option("--M", solve.M, "elite size");
    solve_cmd->add_option("--rho", solve.rho, "smoothing parameter in (0,1]");
    solve_cmd->add_option("--iters", solve.iters, "iteration budget (0 = family default)");
    double solve_target = 0.0;
    auto* target_opt = solve_cmd->add_option("--target", solve_target, "early-stop cost");
    solve_cmd->add_flag("--target-oracle", solve.target_oracle,
                        "early-stop at the exact optimum (small instances)");
    std::uint64_t solve_seed = 0;
    auto* solve_seed_opt = solve_cmd->add_option("--seed", solve_seed, "run seed");
    solve_cmd->add_option("--threads", solve.threads, "sampling worker threads");
    solve_cmd->add_flag("--timing", solve.timing, "write measured wall_nanos into the trace");
    solve_cmd->add_option("--trace", solve.trace_path, "trace csv path");
    solve_cmd->add_option("--summary", solve.summary_path, "summary json path");

    std::string oracle_instance, oracle_method = "auto", oracle_out;
    auto* oracle_cmd = app.add_subcommand("oracle", "exact optimum of an instance");
    oracle_cmd->add_option("--instance", oracle_instance, "instance json")->required();
    oracle_cmd->add_option("--method", oracle_method, "auto, held-karp or brute-force")
        ->check(CLI::IsMember({"auto", "held-karp", "brute-force"}));
    oracle_cmd->add_option("--out", oracle_out, "output path (default stdout)");

    ClaimsArgs claims;
    auto* claims_cmd = app.add_subcommand("claims", "sampler bound checks C1..C6");
    claims_cmd->add_option("--claim", claims.claim, "C1..C6")->required();
    claims_cmd->add_option("--n", claims.n, "instance size")->required();
    claims_cmd->add_option("--scheme", claims.scheme, "vertex or edge (default per claim)");
    claims_cmd->add_option("--trials", claims.trials, "Monte Carlo draws");
    claims_cmd->add_option("--k", claims.k, "exchange order for C1 (2 or 3)");
    std::uint64_t claims_seed = 0;
    auto* claims_seed_opt = claims_cmd->add_option("--seed", claims_seed, "sampling seed");
    claims_cmd->add_option("--threads", claims.threads, "worker threads");
    claims_cmd->add_flag("--assert", claims.assert_pass, "exit 3 unless the check passes");
    claims_cmd->add_option("--out", claims.out, "output path (default stdout)");

    ExperimentArgs exp;
    auto* exp_cmd = app.add_subcommand("experiment", "run a campaign from a design file");
    exp_cmd->add_option("--design", exp.design_path, "design json")->required();
    exp_cmd->add_option("--out-dir", exp.out_dir, "directory for report.{json,csv,dat}");
    exp_cmd->add_option("--threads", exp.threads, "override design threads");
    exp_cmd->add_flag("--assert", exp.assert_pass, "exit 3 if any cell misses --assert-success");
    exp_cmd->add_option("--assert-success", exp.assert_success, "minimum per-cell success rate");

    std::string plot_trace, plot_prefix = "trace";
    auto* plot_cmd = app.add_subcommand("trace-plot", "emit gnuplot .dat files from a trace csv");
    plot_cmd->add_option("--trace", plot_trace, "trace csv")->required();
    plot_cmd->add_option("--out-prefix", plot_prefix, "output prefix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (gen_cmd->parsed()) {
            if (*gen_seed_opt) gen.seed = gen_seed;
            return run_gen(gen);
        }
        if (solve_cmd->parsed()) {
            if (*solve_seed_opt) solve.seed = solve_seed;
            if (*target_opt) solve.target = solve_target;
            return run_solve(solve);
        }
        if (oracle_cmd->parsed()) return run_oracle(oracle_instance, oracle_method, oracle_out);
        if (claims_cmd->parsed()) {
            if (*claims_seed_opt) claims.seed = claims_seed;
            return run_claims(claims);
        }
        if (exp_cmd->parsed()) return run_experiment(exp);
        if (plot_cmd->parsed()) return run_trace_plot(plot_trace, plot_prefix);
    } catch (const cemmas::capacity_error& e) {
        std::cerr << "capacity error: " << e.what() << '\n';
        return 2;
    } catch (const cemmas::generation_error& e) {
        std::cerr << "generation error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
