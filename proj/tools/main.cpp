#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lqriter/experiment.hpp"

namespace fs = std::filesystem;
using namespace lqriter;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string preset;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> max_iter;
    std::optional<double> tol;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_problem = true) {
    if (with_problem) {
        cmd->add_option("--config", args.config_path, "experiment config file");
        cmd->add_option("--preset", args.preset, "named problem preset (paper-eq27)");
    }
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "PRNG seed");
    cmd->add_option("--max-iter", args.max_iter, "iteration cap override");
    cmd->add_option("--tol", args.tol, "step tolerance override");
}

experiment::ExperimentConfig build_config(const CommonArgs& args) {
    experiment::ExperimentConfig config;
    if (!args.config_path.empty())
        config = experiment::load_config_file(args.config_path);
    if (!args.preset.empty()) config.preset = args.preset;
    if (args.seed) config.seed = *args.seed;
    double tol = args.tol.value_or(config.stop.tol);
    int max_iter = args.max_iter.value_or(config.stop.max_iter);
    config.stop = solvers::StopRule(tol, max_iter);
    return config;
}

int cmd_solve(const CommonArgs& args) {
    const auto config = build_config(args);
    const lqr::LqrProblem prob = experiment::resolve_problem(config);
    oracle::CertifiedSolution cert = oracle::solve_dare_bruteforce(prob);
    analysis::PepsWeight peps = analysis::construct_peps(prob, cert.p_star);
    fs::create_directories(args.out_dir);
    const std::string path = (fs::path(args.out_dir) / "solve_report.txt").string();
    experiment::write_solve_report(path, cert, peps);
    std::cout << "residual " << experiment::format_double(cert.residual) << " after "
              << cert.iterations_used << " iterations; report: " << path << "\n";
    return experiment::exit_ok;
}

int cmd_run(const CommonArgs& args) {
    const auto config = build_config(args);
    const bool is_inexact = config.algorithm == experiment::Algorithm::inexact_vi ||
                            config.algorithm == experiment::Algorithm::inexact_pi;
    experiment::RunOutcome outcome = experiment::run_experiment(config);
    if (is_inexact && !outcome.trace.init_stabilizing)
        std::cerr << "warning: the initial kernel/gain is not stabilizing for the "
                     "true plant; the robustness guarantees do not apply\n";
    fs::create_directories(args.out_dir);
    const std::string path = (fs::path(args.out_dir) / config.out).string();
    experiment::write_trace_csv_file(path, outcome.trace, outcome.trace.reason);
    std::cout << "trace: " << path << " (" << solvers::to_string(outcome.trace.reason)
              << ", " << outcome.trace.rows.size() << " rows)\n";
    return experiment::exit_code_for(outcome.trace.reason);
}

int cmd_reproduce(const std::string& figure, const CommonArgs& args) {
    const std::uint64_t seed = args.seed.value_or(1);
    experiment::Manifest manifest;
    if (figure == "fig2") manifest = experiment::reproduce_fig2(args.out_dir, seed);
    else if (figure == "fig3") manifest = experiment::reproduce_fig3(args.out_dir, seed);
    else {
        std::cerr << "unknown figure '" << figure << "' (expected fig2 or fig3)\n";
        return experiment::exit_usage;
    }
    for (const auto& entry : manifest)
        std::cout << entry.curve_id << " -> " << entry.file << " ("
                  << solvers::to_string(entry.reason) << ")\n";
    return experiment::exit_ok;
}

int cmd_analyze(const CommonArgs& args) {
    const auto config = build_config(args);
    const lqr::LqrProblem prob = experiment::resolve_problem(config);
    const std::uint64_t seed = args.seed.value_or(config.seed);
    experiment::AnalyzeReport report = experiment::analyze_problem(prob, seed);
    fs::create_directories(args.out_dir);
    const std::string path = (fs::path(args.out_dir) / "analyze_report.txt").string();
    experiment::write_analyze_report(path, report);
    std::cout << "delta0 " << experiment::format_double(report.delta0.radius)
              << ", delta1 " << experiment::format_double(report.delta1.radius)
              << ", report: " << path << "\n";
    return experiment::exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"iterative solvers and analysis tools for the discrete-time LQR problem"};
    app.require_subcommand(1);

    CommonArgs solve_args, run_args, rep_args, ana_args;
    std::string figure;

    CLI::App* solve = app.add_subcommand("solve", "certified Riccati solution");
    add_common(solve, solve_args);
    CLI::App* run = app.add_subcommand("run", "run one configured iteration, write a CSV trace");
    add_common(run, run_args);
    CLI::App* reproduce =
        app.add_subcommand("reproduce", "regenerate a benchmark trace set");
    reproduce->add_option("figure", figure, "fig2 or fig3")->required();
    add_common(reproduce, rep_args, /*with_problem=*/false);
    CLI::App* analyze =
        app.add_subcommand("analyze", "P_eps construction, ball probes, ISS sweep");
    add_common(analyze, ana_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e); // prints the message or help text
        return code == 0 ? 0 : experiment::exit_usage;
    }

    try {
        if (solve->parsed()) return cmd_solve(solve_args);
        if (run->parsed()) return cmd_run(run_args);
        if (reproduce->parsed()) return cmd_reproduce(figure, rep_args);
        if (analyze->parsed()) return cmd_analyze(ana_args);
    } catch (const InvalidArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return experiment::exit_usage;
    } catch (const UnstablePolicyError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return experiment::exit_unstable_policy;
    } catch (const SingularError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return experiment::exit_singularity;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return experiment::exit_oracle_failure;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return experiment::exit_usage;
    }
    return experiment::exit_usage;
}
