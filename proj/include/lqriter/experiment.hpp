#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lqriter/analysis.hpp"
#include "lqriter/inexact.hpp"
#include "lqriter/oracle.hpp"

// Experiment orchestration shared by the command-line tool and the tests:
// config files, presets, trace CSVs, manifests and reports.
namespace lqriter::experiment {

enum class Algorithm { vi, pi, inexact_vi, inexact_pi };

Algorithm algorithm_from_string(const std::string& s);
const char* to_string(Algorithm a);

/// Initial kernel or gain. The pstar forms are resolved against the
/// reference solution, which is computed first.
struct InitSpec {
    enum class Kind { zero, scaled_identity, scaled_pstar, kernel_matrix, gain_matrix };
    Kind kind = Kind::zero;
    double scale = 1.0;
    std::optional<Mat> matrix;
};

struct ScheduleSpec {
    inexact::ScheduleKind kind = inexact::ScheduleKind::exact;
    double rho = 0.0;
    double gamma = 0.9;
    double floor = 0.0;
    std::vector<double> scales;
};

struct ExperimentConfig {
    // problem source: exactly one of preset / inline matrices / file
    std::optional<std::string> preset;
    std::optional<Mat> a, b, q, r;
    std::optional<std::string> problem_file;

    Algorithm algorithm = Algorithm::vi;
    InitSpec init;
    std::optional<ScheduleSpec> schedule;
    solvers::StopRule stop{};
    std::uint64_t seed = 1;
    std::string out = "trace.csv";
};

/// Parse the flat key-value config format (see README for the schema).
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

/// Parse a matrix literal: row-major, rows separated by ';',
/// entries by whitespace.
Mat parse_matrix(const std::string& text);

/// The benchmark system: tridiagonal A with 1.01 on the diagonal and 0.01
/// off it, B = I₃, Q = 0.001·I₃, R = I₃.
extern const char* const kPaperPresetName;
lqr::LqrProblem paper_eq27();

lqr::LqrProblem resolve_problem(const ExperimentConfig& config);

/// 17-significant-digit, locale-independent rendering used everywhere a
/// float reaches a file.
std::string format_double(double v);

/// Write the trace CSV: header
/// iter,frob_error,peps_error,dare_residual,closed_loop_stable,a_i,b_i,term_reason
/// one row per kernel plus the trailing termination marker on the last
/// row; unpopulated cells are empty.
void write_trace_csv(std::ostream& os, const solvers::IterationTrace& trace,
                     solvers::TermReason reason);
void write_trace_csv_file(const std::string& path,
                          const solvers::IterationTrace& trace,
                          solvers::TermReason reason);

struct RunOutcome {
    inexact::RobustTrace trace; // exact runs leave the robust fields unset
    std::optional<oracle::CertifiedSolution> certificate;
    std::optional<analysis::PepsWeight> peps;
};

/// Resolve the problem, compute the reference solution (best effort),
/// run the configured algorithm, and return everything needed to report.
RunOutcome run_experiment(const ExperimentConfig& config);

struct ManifestEntry {
    std::string curve_id;
    std::string file;
    solvers::TermReason reason;
    std::optional<bool> plateau; // inexact traces only
};

using Manifest = std::vector<ManifestEntry>;

void write_manifest(const std::string& path, const Manifest& manifest);

/// The six benchmark convergence traces: value iteration from 2P* and 0,
/// policy iteration from kernels 2P*, 0, 0.5P* and 0.7P*; 60-iteration
/// horizon. Files land in out_dir together with manifest.txt.
Manifest reproduce_fig2(const std::string& out_dir, std::uint64_t seed);

/// The four robustness traces: {vi, pi} × {vanishing 0.9^i·0.01·I,
/// floor (0.6^i+0.1)·0.01·I}, kernel-initialized at 2P*, 400-iteration
/// horizon.
Manifest reproduce_fig3(const std::string& out_dir, std::uint64_t seed);

struct AnalyzeReport {
    oracle::CertifiedSolution certificate;
    analysis::PepsWeight peps;
    analysis::BallEstimate delta0;
    analysis::BallEstimate delta1;
    // two views of the per-step contraction factor: the squared weighted
    // norm of the closed loop at the optimum, and the tightest ratio
    // realized by a run from 2·P*. The trajectory-wide factor lies at or
    // above both; neither view dominates the other.
    double contraction_operator_bound = 0.0;
    double contraction_realized_vi = 0.0;
    std::vector<std::pair<double, double>> iss_points_vi;
    std::vector<std::pair<double, double>> iss_points_pi;
    analysis::IssFit iss_fit_vi;
    analysis::IssFit iss_fit_pi;
};

/// Reference solution, P_ε weight, ball probes and the ISS sweep for one
/// problem. Deterministic for a fixed seed.
AnalyzeReport analyze_problem(const lqr::LqrProblem& prob, std::uint64_t seed);

void write_analyze_report(const std::string& path, const AnalyzeReport& report);
void write_solve_report(const std::string& path,
                        const oracle::CertifiedSolution& cert,
                        const analysis::PepsWeight& peps);

/// Process exit codes used by the command-line tool.
enum ExitCode {
    exit_ok = 0,
    exit_usage = 1,
    exit_unstable_policy = 2,
    exit_max_iter = 3,
    exit_singularity = 4,
    exit_oracle_failure = 5,
};

int exit_code_for(solvers::TermReason reason);

} // namespace lqriter::experiment
