#include "lqriter/experiment.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include "lqriter/matlin.hpp"

namespace lqriter::experiment {

namespace fs = std::filesystem;
using lqr::Kernel;
using lqr::LqrProblem;
using solvers::StopRule;
using solvers::TermReason;

const char* const kPaperPresetName = "paper-eq27";

Algorithm algorithm_from_string(const std::string& s) {
    if (s == "vi") return Algorithm::vi;
    if (s == "pi") return Algorithm::pi;
    if (s == "inexact-vi") return Algorithm::inexact_vi;
    if (s == "inexact-pi") return Algorithm::inexact_pi;
    throw InvalidArgumentError("unknown algorithm: " + s);
}

const char* to_string(Algorithm a) {
    switch (a) {
        case Algorithm::vi: return "vi";
        case Algorithm::pi: return "pi";
        case Algorithm::inexact_vi: return "inexact-vi";
        case Algorithm::inexact_pi: return "inexact-pi";
    }
    return "?";
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (trim(s.substr(used)).empty()) return v;
    } catch (const std::exception&) {
    }
    throw InvalidArgumentError("not a number: '" + s + "'");
}

std::vector<double> parse_number_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(parse_double(tok));
    return out;
}

inexact::ScheduleKind schedule_kind_from_string(const std::string& s) {
    if (s == "exact") return inexact::ScheduleKind::exact;
    if (s == "constant-offset") return inexact::ScheduleKind::constant_offset;
    if (s == "geometric-vanishing") return inexact::ScheduleKind::geometric_vanishing;
    if (s == "geometric-plus-floor") return inexact::ScheduleKind::geometric_plus_floor;
    if (s == "custom-list") return inexact::ScheduleKind::custom_list;
    throw InvalidArgumentError("unknown schedule kind: " + s);
}

InitSpec parse_init(const std::string& value) {
    InitSpec init;
    if (value == "zero") {
        init.kind = InitSpec::Kind::zero;
        return init;
    }
    if (value.rfind("kernel:", 0) == 0) {
        init.kind = InitSpec::Kind::kernel_matrix;
        init.matrix = parse_matrix(value.substr(7));
        return init;
    }
    if (value.rfind("gain:", 0) == 0) {
        init.kind = InitSpec::Kind::gain_matrix;
        init.matrix = parse_matrix(value.substr(5));
        return init;
    }
    // identity or pstar, optionally scaled: "identity*0.5", "pstar*2"
    std::string base = value;
    double scale = 1.0;
    if (const auto star = value.find('*'); star != std::string::npos) {
        base = trim(value.substr(0, star));
        scale = parse_double(trim(value.substr(star + 1)));
    }
    if (base == "identity") {
        init.kind = InitSpec::Kind::scaled_identity;
    } else if (base == "pstar") {
        init.kind = InitSpec::Kind::scaled_pstar;
    } else {
        throw InvalidArgumentError("unknown init spec: '" + value + "'");
    }
    init.scale = scale;
    return init;
}

ScheduleSpec& ensure_schedule(ExperimentConfig& config) {
    if (!config.schedule) config.schedule.emplace();
    return *config.schedule;
}

} // namespace

Mat parse_matrix(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::string row_text;
    std::istringstream is(text);
    while (std::getline(is, row_text, ';')) {
        std::vector<double> row = parse_number_list(row_text);
        if (row.empty()) throw InvalidArgumentError("empty matrix row in '" + text + "'");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InvalidArgumentError("empty matrix literal");
    const int r = static_cast<int>(rows.size());
    const int c = static_cast<int>(rows[0].size());
    Mat m(r, c);
    for (int i = 0; i < r; ++i) {
        if (static_cast<int>(rows[i].size()) != c)
            throw InvalidArgumentError("ragged matrix literal");
        for (int j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig config;
    double tol = config.stop.tol;
    int max_iter = config.stop.max_iter;

    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidArgumentError("config line " + std::to_string(line_no) +
                                       ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "preset") config.preset = value;
        else if (key == "problem_file") config.problem_file = value;
        else if (key == "A") config.a = parse_matrix(value);
        else if (key == "B") config.b = parse_matrix(value);
        else if (key == "Q") config.q = parse_matrix(value);
        else if (key == "R") config.r = parse_matrix(value);
        else if (key == "algorithm") config.algorithm = algorithm_from_string(value);
        else if (key == "init") config.init = parse_init(value);
        else if (key == "schedule") ensure_schedule(config).kind = schedule_kind_from_string(value);
        else if (key == "rho") ensure_schedule(config).rho = parse_double(value);
        else if (key == "gamma") ensure_schedule(config).gamma = parse_double(value);
        else if (key == "floor") ensure_schedule(config).floor = parse_double(value);
        else if (key == "scales") ensure_schedule(config).scales = parse_number_list(value);
        else if (key == "tol") tol = parse_double(value);
        else if (key == "max_iter") max_iter = static_cast<int>(parse_double(value));
        else if (key == "seed") config.seed = static_cast<std::uint64_t>(parse_double(value));
        else if (key == "out") config.out = value;
        else
            throw InvalidArgumentError("config line " + std::to_string(line_no) +
                                       ": unknown key '" + key + "'");
    }
    config.stop = StopRule(tol, max_iter);
    return config;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgumentError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

lqr::LqrProblem paper_eq27() {
    const Mat a = Mat::from_rows({{1.01, 0.01, 0.0},
                                  {0.01, 1.01, 0.01},
                                  {0.0, 0.01, 1.01}});
    const Mat b = Mat::identity(3);
    return LqrProblem(lqr::Plant(a, b),
                      lqr::CostWeights(SymMat(0.001 * Mat::identity(3)),
                                       SymMat::identity(3)));
}

lqr::LqrProblem resolve_problem(const ExperimentConfig& config) {
    if (config.preset) {
        if (*config.preset != kPaperPresetName)
            throw InvalidArgumentError("unknown preset: " + *config.preset);
        return paper_eq27();
    }
    if (config.problem_file) {
        ExperimentConfig inner = load_config_file(*config.problem_file);
        if (inner.preset || inner.problem_file)
            throw InvalidArgumentError("problem file must define A, B, Q, R inline");
        return resolve_problem(inner);
    }
    if (!(config.a && config.b && config.q && config.r))
        throw InvalidArgumentError(
            "problem underspecified: need a preset, a problem_file, or all of A, B, Q, R");
    return LqrProblem(lqr::Plant(*config.a, *config.b),
                      lqr::CostWeights(SymMat(*config.q), SymMat(*config.r)));
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[48];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                   std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& os, const solvers::IterationTrace& trace,
                     TermReason reason) {
    os << "iter,frob_error,peps_error,dare_residual,closed_loop_stable,a_i,b_i,term_reason\n";
    auto cell = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
    if (trace.rows.empty()) {
        // the run failed before producing a kernel; emit the termination marker
        os << "0,,,,false,,," << to_string(reason) << "\n";
        return;
    }
    for (std::size_t i = 0; i < trace.rows.size(); ++i) {
        const solvers::TraceRow& row = trace.rows[i];
        os << row.iter << ',' << cell(row.frob_error) << ',' << cell(row.peps_error)
           << ',' << cell(row.dare_residual) << ','
           << (row.closed_loop_stable ? "true" : "false") << ',' << cell(row.a_i)
           << ',' << cell(row.b_i) << ','
           << (i + 1 == trace.rows.size() ? to_string(reason) : "") << "\n";
    }
}

void write_trace_csv_file(const std::string& path,
                          const solvers::IterationTrace& trace, TermReason reason) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open output file: " + path);
    write_trace_csv(out, trace, reason);
}

namespace {

inexact::RobustTrace as_robust(solvers::IterationTrace trace) {
    inexact::RobustTrace rt;
    static_cast<solvers::IterationTrace&>(rt) = std::move(trace);
    return rt;
}

Kernel resolve_kernel_init(const InitSpec& init, const LqrProblem& prob,
                           const std::optional<oracle::CertifiedSolution>& cert) {
    const int n = prob.state_dim();
    switch (init.kind) {
        case InitSpec::Kind::zero: return Kernel::zero(n);
        case InitSpec::Kind::scaled_identity:
            return Kernel::scaled_identity(n, init.scale);
        case InitSpec::Kind::scaled_pstar:
            if (!cert)
                throw InvalidArgumentError(
                    "init pstar*c requires the reference solution, which is unavailable");
            return Kernel(init.scale * cert->p_star.p);
        case InitSpec::Kind::kernel_matrix: return Kernel(SymMat(*init.matrix));
        case InitSpec::Kind::gain_matrix:
            throw InvalidArgumentError("a gain init is not a kernel init");
    }
    throw InvalidArgumentError("unresolved init spec");
}

inexact::EstimateSequence schedule_from_spec(const std::optional<ScheduleSpec>& spec,
                                             const lqr::Plant& plant) {
    inexact::ScheduleParams params;
    inexact::ScheduleKind kind = inexact::ScheduleKind::exact;
    if (spec) {
        kind = spec->kind;
        params.rho = spec->rho;
        params.gamma = spec->gamma;
        params.floor = spec->floor;
        params.scales = spec->scales;
    }
    return inexact::make_schedule(kind, params, plant);
}

} // namespace

RunOutcome run_experiment(const ExperimentConfig& config) {
    const LqrProblem prob = resolve_problem(config);
    RunOutcome outcome;
    try {
        outcome.certificate = oracle::solve_dare_bruteforce(prob);
        outcome.peps = analysis::construct_peps(prob, outcome.certificate->p_star);
    } catch (const Error&) {
        // no reference: traces simply omit the error columns
    }

    std::optional<solvers::Reference> ref;
    if (outcome.certificate) {
        ref = solvers::Reference{outcome.certificate->p_star, std::nullopt};
        if (outcome.peps) ref->peps = outcome.peps->peps;
    }

    const bool gain_init = config.init.kind == InitSpec::Kind::gain_matrix;
    auto pi_init = [&]() {
        if (gain_init) return solvers::PiInit::from_gain(lqr::Gain(*config.init.matrix));
        return solvers::PiInit::from_kernel(
            resolve_kernel_init(config.init, prob, outcome.certificate));
    };

    switch (config.algorithm) {
        case Algorithm::vi:
            if (gain_init)
                throw InvalidArgumentError("value iteration requires a kernel init");
            outcome.trace = as_robust(solvers::vi_run(
                prob, resolve_kernel_init(config.init, prob, outcome.certificate),
                config.stop, ref));
            break;
        case Algorithm::pi:
            outcome.trace = as_robust(solvers::pi_run(prob, pi_init(), config.stop, ref));
            break;
        case Algorithm::inexact_vi: {
            if (gain_init)
                throw InvalidArgumentError("value iteration requires a kernel init");
            const auto sched = schedule_from_spec(config.schedule, prob.plant);
            outcome.trace = inexact::inexact_vi_run(
                prob, resolve_kernel_init(config.init, prob, outcome.certificate),
                sched, config.stop, ref);
            break;
        }
        case Algorithm::inexact_pi: {
            const auto sched = schedule_from_spec(config.schedule, prob.plant);
            outcome.trace =
                inexact::inexact_pi_run(prob, pi_init(), sched, config.stop, ref);
            break;
        }
    }
    return outcome;
}

void write_manifest(const std::string& path, const Manifest& manifest) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open output file: " + path);
    for (const ManifestEntry& e : manifest) {
        out << e.curve_id << ',' << e.file << ',' << to_string(e.reason);
        if (e.plateau) out << ",plateau=" << (*e.plateau ? "true" : "false");
        out << "\n";
    }
}

namespace {

struct FigureContext {
    LqrProblem prob;
    oracle::CertifiedSolution cert;
    solvers::Reference ref;
};

FigureContext figure_context() {
    LqrProblem prob = paper_eq27();
    oracle::CertifiedSolution cert = oracle::solve_dare_bruteforce(prob);
    analysis::PepsWeight peps = analysis::construct_peps(prob, cert.p_star);
    solvers::Reference ref{cert.p_star, peps.peps};
    return {std::move(prob), std::move(cert), std::move(ref)};
}

} // namespace

Manifest reproduce_fig2(const std::string& out_dir, std::uint64_t /*seed*/) {
    // no sampling in this set; the seed is accepted for interface symmetry
    const FigureContext ctx = figure_context();
    const StopRule stop(1e-12, 60);
    const Kernel p_star = ctx.cert.p_star;

    struct Curve {
        const char* id;
        const char* file;
        bool is_vi;
        double pstar_scale;
    };
    const Curve curves[] = {
        {"vi-2pstar", "fig2_vi_2pstar.csv", true, 2.0},
        {"pi-2pstar", "fig2_pi_2pstar.csv", false, 2.0},
        {"vi-zero", "fig2_vi_zero.csv", true, 0.0},
        {"pi-zero", "fig2_pi_zero.csv", false, 0.0},
        {"pi-05pstar", "fig2_pi_05pstar.csv", false, 0.5},
        {"pi-07pstar", "fig2_pi_07pstar.csv", false, 0.7},
    };

    fs::create_directories(out_dir);
    Manifest manifest;
    for (const Curve& c : curves) {
        const Kernel p0(c.pstar_scale * p_star.p);
        const solvers::IterationTrace trace =
            c.is_vi ? solvers::vi_run(ctx.prob, p0, stop, ctx.ref)
                    : solvers::pi_run(ctx.prob, solvers::PiInit::from_kernel(p0),
                                      stop, ctx.ref);
        write_trace_csv_file((fs::path(out_dir) / c.file).string(), trace, trace.reason);
        manifest.push_back({c.id, c.file, trace.reason, std::nullopt});
    }
    write_manifest((fs::path(out_dir) / "manifest.txt").string(), manifest);
    return manifest;
}

Manifest reproduce_fig3(const std::string& out_dir, std::uint64_t /*seed*/) {
    const FigureContext ctx = figure_context();
    const StopRule stop(1e-12, 400);
    const Kernel p0(2.0 * ctx.cert.p_star.p);

    auto schedule = [&](inexact::ScheduleKind kind, double gamma, double floor) {
        inexact::ScheduleParams params;
        params.rho = 0.01;
        params.gamma = gamma;
        params.floor = floor;
        return inexact::make_schedule(kind, params, ctx.prob.plant);
    };
    const inexact::EstimateSequence vanishing =
        schedule(inexact::ScheduleKind::geometric_vanishing, 0.9, 0.0);
    const inexact::EstimateSequence floored =
        schedule(inexact::ScheduleKind::geometric_plus_floor, 0.6, 0.1);

    struct Curve {
        const char* id;
        const char* file;
        bool is_vi;
        const inexact::EstimateSequence* sched;
    };
    const Curve curves[] = {
        {"vi-vanishing", "fig3_vi_vanishing.csv", true, &vanishing},
        {"pi-vanishing", "fig3_pi_vanishing.csv", false, &vanishing},
        {"vi-floor", "fig3_vi_floor.csv", true, &floored},
        {"pi-floor", "fig3_pi_floor.csv", false, &floored},
    };

    fs::create_directories(out_dir);
    Manifest manifest;
    for (const Curve& c : curves) {
        const inexact::RobustTrace trace =
            c.is_vi ? inexact::inexact_vi_run(ctx.prob, p0, *c.sched, stop, ctx.ref)
                    : inexact::inexact_pi_run(ctx.prob,
                                              solvers::PiInit::from_kernel(p0),
                                              *c.sched, stop, ctx.ref);
        write_trace_csv_file((fs::path(out_dir) / c.file).string(), trace, trace.reason);
        manifest.push_back({c.id, c.file, trace.reason, trace.plateau_detected});
    }
    write_manifest((fs::path(out_dir) / "manifest.txt").string(), manifest);
    return manifest;
}

AnalyzeReport analyze_problem(const LqrProblem& prob, std::uint64_t seed) {
    AnalyzeReport report{oracle::solve_dare_bruteforce(prob),
                         analysis::PepsWeight{},
                         analysis::BallEstimate{},
                         analysis::BallEstimate{},
                         0.0,
                         0.0,
                         {},
                         {},
                         analysis::IssFit{},
                         analysis::IssFit{}};
    report.peps = analysis::construct_peps(prob, report.certificate.p_star);
    report.contraction_operator_bound =
        report.peps.contraction_at_optimum * report.peps.contraction_at_optimum;
    {
        const solvers::Reference ref{report.certificate.p_star, report.peps.peps};
        const auto trace =
            solvers::vi_run(prob, Kernel(2.0 * report.certificate.p_star.p),
                            StopRule(1e-12, 5000), ref);
        report.contraction_realized_vi =
            analysis::estimate_contraction(trace, ref, analysis::NormKind::peps);
    }

    Rng rng(seed);
    const double cap =
        std::max(1.0, 2.0 * matlin::frob_norm(report.certificate.p_star.p));
    report.delta0 = analysis::probe_delta0(prob, report.certificate.p_star, 64, cap, rng);
    report.delta1 = analysis::probe_delta1(prob, report.certificate.p_star,
                                           report.delta0.radius, 64, rng);

    // constant-offset sweep; horizon fixed, asymptote = mean of the last 20
    const Kernel p0(2.0 * report.certificate.p_star.p);
    const StopRule sweep_stop(1e-300, 500);
    const solvers::Reference ref{report.certificate.p_star, report.peps.peps};
    for (double rho : {1e-4, 2e-4, 4e-4, 8e-4}) {
        inexact::ScheduleParams params;
        params.rho = rho;
        const auto sched = inexact::make_schedule(
            inexact::ScheduleKind::constant_offset, params, prob.plant);
        auto asymptote = [](const inexact::RobustTrace& trace) {
            const std::size_t n = trace.rows.size();
            const std::size_t take = n < 20 ? n : std::size_t{20};
            double sum = 0.0;
            for (std::size_t i = n - take; i < n; ++i)
                sum += trace.rows[i].frob_error;
            return sum / static_cast<double>(take);
        };
        report.iss_points_vi.emplace_back(
            rho, asymptote(inexact::inexact_vi_run(prob, p0, sched, sweep_stop, ref)));
        report.iss_points_pi.emplace_back(
            rho, asymptote(inexact::inexact_pi_run(
                     prob, solvers::PiInit::from_kernel(p0), sched, sweep_stop, ref)));
    }
    report.iss_fit_vi = analysis::iss_gain_fit(report.iss_points_vi);
    report.iss_fit_pi = analysis::iss_gain_fit(report.iss_points_pi);
    return report;
}

namespace {

void write_matrix_rows(std::ostream& os, const std::string& key, const Mat& m) {
    for (int i = 0; i < m.rows(); ++i) {
        os << key << "_row_" << i << ":";
        for (int j = 0; j < m.cols(); ++j) os << ' ' << format_double(m(i, j));
        os << "\n";
    }
}

} // namespace

void write_analyze_report(const std::string& path, const AnalyzeReport& report) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open output file: " + path);
    os << "pstar_residual: " << format_double(report.certificate.residual) << "\n";
    os << "oracle_iterations: " << report.certificate.iterations_used << "\n";
    os << "contraction_at_optimum: "
       << format_double(report.peps.contraction_at_optimum) << "\n";
    os << "contraction_operator_bound: "
       << format_double(report.contraction_operator_bound) << "\n";
    os << "contraction_realized_vi: "
       << format_double(report.contraction_realized_vi) << "\n";
    os << "delta0_radius: " << format_double(report.delta0.radius) << "\n";
    os << "delta0_directions: " << report.delta0.directions_tested << "\n";
    os << "delta0_capped: " << (report.delta0.failure_direction ? "true" : "false")
       << "\n";
    os << "delta0_failures_outside_psd_cone: "
       << report.delta0.failures_outside_psd_cone << "\n";
    os << "delta1_radius: " << format_double(report.delta1.radius) << "\n";
    os << "delta1_directions: " << report.delta1.directions_tested << "\n";
    auto write_points = [&](const char* tag,
                            const std::vector<std::pair<double, double>>& pts) {
        for (const auto& [rho, err] : pts)
            os << tag << "_rho_" << format_double(rho) << ": " << format_double(err)
               << "\n";
    };
    write_points("iss_vi", report.iss_points_vi);
    write_points("iss_pi", report.iss_points_pi);
    os << "iss_vi_slope: " << format_double(report.iss_fit_vi.slope) << "\n";
    os << "iss_vi_r2: " << format_double(report.iss_fit_vi.r_squared) << "\n";
    os << "iss_pi_slope: " << format_double(report.iss_fit_pi.slope) << "\n";
    os << "iss_pi_r2: " << format_double(report.iss_fit_pi.r_squared) << "\n";
}

void write_solve_report(const std::string& path,
                        const oracle::CertifiedSolution& cert,
                        const analysis::PepsWeight& peps) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open output file: " + path);
    write_matrix_rows(os, "p_star", cert.p_star.p.mat());
    write_matrix_rows(os, "k_star", cert.k_star.k);
    os << "residual: " << format_double(cert.residual) << "\n";
    os << "iterations_used: " << cert.iterations_used << "\n";
    os << "contraction_at_optimum: " << format_double(peps.contraction_at_optimum)
       << "\n";
}

int exit_code_for(TermReason reason) {
    switch (reason) {
        case TermReason::converged: return exit_ok;
        case TermReason::unstable_policy: return exit_unstable_policy;
        case TermReason::max_iter: return exit_max_iter;
        case TermReason::singularity: return exit_singularity;
    }
    return exit_usage;
}

} // namespace lqriter::experiment
