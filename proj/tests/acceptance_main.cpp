// Acceptance suite: one self-contained check per numbered criterion, one
// pass/fail line each, nonzero exit when any fail. Every tolerance is
// pinned here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "lqriter/analysis.hpp"
#include "lqriter/experiment.hpp"
#include "lqriter/inexact.hpp"
#include "lqriter/matlin.hpp"
#include "lqriter/solvers.hpp"

using namespace lqriter;
using lqr::Gain;
using lqr::Kernel;
using lqr::LqrProblem;
using lqriter::testing::frob_diff;
using matlin::frob_norm;
using solvers::PiInit;
using solvers::Reference;
using solvers::StopRule;
using solvers::TermReason;

namespace {

namespace fs = std::filesystem;

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct BenchSetup {
    LqrProblem prob;
    Kernel p_star;
    Gain k_star;
    Reference ref;
};

BenchSetup bench_setup() {
    LqrProblem prob = experiment::paper_eq27();
    auto cert = oracle::solve_dare_bruteforce(prob);
    analysis::PepsWeight peps = analysis::construct_peps(prob, cert.p_star);
    return {prob, cert.p_star, cert.k_star, Reference{cert.p_star, peps.peps}};
}

std::string fmt(double v) { return experiment::format_double(v); }

// 1. VI limit, PI limit and the brute-force solution pairwise within 1e-7
//    on 100 seeded random stabilizable problems, in under 60 s.
Outcome criterion_oracle_agreement() {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(1001);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 5);
        const int m = 1 + static_cast<int>(rng.next_u64() % 3);
        const LqrProblem prob = testing::random_stabilizable_problem(rng, n, m);
        const auto cert = oracle::solve_dare_bruteforce(prob);

        const auto vi = solvers::vi_run(prob, Kernel::zero(n), StopRule(1e-13, 500000));
        if (vi.reason != TermReason::converged)
            return {false, "vi did not converge on trial " + std::to_string(trial)};
        const auto pi = solvers::pi_run(prob, PiInit::from_gain(cert.k_star),
                                        StopRule(1e-13, 2000));
        if (pi.reason != TermReason::converged)
            return {false, "pi did not converge on trial " + std::to_string(trial)};

        const SymMat& v = vi.final_kernel().p;
        const SymMat& p = pi.final_kernel().p;
        const SymMat& o = cert.p_star.p;
        const double d = std::max({frob_diff(v, p), frob_diff(v, o), frob_diff(p, o)});
        worst = std::max(worst, d);
        if (d > 1e-7)
            return {false, "limit disagreement " + fmt(d) + " on trial " +
                               std::to_string(trial)};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs >= 60.0) return {false, "took " + fmt(secs) + " s (budget 60 s)"};
    return {true, "worst pairwise gap " + fmt(worst) + ", " + fmt(secs) + " s"};
}

// 2. The six benchmark convergence behaviors.
Outcome criterion_fig2(const BenchSetup& s) {
    Outcome out;
    std::ostringstream detail;
    bool bcde_clean = true;

    // (a) residual 1e-10 within a 60-iteration budget
    for (double scale : {2.0, 0.0}) {
        const auto trace = solvers::vi_run(s.prob, Kernel(scale * s.p_star.p),
                                           StopRule(1e-14, 60), s.ref);
        const double residual_at_60 = trace.rows.back().dare_residual;
        long first_hit = -1;
        const auto longer = solvers::vi_run(s.prob, Kernel(scale * s.p_star.p),
                                            StopRule(1e-14, 2000), s.ref);
        for (const auto& row : longer.rows)
            if (row.dare_residual <= 1e-10) {
                first_hit = row.iter;
                break;
            }
        if (residual_at_60 > 1e-10) {
            out.pass = false;
            detail << "(a) vi from " << fmt(scale) << "*Pstar: residual "
                   << fmt(residual_at_60) << " at iteration 60 exceeds 1e-10"
                   << " (threshold first reached at iteration " << first_hit
                   << "); ";
        }
    }

    // (b) policy iteration from the zero kernel dies immediately
    const auto zero = solvers::pi_run(s.prob, PiInit::from_kernel(Kernel::zero(3)),
                                      StopRule(1e-12, 60), s.ref);
    if (zero.reason != TermReason::unstable_policy || zero.rows.size() != 1 ||
        zero.rows[0].closed_loop_stable) {
        out.pass = false;
        bcde_clean = false;
        detail << "(b) expected unstable-policy at i=0; ";
    }

    // (c) from 0.5*Pstar the error decreases strictly from i>=1
    const auto half = solvers::pi_run(s.prob, PiInit::from_kernel(Kernel(0.5 * s.p_star.p)),
                                      StopRule(1e-9, 60), s.ref);
    if (half.reason != TermReason::converged) {
        out.pass = false;
        bcde_clean = false;
        detail << "(c) did not converge; ";
    }
    const auto he = half.frob_errors();
    for (std::size_t i = 1; i + 1 < he.size(); ++i)
        if (!(he[i + 1] < he[i])) {
            out.pass = false;
            bcde_clean = false;
            detail << "(c) error rose at i=" << i + 1 << "; ";
        }

    // (d) from 0.7*Pstar it decreases strictly from i=0
    const auto seventy = solvers::pi_run(
        s.prob, PiInit::from_kernel(Kernel(0.7 * s.p_star.p)), StopRule(1e-9, 60), s.ref);
    if (seventy.reason != TermReason::converged) {
        out.pass = false;
        bcde_clean = false;
        detail << "(d) did not converge; ";
    }
    const auto se = seventy.frob_errors();
    for (std::size_t i = 0; i + 1 < se.size(); ++i)
        if (!(se[i + 1] < se[i])) {
            out.pass = false;
            bcde_clean = false;
            detail << "(d) error rose at i=" << i + 1 << "; ";
        }

    // (e) from 2*Pstar the kernels are semidefinite-monotone
    const auto above = solvers::pi_run(
        s.prob, PiInit::from_kernel(Kernel(2.0 * s.p_star.p)), StopRule(1e-12, 60), s.ref);
    for (std::size_t i = 0; i + 1 < above.rows.size(); ++i) {
        const SymMat gap = SymMat::from_average(above.rows[i].p.p.mat() -
                                                above.rows[i + 1].p.p.mat());
        if (matlin::min_eig(gap) < -1e-8) {
            out.pass = false;
            bcde_clean = false;
            detail << "(e) monotonicity violated at i=" << i << "; ";
        }
    }

    if (out.pass) detail << "(a)-(e) hold";
    else if (bcde_clean) detail << "(b)-(e) hold";
    out.detail = detail.str();
    return out;
}

// 3. Vanishing schedules recover the optimum within 200 iterations; floor
//    schedules settle at a strictly positive plateau.
Outcome criterion_fig3(const BenchSetup& s) {
    const Kernel p0(2.0 * s.p_star.p);
    auto schedule = [&](inexact::ScheduleKind kind, double gamma, double floor) {
        inexact::ScheduleParams params;
        params.rho = 0.01;
        params.gamma = gamma;
        params.floor = floor;
        return inexact::make_schedule(kind, params, s.prob.plant);
    };
    const auto vanishing =
        schedule(inexact::ScheduleKind::geometric_vanishing, 0.9, 0.0);
    const auto floored =
        schedule(inexact::ScheduleKind::geometric_plus_floor, 0.6, 0.1);

    std::ostringstream detail;
    for (bool is_vi : {true, false}) {
        const auto van =
            is_vi ? inexact::inexact_vi_run(s.prob, p0, vanishing, StopRule(1e-15, 200), s.ref)
                  : inexact::inexact_pi_run(s.prob, PiInit::from_kernel(p0), vanishing,
                                            StopRule(1e-15, 200), s.ref);
        double best = 1.0;
        for (const auto& row : van.rows) best = std::min(best, row.frob_error);
        if (!(best < 1e-6))
            return {false, std::string(is_vi ? "vi" : "pi") +
                               " vanishing error floor " + fmt(best) +
                               " after 200 iterations"};

        const auto flo =
            is_vi ? inexact::inexact_vi_run(s.prob, p0, floored, StopRule(1e-15, 2000), s.ref)
                  : inexact::inexact_pi_run(s.prob, PiInit::from_kernel(p0), floored,
                                            StopRule(1e-15, 2000), s.ref);
        const auto errors = flo.frob_errors();
        if (errors.size() < 20) return {false, "floor run too short"};
        double lo = errors.back(), hi = errors.back();
        for (std::size_t i = errors.size() - 20; i < errors.size(); ++i) {
            lo = std::min(lo, errors[i]);
            hi = std::max(hi, errors[i]);
        }
        if (!(hi - lo < 1e-10 && lo > 1e-8))
            return {false, std::string(is_vi ? "vi" : "pi") + " floor plateau spread " +
                               fmt(hi - lo) + " at level " + fmt(lo)};
        detail << (is_vi ? "vi" : "pi") << " plateau " << fmt(lo) << " ";
    }
    return {true, detail.str()};
}

// 4. Weighted-norm contraction certificates for VI.
Outcome criterion_contraction(const BenchSetup& s) {
    auto ratios_ok = [&](const solvers::IterationTrace& trace, const char* tag,
                         Outcome& out) {
        const auto errors = trace.peps_errors();
        for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
            if (errors[i] < 1e-13) break;
            if (!(errors[i + 1] / errors[i] <= 1.0 - 1e-10)) {
                out.pass = false;
                out.detail = std::string(tag) + ": ratio " +
                             fmt(errors[i + 1] / errors[i]) + " at i=" +
                             std::to_string(i);
                return;
            }
        }
    };

    Outcome out;
    const auto from_above = solvers::vi_run(s.prob, Kernel(2.0 * s.p_star.p),
                                            StopRule(1e-12, 2000), s.ref);
    ratios_ok(from_above, "from 2*Pstar", out);
    if (!out.pass) return out;

    Rng rng(1004);
    const auto d0 = analysis::probe_delta0(s.prob, s.p_star, 64, 1.0, rng);
    for (int trial = 0; trial < 50; ++trial) {
        const SymMat dir = analysis::random_sym_direction(3, rng);
        const double t = rng.uniform(0.0, 1.0) * 0.5 * d0.radius;
        const Kernel p0(SymMat::from_average(s.p_star.p.mat() + t * dir.mat()));
        const auto trace = solvers::vi_run(s.prob, p0, StopRule(1e-12, 2000), s.ref);
        ratios_ok(trace, "inside the probed ball", out);
        if (!out.pass) return out;
    }
    out.detail = "every ratio <= 1 - 1e-10 (52 runs)";
    return out;
}

// 5. One-step Newton bound inside the probed delta1 ball.
Outcome criterion_quadratic_rate(const BenchSetup& s) {
    Rng rng(1005);
    const auto d0 = analysis::probe_delta0(s.prob, s.p_star, 64, 1.0, rng);
    const auto d1 = analysis::probe_delta1(s.prob, s.p_star, d0.radius, 64, rng);
    if (!(d1.radius > 0.0)) return {false, "empty delta1 ball"};

    double worst_margin = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const SymMat dir = analysis::random_sym_direction(3, rng);
        const double t = rng.uniform(0.0, 1.0) * 0.999 * d1.radius;
        const Kernel p0(SymMat::from_average(s.p_star.p.mat() + t * dir.mat()));
        const double e0 = frob_diff(p0.p, s.p_star.p);
        const Kernel p1 = solvers::pi_step_from_kernel(s.prob, p0);
        const double e1 = frob_diff(p1.p, s.p_star.p);
        const auto qc = analysis::quadratic_constants(s.prob, s.p_star, p0);
        const double bound = qc.a0 * qc.a1 * e0 * e0 + 1e-10;
        if (!(e1 <= bound))
            return {false, "bound violated: e+ = " + fmt(e1) + " > " + fmt(bound)};
        worst_margin = std::max(worst_margin, e1 / bound);
    }
    return {true, "delta1 " + fmt(d1.radius) + ", worst e+/bound " + fmt(worst_margin)};
}

// 6. Contractive dynamics: both algorithms converge from arbitrary PSD
//    kernels, policy iteration without any stabilizing gain supplied.
Outcome criterion_contractive_dynamics() {
    Rng rng(1006);
    int vi_failures = 0;
    int pi_failures = 0;
    std::string first_failure;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 4);
        const int m = 1 + static_cast<int>(rng.next_u64() % 3);
        const Mat a = testing::random_a_with_norm(rng, n, rng.uniform(0.2, 0.95));
        const Mat b = testing::random_mat(rng, n, m);
        const Mat h = testing::random_mat(rng, m, m);
        const LqrProblem prob(
            lqr::Plant(a, b),
            lqr::CostWeights(testing::random_psd(rng, n),
                             SymMat::from_average(transpose(h) * h +
                                                  0.1 * Mat::identity(m))));
        for (int k = 0; k < 10; ++k) {
            const Kernel p0(testing::random_psd(rng, n, 3.0));
            const auto vi = solvers::vi_run(prob, p0, StopRule(1e-12, 100000));
            if (vi.reason != TermReason::converged ||
                vi.rows.back().dare_residual > 1e-8)
                ++vi_failures;
            const auto pi =
                solvers::pi_run(prob, PiInit::from_kernel(p0), StopRule(1e-12, 2000));
            if (pi.reason != TermReason::converged ||
                pi.rows.back().dare_residual > 1e-8) {
                ++pi_failures;
                if (first_failure.empty())
                    first_failure = "trial " + std::to_string(trial) + " (" +
                                    solvers::to_string(pi.reason) +
                                    ": the PSD init induced a destabilizing gain)";
            }
        }
    }
    std::ostringstream detail;
    detail << "vi " << 1000 - vi_failures << "/1000, pi " << 1000 - pi_failures
           << "/1000 converged";
    if (!first_failure.empty()) detail << "; first pi failure: " << first_failure;
    return {vi_failures == 0 && pi_failures == 0, detail.str()};
}

// 7. Constant-offset sweep: asymptotic error monotone in rho and linear
//    through the origin with r^2 >= 0.9.
Outcome criterion_iss_shape(const BenchSetup& s) {
    const Kernel p0(2.0 * s.p_star.p);
    std::ostringstream detail;
    for (bool is_vi : {true, false}) {
        std::vector<std::pair<double, double>> points;
        for (double rho : {1e-4, 2e-4, 4e-4, 8e-4}) {
            inexact::ScheduleParams params;
            params.rho = rho;
            const auto sched = inexact::make_schedule(
                inexact::ScheduleKind::constant_offset, params, s.prob.plant);
            const auto trace =
                is_vi ? inexact::inexact_vi_run(s.prob, p0, sched,
                                                StopRule(1e-300, 500), s.ref)
                      : inexact::inexact_pi_run(s.prob, PiInit::from_kernel(p0), sched,
                                                StopRule(1e-300, 500), s.ref);
            double sum = 0.0;
            for (std::size_t i = trace.rows.size() - 20; i < trace.rows.size(); ++i)
                sum += trace.rows[i].frob_error;
            points.emplace_back(rho, sum / 20.0);
        }
        for (std::size_t i = 0; i + 1 < points.size(); ++i)
            if (!(points[i].second <= points[i + 1].second))
                return {false, std::string(is_vi ? "vi" : "pi") +
                                   " asymptotic error not monotone in rho"};
        const auto fit = analysis::iss_gain_fit(points);
        if (!(fit.r_squared >= 0.9))
            return {false, std::string(is_vi ? "vi" : "pi") + " linear fit r2 " +
                               fmt(fit.r_squared)};
        detail << (is_vi ? "vi" : "pi") << " slope " << fmt(fit.slope) << " r2 "
               << fmt(fit.r_squared) << " ";
    }
    return {true, detail.str()};
}

// 8. Kernel-level contracts: Lyapunov residuals, the vectorization
//    identity, eigendecomposition reconstruction.
Outcome criterion_kernel_correctness() {
    Rng rng(1008);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_u64() % 5);
        const Mat x = testing::random_stable_mat(rng, n, rng.uniform(0.2, 0.9));
        const SymMat w = testing::random_psd(rng, n);
        const SymMat y = matlin::dlyap(x, w);
        const Mat residual = transpose(x) * y.mat() * x - y.mat() + w.mat();
        if (!(frob_norm(residual) <= 1e-8 * std::max(1.0, frob_norm(w))))
            return {false, "dlyap residual " + fmt(frob_norm(residual))};
    }
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 5);
        const Mat x = testing::random_mat(rng, n, n, -1.5, 1.5);
        const Mat y = testing::random_mat(rng, n, n, -1.5, 1.5);
        const Mat lhs = matlin::vec(transpose(x) * y * x - y);
        const Mat rhs = matlin::pmat(x) * matlin::vec(y);
        if (!(frob_norm(lhs - rhs) <= 1e-10 * std::max(1.0, frob_norm(rhs))))
            return {false, "vectorization identity off by " + fmt(frob_norm(lhs - rhs))};
    }
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 8);
        const SymMat m = testing::random_sym(rng, n, 5.0);
        const auto eig = matlin::sym_eig(m);
        Mat lambda(n, n);
        for (int i = 0; i < n; ++i) lambda(i, i) = eig.eigenvalues[i];
        const Mat rebuilt =
            eig.eigenvectors * lambda * transpose(eig.eigenvectors);
        if (!(frob_norm(rebuilt - m.mat()) <= 1e-9 * std::max(1.0, frob_norm(m))))
            return {false, "eigendecomposition reconstruction failed"};
    }
    return {true, "1000 Lyapunov, 200 vectorization, 200 eigensolver checks"};
}

// 9. Byte-identical figure regeneration under a fixed seed.
Outcome criterion_determinism() {
    const fs::path base = fs::path("acceptance_out");
    fs::remove_all(base);
    const fs::path a = base / "a";
    const fs::path b = base / "b";
    experiment::reproduce_fig2(a.string(), 7);
    experiment::reproduce_fig2(b.string(), 7);
    int files = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
        ++files;
        std::ifstream fa(entry.path(), std::ios::binary);
        std::ifstream fb(b / entry.path().filename(), std::ios::binary);
        std::ostringstream sa, sb;
        sa << fa.rdbuf();
        sb << fb.rdbuf();
        if (sa.str() != sb.str() || sa.str().empty())
            return {false, "mismatch in " + entry.path().filename().string()};
    }
    if (files != 7) return {false, "expected 7 files, saw " + std::to_string(files)};
    return {true, "7 files byte-identical across runs"};
}

} // namespace

int main() {
    const BenchSetup setup = bench_setup();

    struct Criterion {
        int number;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "oracle agreement", [] { return criterion_oracle_agreement(); }},
        {2, "benchmark convergence set", [&] { return criterion_fig2(setup); }},
        {3, "benchmark robustness set", [&] { return criterion_fig3(setup); }},
        {4, "vi contraction certificates", [&] { return criterion_contraction(setup); }},
        {5, "pi quadratic local rate", [&] { return criterion_quadratic_rate(setup); }},
        {6, "contractive-dynamics suite", [] { return criterion_contractive_dynamics(); }},
        {7, "iss linear-gain shape", [&] { return criterion_iss_shape(setup); }},
        {8, "kernel correctness", [] { return criterion_kernel_correctness(); }},
        {9, "determinism", [] { return criterion_determinism(); }},
    };

    int failed = 0;
    for (const auto& criterion : criteria) {
        Outcome outcome;
        try {
            outcome = criterion.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        if (!outcome.pass) ++failed;
        std::printf("[%s] criterion %d: %s - %s\n", outcome.pass ? "PASS" : "FAIL",
                    criterion.number, criterion.name, outcome.detail.c_str());
    }
    if (failed > 0) std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
