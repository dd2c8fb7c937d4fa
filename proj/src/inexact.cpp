#include "lqriter/inexact.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "lqriter/matlin.hpp"

namespace lqriter::inexact {

using lqr::Kernel;
using lqr::LqrProblem;
using lqr::Plant;
using matlin::frob_norm;
using solvers::Reference;
using solvers::StopRule;
using solvers::TermReason;
using solvers::TraceRow;

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();
constexpr double kPlateauDelta = 1e-10; // successive errors closer than this
constexpr double kPlateauLevel = 1e-8;  // while still this far from P*

TraceRow robust_row(const LqrProblem& true_prob, int iter, Kernel p,
                    const std::optional<Reference>& ref,
                    std::optional<lqr::Gain> gain = std::nullopt) {
    TraceRow row(std::move(p));
    row.iter = iter;
    row.k = std::move(gain);
    if (ref) {
        const Mat diff = row.p.p.mat() - ref->p_star.p.mat();
        row.frob_error = frob_norm(diff);
        if (ref->peps) row.peps_error = matlin::peps_norm(diff, *ref->peps);
    }
    try {
        row.dare_residual = lqr::dare_residual(true_prob, row.p);
    } catch (const SingularError&) {
    }
    row.closed_loop_stable = lqr::is_stabilizing_kernel(true_prob, row.p);
    return row;
}

void detect_plateau(RobustTrace& trace) {
    if (trace.rows.size() < 2) return;
    const double last = trace.rows[trace.rows.size() - 1].frob_error;
    const double prev = trace.rows[trace.rows.size() - 2].frob_error;
    if (std::isnan(last) || std::isnan(prev)) return;
    trace.plateau_detected =
        std::fabs(last - prev) < kPlateauDelta && last > kPlateauLevel;
}

} // namespace

EstimateSequence::EstimateSequence(ScheduleKind kind, ScheduleParams params,
                                   Plant plant)
    : kind_(kind), params_(std::move(params)), plant_(std::move(plant)) {
    const int n = plant_.state_dim();
    const int m = plant_.input_dim();
    if (!params_.dir_a) params_.dir_a = Mat::identity(n);
    if (!params_.dir_b) params_.dir_b = Mat::eye(n, m);
    if (params_.dir_a->rows() != n || params_.dir_a->cols() != n)
        throw DimensionError("EstimateSequence: D_A shape mismatch");
    if (params_.dir_b->rows() != n || params_.dir_b->cols() != m)
        throw DimensionError("EstimateSequence: D_B shape mismatch");
    da_norm_ = frob_norm(*params_.dir_a);
    db_norm_ = frob_norm(*params_.dir_b);
}

double EstimateSequence::scale_at(int i) const {
    switch (kind_) {
        case ScheduleKind::exact: return 0.0;
        case ScheduleKind::constant_offset: return params_.rho;
        case ScheduleKind::geometric_vanishing:
            return params_.rho * std::pow(params_.gamma, i);
        case ScheduleKind::geometric_plus_floor:
            return params_.rho * (std::pow(params_.gamma, i) + params_.floor);
        case ScheduleKind::custom_list: {
            const std::size_t idx = static_cast<std::size_t>(i);
            if (idx < params_.scales.size()) return params_.scales[idx];
            return params_.scales.back();
        }
    }
    return 0.0;
}

Mat EstimateSequence::a_hat(int i) const {
    const double s = scale_at(i);
    if (s == 0.0) return plant_.a;
    return plant_.a + s * (*params_.dir_a);
}

Mat EstimateSequence::b_hat(int i) const {
    const double s = scale_at(i);
    if (s == 0.0) return plant_.b;
    return plant_.b + s * (*params_.dir_b);
}

double EstimateSequence::a_mag(int i) const { return std::fabs(scale_at(i)) * da_norm_; }
double EstimateSequence::b_mag(int i) const { return std::fabs(scale_at(i)) * db_norm_; }

EstimateSequence make_schedule(ScheduleKind kind, const ScheduleParams& params,
                               const Plant& plant) {
    if (kind == ScheduleKind::geometric_vanishing ||
        kind == ScheduleKind::geometric_plus_floor) {
        if (!(params.gamma > 0.0 && params.gamma < 1.0))
            throw InvalidArgumentError("make_schedule: gamma must lie in (0, 1)");
    }
    if (params.rho < 0.0)
        throw InvalidArgumentError("make_schedule: rho must be nonnegative");
    if (params.floor < 0.0)
        throw InvalidArgumentError("make_schedule: floor must be nonnegative");
    if (kind == ScheduleKind::custom_list && params.scales.empty())
        throw InvalidArgumentError("make_schedule: custom list must be nonempty");
    return EstimateSequence(kind, params, plant);
}

Mat random_unit_direction(int rows, int cols, Rng& rng) {
    Mat d(rows, cols);
    double nrm = 0.0;
    while (nrm == 0.0) {
        for (int j = 0; j < cols; ++j)
            for (int i = 0; i < rows; ++i) d(i, j) = rng.symmetric_unit();
        nrm = frob_norm(d);
    }
    return (1.0 / nrm) * d;
}

RobustTrace inexact_vi_run(const LqrProblem& prob, const Kernel& p0,
                           const EstimateSequence& sched, const StopRule& stop,
                           const std::optional<Reference>& ref) {
    RobustTrace trace;
    trace.init_psd = p0.is_psd();
    trace.init_stabilizing = lqr::is_stabilizing_kernel(prob, p0);
    trace.rows.push_back(robust_row(prob, 0, p0, ref));

    Kernel p = p0;
    for (int i = 0; i < stop.max_iter; ++i) {
        const LqrProblem est(Plant(sched.a_hat(i), sched.b_hat(i)), prob.weights);
        Kernel next = Kernel::zero(1);
        try {
            next = lqr::bellman_operator(est, p);
        } catch (const SingularError&) {
            trace.reason = TermReason::singularity;
            detect_plateau(trace);
            return trace;
        }
        const double step = frob_norm(next.p.mat() - p.p.mat());
        TraceRow row = robust_row(prob, i + 1, next, ref);
        row.a_i = sched.a_mag(i);
        row.b_i = sched.b_mag(i);
        try {
            row.discrepancy =
                frob_norm(next.p.mat() - lqr::bellman_operator(prob, p).p.mat());
        } catch (const SingularError&) {
        }
        trace.rows.push_back(std::move(row));
        if (step <= stop.tol) {
            trace.reason = TermReason::converged;
            detect_plateau(trace);
            return trace;
        }
        p = std::move(next);
    }
    trace.reason = TermReason::max_iter;
    detect_plateau(trace);
    return trace;
}

RobustTrace inexact_pi_run(const LqrProblem& prob, const solvers::PiInit& init,
                           const EstimateSequence& sched, const StopRule& stop,
                           const std::optional<Reference>& ref) {
    RobustTrace trace;

    Kernel p = Kernel::zero(prob.state_dim());
    if (init.is_gain()) {
        const lqr::Gain& k0 = std::get<lqr::Gain>(init.value);
        trace.init_stabilizing =
            matlin::is_schur_stable(prob.plant.a + prob.plant.b * k0.k);
        const LqrProblem est0(Plant(sched.a_hat(0), sched.b_hat(0)), prob.weights);
        try {
            p = lqr::policy_evaluation(est0, k0);
        } catch (const UnstablePolicyError&) {
            trace.reason = TermReason::unstable_policy;
            return trace;
        } catch (const SingularError&) {
            trace.reason = TermReason::singularity;
            return trace;
        }
        TraceRow row = robust_row(prob, 0, p, ref, k0);
        row.a_i = sched.a_mag(0);
        row.b_i = sched.b_mag(0);
        try {
            row.discrepancy =
                frob_norm(p.p.mat() - lqr::policy_evaluation(prob, k0).p.mat());
        } catch (const Error&) {
        }
        trace.rows.push_back(std::move(row));
    } else {
        p = std::get<Kernel>(init.value);
        trace.init_psd = p.is_psd();
        trace.init_stabilizing = lqr::is_stabilizing_kernel(prob, p);
        trace.rows.push_back(robust_row(prob, 0, p, ref));
    }

    for (int i = 0; i < stop.max_iter; ++i) {
        const LqrProblem est(Plant(sched.a_hat(i + 1), sched.b_hat(i + 1)),
                             prob.weights);
        lqr::Gain k = lqr::Gain(Mat(1, 1));
        Kernel next = Kernel::zero(1);
        try {
            k = lqr::policy_improvement(est, p);
            next = lqr::policy_evaluation(est, k);
        } catch (const UnstablePolicyError&) {
            trace.reason = TermReason::unstable_policy;
            detect_plateau(trace);
            return trace;
        } catch (const SingularError&) {
            trace.reason = TermReason::singularity;
            detect_plateau(trace);
            return trace;
        }
        const double step = frob_norm(next.p.mat() - p.p.mat());
        TraceRow row = robust_row(prob, i + 1, next, ref, std::move(k));
        row.a_i = sched.a_mag(i + 1);
        row.b_i = sched.b_mag(i + 1);
        try {
            row.discrepancy = frob_norm(
                next.p.mat() - solvers::pi_step_from_kernel(prob, p).p.mat());
        } catch (const Error&) {
        }
        trace.rows.push_back(std::move(row));
        if (step <= stop.tol) {
            trace.reason = TermReason::converged;
            detect_plateau(trace);
            return trace;
        }
        p = std::move(next);
    }
    trace.reason = TermReason::max_iter;
    detect_plateau(trace);
    return trace;
}

double one_step_discrepancy_vi(const LqrProblem& prob, const Kernel& p,
                               const Mat& da, const Mat& db) {
    const LqrProblem est(Plant(prob.plant.a + da, prob.plant.b + db), prob.weights);
    const Kernel hat = lqr::bellman_operator(est, p);
    const Kernel exact = lqr::bellman_operator(prob, p);
    return frob_norm(hat.p.mat() - exact.p.mat());
}

} // namespace lqriter::inexact
