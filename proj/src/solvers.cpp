#include "lqriter/solvers.hpp"

#include <cmath>
#include <limits>

#include "lqriter/matlin.hpp"

namespace lqriter::solvers {

using lqr::bellman_operator;
using lqr::Kernel;
using lqr::LqrProblem;
using matlin::frob_norm;

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();
constexpr double kRatioFloor = 1e-14;

TraceRow make_row(const LqrProblem& prob, int iter, Kernel p,
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
        row.dare_residual = lqr::dare_residual(prob, row.p);
    } catch (const SingularError&) {
        // leave NaN: the induced gain does not exist at this kernel
    }
    row.closed_loop_stable = lqr::is_stabilizing_kernel(prob, row.p);
    return row;
}

} // namespace

StopRule::StopRule(double tol_, int max_iter_) : tol(tol_), max_iter(max_iter_) {
    if (!(tol > 0.0)) throw InvalidArgumentError("StopRule: tol must be positive");
    if (max_iter <= 0) throw InvalidArgumentError("StopRule: max_iter must be positive");
}

const char* to_string(TermReason r) {
    switch (r) {
        case TermReason::converged: return "converged";
        case TermReason::max_iter: return "max-iter";
        case TermReason::unstable_policy: return "unstable-policy";
        case TermReason::singularity: return "singularity";
    }
    return "?";
}

TraceRow::TraceRow(lqr::Kernel p_)
    : p(std::move(p_)),
      frob_error(nan_v),
      peps_error(nan_v),
      dare_residual(nan_v),
      a_i(nan_v),
      b_i(nan_v),
      discrepancy(nan_v) {}

std::vector<double> IterationTrace::frob_errors() const {
    std::vector<double> e;
    e.reserve(rows.size());
    for (const TraceRow& r : rows) e.push_back(r.frob_error);
    return e;
}

std::vector<double> IterationTrace::peps_errors() const {
    std::vector<double> e;
    e.reserve(rows.size());
    for (const TraceRow& r : rows) e.push_back(r.peps_error);
    return e;
}

lqr::Kernel vi_step(const LqrProblem& prob, const Kernel& p) {
    return bellman_operator(prob, p);
}

lqr::Kernel pi_step_from_kernel(const LqrProblem& prob, const Kernel& p) {
    return lqr::policy_evaluation(prob, lqr::policy_improvement(prob, p));
}

IterationTrace vi_run(const LqrProblem& prob, const Kernel& p0,
                      const StopRule& stop, const std::optional<Reference>& ref) {
    IterationTrace trace;
    trace.init_psd = p0.is_psd();
    trace.rows.push_back(make_row(prob, 0, p0, ref));

    Kernel p = p0;
    for (int i = 0; i < stop.max_iter; ++i) {
        Kernel next = Kernel::zero(1);
        try {
            next = vi_step(prob, p);
        } catch (const SingularError&) {
            trace.reason = TermReason::singularity;
            return trace;
        }
        const double step = frob_norm(next.p.mat() - p.p.mat());
        trace.rows.push_back(make_row(prob, i + 1, next, ref));
        if (step <= stop.tol) {
            trace.reason = TermReason::converged;
            return trace;
        }
        p = std::move(next);
    }
    trace.reason = TermReason::max_iter;
    return trace;
}

IterationTrace pi_run(const LqrProblem& prob, const PiInit& init,
                      const StopRule& stop, const std::optional<Reference>& ref) {
    IterationTrace trace;

    Kernel p = Kernel::zero(prob.state_dim());
    if (init.is_gain()) {
        const lqr::Gain& k0 = std::get<lqr::Gain>(init.value);
        try {
            p = lqr::policy_evaluation(prob, k0);
        } catch (const UnstablePolicyError&) {
            trace.reason = TermReason::unstable_policy;
            return trace;
        } catch (const SingularError&) {
            trace.reason = TermReason::singularity;
            return trace;
        }
        trace.rows.push_back(make_row(prob, 0, p, ref, k0));
    } else {
        p = std::get<Kernel>(init.value);
        trace.init_psd = p.is_psd();
        trace.rows.push_back(make_row(prob, 0, p, ref));
    }

    for (int i = 0; i < stop.max_iter; ++i) {
        lqr::Gain k = lqr::Gain(Mat(1, 1));
        Kernel next = Kernel::zero(1);
        try {
            k = lqr::policy_improvement(prob, p);
            next = lqr::policy_evaluation(prob, k);
        } catch (const UnstablePolicyError&) {
            trace.reason = TermReason::unstable_policy;
            return trace;
        } catch (const SingularError&) {
            trace.reason = TermReason::singularity;
            return trace;
        }
        const double step = frob_norm(next.p.mat() - p.p.mat());
        trace.rows.push_back(make_row(prob, i + 1, next, ref, std::move(k)));
        if (step <= stop.tol) {
            trace.reason = TermReason::converged;
            return trace;
        }
        p = std::move(next);
    }
    trace.reason = TermReason::max_iter;
    return trace;
}

RateCheck hewer_rate_check(const IterationTrace& trace, const Kernel& reference) {
    if (trace.rows.size() < 3)
        throw InvalidArgumentError("hewer_rate_check: need at least 3 iterations");
    std::vector<double> errors;
    errors.reserve(trace.rows.size());
    for (const TraceRow& row : trace.rows)
        errors.push_back(frob_norm(row.p.p.mat() - reference.p.mat()));

    RateCheck rc;
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
        if (errors[i] < kRatioFloor) break;
        rc.ratios.push_back(errors[i + 1] / errors[i]);
        rc.quadratic_ratios.push_back(errors[i + 1] / (errors[i] * errors[i]));
    }
    return rc;
}

} // namespace lqriter::solvers
