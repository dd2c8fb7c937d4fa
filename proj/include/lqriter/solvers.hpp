#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "lqriter/lqr.hpp"

// Exact value iteration and policy iteration, each producing a full
// per-iteration trace.
namespace lqriter::solvers {

/// Self-termination rule. The step size ‖P_{i+1} − P_i‖_F decides
/// convergence; the Riccati residual is recorded per row as a certificate
/// but never used to stop, and neither is any reference kernel.
struct StopRule {
    double tol = 1e-12;
    int max_iter = 10000;

    StopRule() = default;
    StopRule(double tol_, int max_iter_);
};

enum class TermReason { converged, max_iter, unstable_policy, singularity };

const char* to_string(TermReason r);

/// Optional ground truth against which per-iteration errors are reported.
/// peps, when present, additionally yields the weighted error column.
struct Reference {
    lqr::Kernel p_star;
    std::optional<SymMat> peps;
};

/// One record per kernel in the sequence. Error and certificate fields are
/// NaN when not computable (no reference, or a singular gain at this
/// kernel). a/b/discrepancy are only populated by the inexact runners and
/// describe the model estimate used to produce this row's kernel.
struct TraceRow {
    int iter = 0;
    lqr::Kernel p;
    std::optional<lqr::Gain> k; // policy iteration only
    double frob_error;
    double peps_error;
    double dare_residual;
    bool closed_loop_stable = false; // against the true plant
    double a_i;
    double b_i;
    double discrepancy;

    explicit TraceRow(lqr::Kernel p_);
};

struct IterationTrace {
    std::vector<TraceRow> rows;
    TermReason reason = TermReason::max_iter;
    bool init_psd = true;         // vi_run: was P₀ ⪰ 0 (else exploratory)
    bool init_stabilizing = true; // inexact runs: was the init stabilizing

    std::vector<double> frob_errors() const;
    std::vector<double> peps_errors() const;
    const lqr::Kernel& final_kernel() const { return rows.back().p; }
};

/// Policy iteration entry point: either a stabilizing gain K₀ (classic) or
/// a kernel P₀, in which case the first action is an improvement.
struct PiInit {
    std::variant<lqr::Gain, lqr::Kernel> value;

    static PiInit from_gain(lqr::Gain k) { return {std::move(k)}; }
    static PiInit from_kernel(lqr::Kernel p) { return {std::move(p)}; }
    bool is_gain() const { return std::holds_alternative<lqr::Gain>(value); }
};

/// One value-iteration update; identical to the Riccati operator.
lqr::Kernel vi_step(const lqr::LqrProblem& prob, const lqr::Kernel& p);

/// One full policy-iteration step from a kernel: improve, then evaluate.
lqr::Kernel pi_step_from_kernel(const lqr::LqrProblem& prob, const lqr::Kernel& p);

IterationTrace vi_run(const lqr::LqrProblem& prob, const lqr::Kernel& p0,
                      const StopRule& stop,
                      const std::optional<Reference>& reference = std::nullopt);

IterationTrace pi_run(const lqr::LqrProblem& prob, const PiInit& init,
                      const StopRule& stop,
                      const std::optional<Reference>& reference = std::nullopt);

/// Error ratios of a trace against a reference: e_{i+1}/e_i (linear rate)
/// and e_{i+1}/e_i² (Newton-style local rate). Pairs whose denominator
/// falls below 1e−14 truncate both lists.
struct RateCheck {
    std::vector<double> ratios;
    std::vector<double> quadratic_ratios;
};

RateCheck hewer_rate_check(const IterationTrace& trace, const lqr::Kernel& reference);

} // namespace lqriter::solvers
