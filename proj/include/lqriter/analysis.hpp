#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "lqriter/rng.hpp"
#include "lqriter/solvers.hpp"

// Quantitative instruments for the convergence and robustness theory:
// the P_ε weight, realized contraction factors, empirical radii of the
// stabilizing ball (δ₀) and the one-step-contraction ball (δ₁), the
// Newton-rate constants, and the ISS gain fit.
namespace lqriter::analysis {

/// Weight for the contraction norm: solve 𝒜(P*)ᵀM𝒜(P*) − M = −I and set
/// P_ε = M/λ_max(M). By construction 0 ≺ P_ε ⪯ I and ‖𝒜(P*)‖_{P_ε} < 1.
struct PepsWeight {
    SymMat peps;
    double contraction_at_optimum = 0.0; // ‖𝒜(P*)‖_{P_ε}
};

PepsWeight construct_peps(const lqr::LqrProblem& prob, const lqr::Kernel& p_star);

enum class NormKind { frobenius, peps };

/// Tightest per-step error ratio max_i e_{i+1}/e_i realized by a trace in
/// the chosen norm. This lower-bounds the theory's trajectory constant
/// (a supremum of closed-loop operator norms); both are reported by the
/// analyze command, and only the realized ratio is asserted on. Pairs with
/// denominator below 1e−14 are dropped; traces with fewer than three
/// usable errors are rejected.
double estimate_contraction(const solvers::IterationTrace& trace,
                            const solvers::Reference& reference, NormKind norm);

/// Sampled inner-radius estimate of a ball around P*, never a certified
/// constant. failure_direction is the binding direction when some sample
/// capped the radius; absent when every direction reached the cap.
struct BallEstimate {
    double radius = 0.0;
    int directions_tested = 0;
    std::optional<SymMat> failure_direction;
    int failures_outside_psd_cone = 0; // binding samples that left the PSD cone
};

/// Largest t per random unit direction D (20 bisection steps on (0, cap])
/// with P* + tD still stabilizing; returns the minimum over directions.
BallEstimate probe_delta0(const lqr::LqrProblem& prob, const lqr::Kernel& p_star,
                          int n_directions, double radius_cap, Rng& rng);

/// Same probe along caller-chosen directions.
BallEstimate probe_delta0_along(const lqr::LqrProblem& prob,
                                const lqr::Kernel& p_star,
                                const std::vector<SymMat>& directions,
                                double radius_cap);

/// Largest radius ≤ delta0 at which one full policy-iteration step
/// contracts ‖·−P*‖_F for every sampled direction.
BallEstimate probe_delta1(const lqr::LqrProblem& prob, const lqr::Kernel& p_star,
                          double delta0, int n_directions, Rng& rng);

BallEstimate probe_delta1_along(const lqr::LqrProblem& prob,
                                const lqr::Kernel& p_star,
                                const std::vector<SymMat>& directions,
                                double delta0);

/// Random symmetric matrix of unit Frobenius norm.
SymMat random_sym_direction(int n, Rng& rng);

/// The Newton-rate constants: one policy-iteration step from P satisfies
/// ‖P* − P₊‖_F ≤ a0·a1·‖P* − P‖²_F.
/// a0 = ‖R+BᵀP*B‖_F·‖R⁻¹‖²_F·‖B‖²_F·‖A‖²_F depends only on the optimum;
/// a1 = ‖𝒫(𝒜(P))⁻¹‖_F·(1 + ‖R⁻¹‖_F·‖B‖²_F·‖P‖_F)² on the current kernel.
struct QuadraticConstants {
    double a0 = 0.0;
    double a1 = 0.0;
};

QuadraticConstants quadratic_constants(const lqr::LqrProblem& prob,
                                       const lqr::Kernel& p_star,
                                       const lqr::Kernel& p);

struct IssFit {
    double slope = 0.0;
    double r_squared = 0.0;
};

/// Least-squares line through the origin for (ρ, asymptotic error) points.
/// Requires at least three points with strictly increasing ρ and a nonzero
/// error somewhere.
IssFit iss_gain_fit(const std::vector<std::pair<double, double>>& points);

} // namespace lqriter::analysis
