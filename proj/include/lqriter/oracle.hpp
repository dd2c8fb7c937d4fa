#pragma once

#include "lqriter/lqr.hpp"

// Ground-truth providers used by tests and as the CLI reference solver.
// The fixed-point iteration here is written directly on the matrix
// primitives so its results do not depend on the solver code paths it is
// used to check.
namespace lqriter::oracle {

struct CertifiedSolution {
    lqr::Kernel p_star;
    lqr::Gain k_star;
    double residual = 0.0; // ‖𝒯(P*) − P*‖_F at the returned kernel
    long iterations_used = 0;
};

/// Riccati fixed point from P₀ = 0, iterated to a machine-level step and
/// certified: residual ≤ 1e−9·max(1, ‖Q‖_F) and A + BK* Schur stable.
/// Throws ConvergenceError when the cap (10⁶) is exhausted or the
/// certificate fails, which indicates a non-stabilizable or numerically
/// hopeless pair (A, B).
CertifiedSolution solve_dare_bruteforce(const lqr::LqrProblem& prob);

/// Unique nonnegative root of the scalar Riccati quadratic
/// b²p² + (r − qb² − a²r)p − qr = 0. Requires r > 0, q ≥ 0 and a
/// stabilizable pair (b ≠ 0, or |a| < 1 for the pure Lyapunov branch).
double scalar_dare_closed_form(double a, double b, double q, double r);

} // namespace lqriter::oracle
