#pragma once

#include <vector>

#include "lqriter/mat.hpp"

// Dense linear-algebra primitives sized for desk-scale matrices. Everything
// downstream (iterations, probes, the oracle) is built from these.
namespace lqriter::matlin {

/// Kronecker product, (a.rows·b.rows) × (a.cols·b.cols).
Mat kron(const Mat& a, const Mat& b);

/// Columns of m stacked top to bottom, as a column vector.
Mat vec(const Mat& m);

/// Inverse of vec: reshape a rows·cols column vector.
Mat unvec(const Mat& v, int rows, int cols);

/// √(Σ entries²)
double frob_norm(const Mat& m);
double frob_norm(const SymMat& m);

struct EigResult {
    std::vector<double> eigenvalues; // ascending
    Mat eigenvectors;                // columns, orthonormal; M = VΛVᵀ
};

/// Symmetric eigendecomposition by cyclic Jacobi. Throws ConvergenceError
/// if the off-diagonal mass has not vanished after the sweep cap (does not
/// happen for finite input in practice; the cap is a hard safety net).
EigResult sym_eig(const SymMat& m);

double min_eig(const SymMat& m);
double max_eig(const SymMat& m);

/// Solve a·x = b by Gaussian elimination with partial pivoting; b may have
/// several columns. Throws SingularError when a pivot falls below
/// pivot_rel·‖a‖_F.
Mat solve_linear(const Mat& a, const Mat& b);

/// The n²×n² matrix Xᵀ⊗Xᵀ − I⊗I, i.e. vec(XᵀYX − Y) = pmat(X)·vec(Y).
Mat pmat(const Mat& x);

/// Solve XᵀYX − Y = −W for symmetric Y via the vectorized system. Throws
/// SingularError when X has a reciprocal eigenvalue pair (no unique
/// solution; e.g. an eigenvalue on the unit circle).
SymMat dlyap(const Mat& x, const SymMat& w);

struct SpectralRadiusEstimate {
    double value = 0.0;
    bool overflow = false; // non-finite input or powering overflowed
    int power = 0;         // the k the returned estimate was taken at
};

/// Gelfand estimate ‖Mᵏ‖_F^(1/k), refined by doubling k until successive
/// estimates differ by less than gelfand_tol or k reaches the cap. The
/// estimate approaches the spectral radius from above only in the limit;
/// it is a diagnostic, not a stability decision (use is_schur_stable).
SpectralRadiusEstimate spectral_radius_estimate(const Mat& m, int k = 8);

struct StabilityCheck {
    bool stable = false;
    bool marginal = false; // Lyapunov operator singular: eigenvalue on/near unit circle
};

/// Exact discrete Lyapunov criterion: m is Schur stable iff XᵀYX − Y = −I
/// has a positive definite solution.
StabilityCheck schur_stability(const Mat& m);
bool is_schur_stable(const Mat& m);

/// Induced P_ε-norm √λ_max(Mᵀ·peps·M). Requires 0 ≺ peps ⪯ I; violations
/// throw InvalidArgumentError. Equals the spectral norm when peps = I.
double peps_norm(const Mat& m, const SymMat& peps);

/// Spectral norm ‖M‖₂ = √λ_max(MᵀM).
double spectral_norm(const Mat& m);

} // namespace lqriter::matlin
