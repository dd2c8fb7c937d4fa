#pragma once

namespace lqriter {

/// Every numeric threshold used by the library, in one place.
/// Scale-dependent entries document the quantity they multiply.
struct Tolerances {
    // matrix construction
    double sym_max_asym = 1e-10;       // max|M - Mᵀ| accepted when constructing a SymMat

    // symmetric eigensolver (cyclic Jacobi)
    double jacobi_off_rel = 1e-12;     // off-diagonal threshold, times ‖M‖_F
    int jacobi_max_sweeps = 100;
    double eig_reconstruct_rel = 1e-9; // ‖VΛVᵀ - M‖_F budget, times max(1, ‖M‖_F)

    // linear solves
    double pivot_rel = 1e-12;          // pivot floor, times ‖A‖_F
    double solve_residual_rel = 1e-9;  // ‖Ax - b‖_F budget, times max(1, ‖b‖_F)
    double dlyap_residual_rel = 1e-8;  // Lyapunov residual budget, times max(1, ‖W‖_F)

    // definiteness predicates
    double pd_min_eig = 1e-10;         // strictly positive definite: min eig above this
    double psd_slack = 1e-10;          // positive semidefinite: min eig above -this
    double monotone_slack = 1e-8;      // semidefinite-ordering checks: min eig above -this

    // spectral radius (Gelfand) estimate
    double gelfand_tol = 1e-4;         // stop when successive estimates differ less
    int gelfand_max_power = 1 << 14;

    // P_eps weights
    double peps_max_eig_slack = 1e-12; // accept max eig up to 1 + this
    double peps_min_eig = 1e-12;       // positive definiteness floor
};

/// Library-wide defaults. All operations read this instance.
const Tolerances& tols();

} // namespace lqriter
