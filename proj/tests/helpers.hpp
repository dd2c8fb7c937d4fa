#pragma once

// Shared corpus generators for the unit and acceptance suites. Everything
// is driven by the library Rng so corpora are identical across platforms.

#include <cmath>

#include "lqriter/lqr.hpp"
#include "lqriter/matlin.hpp"
#include "lqriter/oracle.hpp"
#include "lqriter/rng.hpp"

namespace lqriter::testing {

inline lqr::LqrProblem scalar_problem(double a, double b, double q, double r) {
    return lqr::LqrProblem(
        lqr::Plant(Mat(1, 1, {a}), Mat(1, 1, {b})),
        lqr::CostWeights(SymMat(Mat(1, 1, {q})), SymMat(Mat(1, 1, {r}))));
}

/// The classic worked example: a=0.5, b=1, q=1, r=1 with
/// p* = (0.25+√4.0625)/2 ≈ 1.1327822.
inline lqr::LqrProblem worked_scalar() { return scalar_problem(0.5, 1.0, 1.0, 1.0); }

inline Mat random_mat(Rng& rng, int rows, int cols, double lo = -1.0, double hi = 1.0) {
    Mat m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = rng.uniform(lo, hi);
    return m;
}

inline SymMat random_sym(Rng& rng, int n, double scale = 1.0) {
    return SymMat::from_average(scale * random_mat(rng, n, n));
}

/// GᵀG, exactly positive semidefinite.
inline SymMat random_psd(Rng& rng, int n, double scale = 1.0) {
    const Mat g = random_mat(rng, n, n);
    return SymMat::from_average(scale * (transpose(g) * g));
}

/// Random A rescaled to a chosen spectral norm (so ‖A‖₂ < 1 targets are exact).
inline Mat random_a_with_norm(Rng& rng, int n, double norm) {
    Mat a = random_mat(rng, n, n);
    double s = matlin::spectral_norm(a);
    while (s == 0.0) {
        a = random_mat(rng, n, n);
        s = matlin::spectral_norm(a);
    }
    return (norm / s) * a;
}

/// Random matrix rescaled to a chosen Gelfand spectral-radius estimate.
inline Mat random_stable_mat(Rng& rng, int n, double target_radius) {
    Mat m = random_mat(rng, n, n);
    const auto est = matlin::spectral_radius_estimate(m, 8);
    if (!(est.value > 0.0)) return m; // nilpotent sample is already stable
    return (target_radius / est.value) * m;
}

/// Random problem with ‖A‖₂ drawn from [lo, hi]; Q PSD, R PD. Resamples
/// until the brute-force solve certifies it (operational stabilizability).
inline lqr::LqrProblem random_stabilizable_problem(Rng& rng, int n, int m,
                                                   double norm_lo = 0.3,
                                                   double norm_hi = 1.3) {
    for (;;) {
        const Mat a = random_a_with_norm(rng, n, rng.uniform(norm_lo, norm_hi));
        const Mat b = random_mat(rng, n, m);
        const SymMat q = random_psd(rng, n, 0.5);
        const Mat h = random_mat(rng, m, m);
        const SymMat r =
            SymMat::from_average(transpose(h) * h + 0.1 * Mat::identity(m));
        try {
            lqr::LqrProblem prob(lqr::Plant(a, b), lqr::CostWeights(q, r));
            (void)oracle::solve_dare_bruteforce(prob);
            return prob;
        } catch (const Error&) {
            // non-stabilizable or degenerate draw; try again
        }
    }
}

inline double frob_diff(const SymMat& a, const SymMat& b) {
    return matlin::frob_norm(a.mat() - b.mat());
}

} // namespace lqriter::testing
