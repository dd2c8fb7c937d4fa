#pragma once

#include "lqriter/mat.hpp"

// The regulator problem and its elementary operators: policy evaluation,
// policy improvement, the Riccati operator, closed-loop maps, residuals.
namespace lqriter::lqr {

/// Dynamics x⁺ = A·x + B·u. Stabilizability of (A, B) is not checked at
/// construction; see is_likely_stabilizable.
struct Plant {
    Mat a; // n×n
    Mat b; // n×m

    Plant(Mat a_, Mat b_);
    int state_dim() const { return a.rows(); }
    int input_dim() const { return b.cols(); }
};

/// Stage cost xᵀQx + uᵀRu with R ≻ 0 and Q ⪰ 0 (checked).
struct CostWeights {
    SymMat q; // n×n
    SymMat r; // m×m

    CostWeights(SymMat q_, SymMat r_);
};

/// Candidate quadratic cost kernel P. Symmetric by construction; positive
/// semidefiniteness is deliberately not required (the analysis ranges over
/// symmetric matrices near P*).
struct Kernel {
    SymMat p;

    explicit Kernel(SymMat p_) : p(std::move(p_)) {}
    int dim() const { return p.dim(); }
    bool is_psd() const;

    static Kernel zero(int n) { return Kernel(SymMat::zero(n)); }
    static Kernel scaled_identity(int n, double s);
};

/// State feedback u = K·x. The stored convention: improvement produces
/// K = −(R+BᵀPB)⁻¹BᵀPA and the closed loop is A + BK. The analysis
/// operator L(P) (no minus sign) is a separate function; 𝒜(P) = A − B·L(P).
struct Gain {
    Mat k; // m×n

    explicit Gain(Mat k_) : k(std::move(k_)) {}
};

struct LqrProblem {
    Plant plant;
    CostWeights weights;

    LqrProblem(Plant plant_, CostWeights weights_);
    int state_dim() const { return plant.state_dim(); }
    int input_dim() const { return plant.input_dim(); }
};

/// L(P) = (R + BᵀPB)⁻¹BᵀPA. Throws SingularError when R + BᵀPB is
/// singular (possible for indefinite P; never for P ⪰ 0).
Mat gain_l(const LqrProblem& prob, const Kernel& p);

/// 𝒜(P) = A − B·L(P), the closed loop induced by kernel P.
Mat closed_loop(const LqrProblem& prob, const Kernel& p);

/// True iff the gain induced by P makes the closed loop Schur stable.
/// Singularity while forming the gain reports as not stabilizing.
bool is_stabilizing_kernel(const LqrProblem& prob, const Kernel& p);

/// Solve P = Q + KᵀRK + (A+BK)ᵀP(A+BK). Throws UnstablePolicyError when
/// A + BK is not Schur stable (the cost of an unstable policy is unbounded).
Kernel policy_evaluation(const LqrProblem& prob, const Gain& k);

/// K = −L(P).
Gain policy_improvement(const LqrProblem& prob, const Kernel& p);

/// 𝒯(P) = Q + AᵀPA − AᵀPB(R+BᵀPB)⁻¹BᵀPA, one value-iteration update.
Kernel bellman_operator(const LqrProblem& prob, const Kernel& p);

/// ‖𝒯(P) − P‖_F; zero exactly at the Riccati solution.
double dare_residual(const LqrProblem& prob, const Kernel& p);

/// Operational stabilizability probe: value iteration from a large multiple
/// of the identity; convergence within the cap is taken as evidence that
/// (A, B) is stabilizable. A heuristic for experiment hygiene, not a proof.
bool is_likely_stabilizable(const LqrProblem& prob, int max_iter = 200000);

} // namespace lqriter::lqr
