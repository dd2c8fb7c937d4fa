#include "lqriter/lqr.hpp"

#include <cmath>
#include <utility>

#include "lqriter/matlin.hpp"
#include "lqriter/tolerances.hpp"

namespace lqriter::lqr {

using matlin::dlyap;
using matlin::frob_norm;
using matlin::is_schur_stable;
using matlin::min_eig;
using matlin::solve_linear;

Plant::Plant(Mat a_, Mat b_) : a(std::move(a_)), b(std::move(b_)) {
    if (!a.is_square()) throw DimensionError("Plant: A must be square");
    if (b.rows() != a.rows())
        throw DimensionError("Plant: B must have as many rows as A");
}

CostWeights::CostWeights(SymMat q_, SymMat r_) : q(std::move(q_)), r(std::move(r_)) {
    if (min_eig(r) <= tols().pd_min_eig)
        throw InvalidArgumentError("CostWeights: R must be positive definite");
    if (min_eig(q) <= -tols().psd_slack)
        throw InvalidArgumentError("CostWeights: Q must be positive semidefinite");
}

bool Kernel::is_psd() const { return min_eig(p) > -tols().psd_slack; }

Kernel Kernel::scaled_identity(int n, double s) {
    return Kernel(SymMat::from_average(s * Mat::identity(n)));
}

LqrProblem::LqrProblem(Plant plant_, CostWeights weights_)
    : plant(std::move(plant_)), weights(std::move(weights_)) {
    if (weights.q.dim() != plant.state_dim())
        throw DimensionError("LqrProblem: Q dimension mismatch");
    if (weights.r.dim() != plant.input_dim())
        throw DimensionError("LqrProblem: R dimension mismatch");
}

Mat gain_l(const LqrProblem& prob, const Kernel& p) {
    const Mat& a = prob.plant.a;
    const Mat& b = prob.plant.b;
    const Mat bt_p = transpose(b) * p.p.mat();
    const Mat g = prob.weights.r.mat() + bt_p * b;
    return solve_linear(g, bt_p * a);
}

Mat closed_loop(const LqrProblem& prob, const Kernel& p) {
    return prob.plant.a - prob.plant.b * gain_l(prob, p);
}

bool is_stabilizing_kernel(const LqrProblem& prob, const Kernel& p) {
    try {
        return is_schur_stable(closed_loop(prob, p));
    } catch (const SingularError&) {
        return false;
    }
}

Kernel policy_evaluation(const LqrProblem& prob, const Gain& k) {
    if (k.k.rows() != prob.input_dim() || k.k.cols() != prob.state_dim())
        throw DimensionError("policy_evaluation: gain shape mismatch");
    const Mat cl = prob.plant.a + prob.plant.b * k.k;
    if (!is_schur_stable(cl))
        throw UnstablePolicyError("policy_evaluation: closed loop is not Schur stable");
    const SymMat w = SymMat::from_average(
        prob.weights.q.mat() + transpose(k.k) * (prob.weights.r.mat() * k.k));
    return Kernel(dlyap(cl, w));
}

Gain policy_improvement(const LqrProblem& prob, const Kernel& p) {
    return Gain(-gain_l(prob, p));
}

Kernel bellman_operator(const LqrProblem& prob, const Kernel& p) {
    const Mat& a = prob.plant.a;
    const Mat& b = prob.plant.b;
    const Mat bt_p_a = transpose(b) * (p.p.mat() * a);
    const Mat g = prob.weights.r.mat() + transpose(b) * (p.p.mat() * b);
    const Mat l = solve_linear(g, bt_p_a);
    const Mat at_p_a = transpose(a) * (p.p.mat() * a);
    return Kernel(SymMat::from_average(prob.weights.q.mat() + at_p_a -
                                       transpose(bt_p_a) * l));
}

double dare_residual(const LqrProblem& prob, const Kernel& p) {
    return frob_norm(bellman_operator(prob, p).p.mat() - p.p.mat());
}

bool is_likely_stabilizable(const LqrProblem& prob, int max_iter) {
    const int n = prob.state_dim();
    const double scale =
        1000.0 * std::max(1.0, matlin::max_eig(prob.weights.q));
    Kernel p = Kernel::scaled_identity(n, scale);
    try {
        for (int i = 0; i < max_iter; ++i) {
            Kernel next = bellman_operator(prob, p);
            const double step = frob_norm(next.p.mat() - p.p.mat());
            const double size = frob_norm(p.p);
            if (!std::isfinite(step) || !std::isfinite(size))
                return false; // diverged: an unstabilizable mode is growing
            if (step <= 1e-10 * std::max(1.0, size)) return true;
            p = next;
        }
    } catch (const Error&) {
        return false;
    }
    return false;
}

} // namespace lqriter::lqr
