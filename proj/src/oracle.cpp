#include "lqriter/oracle.hpp"

#include <cmath>

#include "lqriter/matlin.hpp"
#include "lqriter/tolerances.hpp"

namespace lqriter::oracle {

using matlin::frob_norm;
using matlin::solve_linear;

namespace {

constexpr long kMaxIterations = 1000000;

// One Riccati update written out on the primitives.
SymMat riccati_update(const Mat& a, const Mat& b, const SymMat& q,
                      const SymMat& r, const SymMat& p, Mat* gain_out) {
    const Mat bt_p = transpose(b) * p.mat();
    const Mat g = r.mat() + bt_p * b;
    const Mat bt_p_a = bt_p * a;
    const Mat l = solve_linear(g, bt_p_a);
    if (gain_out) *gain_out = -1.0 * l;
    const Mat next = q.mat() + transpose(a) * (p.mat() * a) - transpose(bt_p_a) * l;
    return SymMat::from_average(next);
}

} // namespace

CertifiedSolution solve_dare_bruteforce(const lqr::LqrProblem& prob) {
    const Mat& a = prob.plant.a;
    const Mat& b = prob.plant.b;
    const SymMat& q = prob.weights.q;
    const SymMat& r = prob.weights.r;

    SymMat p = SymMat::zero(prob.state_dim());
    long used = 0;
    bool settled = false;
    for (long i = 0; i < kMaxIterations; ++i) {
        const SymMat next = riccati_update(a, b, q, r, p, nullptr);
        const double step = frob_norm(next.mat() - p.mat());
        const double size = frob_norm(next);
        if (!std::isfinite(step) || !std::isfinite(size))
            throw ConvergenceError(
                "brute-force Riccati solve diverged; (A, B) is likely not stabilizable");
        p = next;
        used = i + 1;
        if (step <= 1e-14 * std::max(1.0, size)) {
            settled = true;
            break;
        }
    }
    if (!settled)
        throw ConvergenceError(
            "brute-force Riccati solve did not reach a fixed point; "
            "(A, B) is likely not stabilizable or badly conditioned");

    Mat gain(prob.input_dim(), prob.state_dim());
    const SymMat once_more = riccati_update(a, b, q, r, p, &gain);
    const double residual = frob_norm(once_more.mat() - p.mat());
    if (residual > 1e-9 * std::max(1.0, frob_norm(q)))
        throw ConvergenceError("brute-force Riccati solve failed certification: residual " +
                               std::to_string(residual));
    if (!matlin::is_schur_stable(a + b * gain))
        throw ConvergenceError(
            "brute-force Riccati solve failed certification: closed loop unstable");

    return {lqr::Kernel(p), lqr::Gain(gain), residual, used};
}

double scalar_dare_closed_form(double a, double b, double q, double r) {
    if (!(r > 0.0)) throw InvalidArgumentError("scalar DARE: r must be positive");
    if (q < 0.0) throw InvalidArgumentError("scalar DARE: q must be nonnegative");
    if (b == 0.0) {
        if (std::fabs(a) >= 1.0)
            throw InvalidArgumentError(
                "scalar DARE: (a, b) not stabilizable (b = 0 and |a| >= 1)");
        return q / (1.0 - a * a); // pure Lyapunov branch
    }
    // b²p² + βp − qr = 0 with β = r − qb² − a²r; the root product is
    // −qr/b² ≤ 0, so the "+" branch is the unique nonnegative root. Pick
    // the algebraic form that avoids cancellation for either sign of β.
    const double b2 = b * b;
    const double beta = r - q * b2 - a * a * r;
    const double disc = std::sqrt(beta * beta + 4.0 * b2 * q * r);
    if (beta >= 0.0) {
        const double denom = beta + disc;
        return denom > 0.0 ? 2.0 * q * r / denom : 0.0;
    }
    return (-beta + disc) / (2.0 * b2);
}

} // namespace lqriter::oracle
