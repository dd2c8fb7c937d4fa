#include "lqriter/analysis.hpp"

#include <cmath>

#include "lqriter/matlin.hpp"

namespace lqriter::analysis {

using lqr::Kernel;
using lqr::LqrProblem;
using matlin::frob_norm;

namespace {

constexpr double kRatioFloor = 1e-14;
constexpr int kBisectionSteps = 20;

Kernel offset_kernel(const Kernel& p_star, double t, const SymMat& dir) {
    return Kernel(SymMat::from_average(p_star.p.mat() + t * dir.mat()));
}

bool pi_step_contracts(const LqrProblem& prob, const Kernel& p_star,
                       const Kernel& p0) {
    const double e0 = frob_norm(p0.p.mat() - p_star.p.mat());
    try {
        const Kernel p1 = solvers::pi_step_from_kernel(prob, p0);
        return frob_norm(p1.p.mat() - p_star.p.mat()) < e0;
    } catch (const Error&) {
        return false;
    }
}

} // namespace

PepsWeight construct_peps(const LqrProblem& prob, const Kernel& p_star) {
    if (lqr::dare_residual(prob, p_star) > 1e-6)
        throw InvalidArgumentError(
            "construct_peps: kernel does not solve the Riccati equation");
    const Mat a_cl = lqr::closed_loop(prob, p_star);
    if (!matlin::is_schur_stable(a_cl))
        throw InvalidArgumentError(
            "construct_peps: closed loop at the optimum is not Schur stable");
    const SymMat m = matlin::dlyap(a_cl, SymMat::identity(prob.state_dim()));
    const double lmax = matlin::max_eig(m);
    PepsWeight w;
    w.peps = SymMat::from_average((1.0 / lmax) * m.mat());
    w.contraction_at_optimum = matlin::peps_norm(a_cl, w.peps);
    if (!(w.contraction_at_optimum < 1.0))
        throw ConvergenceError("construct_peps: contraction certificate failed");
    return w;
}

double estimate_contraction(const solvers::IterationTrace& trace,
                            const solvers::Reference& reference, NormKind norm) {
    if (norm == NormKind::peps && !reference.peps)
        throw InvalidArgumentError("estimate_contraction: no peps weight supplied");

    std::vector<double> errors;
    errors.reserve(trace.rows.size());
    for (const solvers::TraceRow& row : trace.rows) {
        const Mat diff = row.p.p.mat() - reference.p_star.p.mat();
        errors.push_back(norm == NormKind::frobenius
                             ? frob_norm(diff)
                             : matlin::peps_norm(diff, *reference.peps));
    }

    double max_ratio = 0.0;
    int usable = 0;
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
        if (errors[i] < kRatioFloor) break;
        max_ratio = std::max(max_ratio, errors[i + 1] / errors[i]);
        ++usable;
    }
    if (usable < 2)
        throw InvalidArgumentError(
            "estimate_contraction: degenerate trace (fewer than 3 nonzero errors)");
    return max_ratio;
}

SymMat random_sym_direction(int n, Rng& rng) {
    Mat d(n, n);
    double nrm = 0.0;
    while (nrm == 0.0) {
        for (int j = 0; j < n; ++j) {
            d(j, j) = rng.symmetric_unit();
            for (int i = 0; i < j; ++i) {
                const double v = rng.symmetric_unit();
                d(i, j) = v;
                d(j, i) = v;
            }
        }
        nrm = frob_norm(d);
    }
    return SymMat::from_average((1.0 / nrm) * d);
}

BallEstimate probe_delta0(const LqrProblem& prob, const Kernel& p_star,
                          int n_directions, double radius_cap, Rng& rng) {
    if (n_directions <= 0)
        throw InvalidArgumentError("probe_delta0: need at least one direction");
    std::vector<SymMat> dirs;
    dirs.reserve(n_directions);
    for (int d = 0; d < n_directions; ++d)
        dirs.push_back(random_sym_direction(prob.state_dim(), rng));
    return probe_delta0_along(prob, p_star, dirs, radius_cap);
}

BallEstimate probe_delta0_along(const LqrProblem& prob, const Kernel& p_star,
                                const std::vector<SymMat>& directions,
                                double radius_cap) {
    if (directions.empty() || !(radius_cap > 0.0))
        throw InvalidArgumentError("probe_delta0: bad direction set or cap");

    BallEstimate est;
    est.radius = radius_cap;
    est.directions_tested = static_cast<int>(directions.size());
    for (const SymMat& dir : directions) {
        auto stabilizing = [&](double t) {
            return lqr::is_stabilizing_kernel(prob, offset_kernel(p_star, t, dir));
        };
        double dir_radius = radius_cap;
        bool capped_by_sample = false;
        if (!stabilizing(radius_cap)) {
            capped_by_sample = true;
            if (!lqr::Kernel(offset_kernel(p_star, radius_cap, dir)).is_psd())
                ++est.failures_outside_psd_cone;
            double lo = 0.0;
            double hi = radius_cap;
            for (int step = 0; step < kBisectionSteps; ++step) {
                const double mid = 0.5 * (lo + hi);
                (stabilizing(mid) ? lo : hi) = mid;
            }
            dir_radius = lo;
        }
        if (dir_radius < est.radius) {
            est.radius = dir_radius;
            if (capped_by_sample) est.failure_direction = dir;
        }
    }
    return est;
}

BallEstimate probe_delta1(const LqrProblem& prob, const Kernel& p_star,
                          double delta0, int n_directions, Rng& rng) {
    if (n_directions <= 0)
        throw InvalidArgumentError("probe_delta1: need at least one direction");
    std::vector<SymMat> dirs;
    dirs.reserve(n_directions);
    for (int d = 0; d < n_directions; ++d)
        dirs.push_back(random_sym_direction(prob.state_dim(), rng));
    return probe_delta1_along(prob, p_star, dirs, delta0);
}

BallEstimate probe_delta1_along(const LqrProblem& prob, const Kernel& p_star,
                                const std::vector<SymMat>& dirs, double delta0) {
    if (dirs.empty() || !(delta0 > 0.0))
        throw InvalidArgumentError("probe_delta1: bad direction set or delta0");

    BallEstimate est;
    est.directions_tested = static_cast<int>(dirs.size());

    auto all_contract = [&](double t, std::optional<SymMat>* failing) {
        for (const SymMat& dir : dirs)
            if (!pi_step_contracts(prob, p_star, offset_kernel(p_star, t, dir))) {
                if (failing) *failing = dir;
                return false;
            }
        return true;
    };

    std::optional<SymMat> failing;
    if (all_contract(delta0, &failing)) {
        est.radius = delta0;
        return est;
    }
    double lo = 0.0;
    double hi = delta0;
    for (int step = 0; step < kBisectionSteps; ++step) {
        const double mid = 0.5 * (lo + hi);
        (all_contract(mid, &failing) ? lo : hi) = mid;
    }
    est.radius = lo;
    est.failure_direction = failing;
    return est;
}

QuadraticConstants quadratic_constants(const LqrProblem& prob,
                                       const Kernel& p_star, const Kernel& p) {
    const Mat& a = prob.plant.a;
    const Mat& b = prob.plant.b;
    const Mat& r = prob.weights.r.mat();
    const int m = prob.input_dim();
    const int n = prob.state_dim();

    const Mat r_inv = matlin::solve_linear(r, Mat::identity(m));
    const double r_inv_f = frob_norm(r_inv);
    const double b_f2 = frob_norm(b) * frob_norm(b);
    const double a_f2 = frob_norm(a) * frob_norm(a);

    QuadraticConstants qc;
    const Mat g_star = r + transpose(b) * (p_star.p.mat() * b);
    qc.a0 = frob_norm(g_star) * r_inv_f * r_inv_f * b_f2 * a_f2;

    const Mat p_op = matlin::pmat(lqr::closed_loop(prob, p));
    const Mat p_op_inv = matlin::solve_linear(p_op, Mat::identity(n * n));
    const double factor = 1.0 + r_inv_f * b_f2 * frob_norm(p.p);
    qc.a1 = frob_norm(p_op_inv) * factor * factor;
    return qc;
}

IssFit iss_gain_fit(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3)
        throw InvalidArgumentError("iss_gain_fit: need at least 3 points");
    double sxx = 0.0, sxy = 0.0, sy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i > 0 && !(points[i].first > points[i - 1].first))
            throw InvalidArgumentError("iss_gain_fit: rho must be strictly increasing");
        sxx += points[i].first * points[i].first;
        sxy += points[i].first * points[i].second;
        sy += points[i].second;
        syy += points[i].second * points[i].second;
    }
    if (syy == 0.0)
        throw InvalidArgumentError("iss_gain_fit: all errors are zero");

    IssFit fit;
    fit.slope = sxy / sxx;
    const double mean = sy / static_cast<double>(points.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (const auto& [x, y] : points) {
        ss_res += (y - fit.slope * x) * (y - fit.slope * x);
        ss_tot += (y - mean) * (y - mean);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
    return fit;
}

} // namespace lqriter::analysis
