#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "lqriter/analysis.hpp"
#include "lqriter/experiment.hpp"
#include "lqriter/matlin.hpp"

using namespace lqriter;
using namespace lqriter::analysis;
using lqr::Kernel;
using lqr::LqrProblem;
using lqriter::testing::worked_scalar;
using matlin::frob_norm;

namespace {

const double kScalarPstar = (0.25 + std::sqrt(4.0625)) / 2.0;
const double kScalarAstar = 0.5 / (1.0 + kScalarPstar); // = a - b·L(p*)

Kernel scalar_kernel(double p) { return Kernel(SymMat(Mat(1, 1, {p}))); }

struct BenchSetup {
    LqrProblem prob;
    Kernel p_star;
    PepsWeight peps;
};

const BenchSetup& bench() {
    static const BenchSetup setup = [] {
        LqrProblem prob = experiment::paper_eq27();
        Kernel p_star = oracle::solve_dare_bruteforce(prob).p_star;
        PepsWeight peps = construct_peps(prob, p_star);
        return BenchSetup{prob, p_star, peps};
    }();
    return setup;
}

} // namespace

TEST_CASE("construct_peps on the scalar problem") {
    const PepsWeight w = construct_peps(worked_scalar(), scalar_kernel(kScalarPstar));
    // M = 1/(1-a*^2) ≈ 1.0581574 normalizes to peps = 1
    CHECK(w.peps(0, 0) == doctest::Approx(1.0));
    CHECK(w.contraction_at_optimum == doctest::Approx(std::fabs(kScalarAstar)));
}

TEST_CASE("construct_peps when the closed loop is nilpotent") {
    const LqrProblem prob(
        lqr::Plant(Mat(2, 2), Mat::identity(2)),
        lqr::CostWeights(SymMat::identity(2), SymMat::identity(2)));
    const Kernel p_star = oracle::solve_dare_bruteforce(prob).p_star;
    const PepsWeight w = construct_peps(prob, p_star);
    CHECK(testing::frob_diff(w.peps, SymMat::identity(2)) <= 1e-12);
    CHECK(w.contraction_at_optimum == doctest::Approx(0.0));
}

TEST_CASE("construct_peps on the benchmark system") {
    const BenchSetup& setup = bench();
    CHECK(setup.peps.contraction_at_optimum < 1.0);
    // golden, generated by this implementation
    CHECK(setup.peps.contraction_at_optimum ==
          doctest::Approx(0.96854745).epsilon(1e-6));
    CHECK(matlin::max_eig(setup.peps.peps) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(matlin::min_eig(setup.peps.peps) > 0.0);
}

TEST_CASE("construct_peps rejects a non-solution") {
    CHECK_THROWS_AS(construct_peps(worked_scalar(), scalar_kernel(0.0)),
                    InvalidArgumentError);
}

TEST_CASE("peps weights certify on random problems") {
    Rng rng(71);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 4);
        const int m = 1 + static_cast<int>(rng.next_u64() % 3);
        const LqrProblem prob = testing::random_stabilizable_problem(rng, n, m);
        const Kernel p_star = oracle::solve_dare_bruteforce(prob).p_star;
        const PepsWeight w = construct_peps(prob, p_star);
        CHECK(w.contraction_at_optimum < 1.0);
        const double lmax = matlin::max_eig(w.peps);
        CHECK(lmax >= 1.0 - 1e-10);
        CHECK(lmax <= 1.0 + 1e-12);
    }
}

TEST_CASE("estimate_contraction") {
    const LqrProblem prob = worked_scalar();
    const Kernel p_star = scalar_kernel(kScalarPstar);
    const solvers::Reference ref{p_star, SymMat::identity(1)};

    const auto trace = solvers::vi_run(prob, Kernel(2.0 * p_star.p),
                                       solvers::StopRule(1e-12, 10000), ref);
    const double rate = estimate_contraction(trace, ref, NormKind::frobenius);
    CHECK(rate < 1.0);
    CHECK(rate == doctest::Approx(kScalarAstar * kScalarAstar).epsilon(1e-3));
    CHECK(estimate_contraction(trace, ref, NormKind::peps) ==
          doctest::Approx(rate).epsilon(1e-9)); // peps = 1 for scalars

    // starting exactly at the fixed point leaves nothing to measure
    const auto degenerate =
        solvers::vi_run(prob, p_star, solvers::StopRule(1e-12, 100), ref);
    CHECK_THROWS_AS(estimate_contraction(degenerate, ref, NormKind::frobenius),
                    InvalidArgumentError);

    const solvers::Reference no_peps{p_star, std::nullopt};
    CHECK_THROWS_AS(estimate_contraction(trace, no_peps, NormKind::peps),
                    InvalidArgumentError);
}

TEST_CASE("estimate_contraction on the benchmark system") {
    const BenchSetup& setup = bench();
    const solvers::Reference ref{setup.p_star, setup.peps.peps};
    const auto trace = solvers::vi_run(setup.prob, Kernel(2.0 * setup.p_star.p),
                                       solvers::StopRule(1e-12, 2000), ref);
    const double rate = estimate_contraction(trace, ref, NormKind::peps);
    CHECK(rate > 0.0);
    CHECK(rate < 1.0);
    // golden: the realized weighted ratio peaks just above the squared
    // contraction of the optimal closed loop
    CHECK(rate == doctest::Approx(0.938471).epsilon(1e-4));
}

TEST_CASE("probe_delta0 finds the scalar stability boundary") {
    // a = 1.01, b = 1 with the benchmark weights: kernels stabilize iff
    // p > a - 1, so the ball is bounded by p* - 0.01 from below
    const LqrProblem prob = testing::scalar_problem(1.01, 1.0, 0.001, 1.0);
    const double p_star = oracle::scalar_dare_closed_form(1.01, 1.0, 0.001, 1.0);
    Rng rng(72);
    const BallEstimate est =
        probe_delta0(prob, scalar_kernel(p_star), 16, 1.0, rng);
    CHECK(est.radius == doctest::Approx(p_star - 0.01).epsilon(1e-3));
    CHECK(est.directions_tested == 16);
    REQUIRE(est.failure_direction.has_value());
    CHECK((*est.failure_direction)(0, 0) == doctest::Approx(-1.0));
}

TEST_CASE("probe_delta0 reaches the cap along semidefinite-increasing directions") {
    const BenchSetup& setup = bench();
    const std::vector<SymMat> up = {
        SymMat::from_average((1.0 / std::sqrt(3.0)) * Mat::identity(3))};
    const BallEstimate est = probe_delta0_along(setup.prob, setup.p_star, up, 1.0);
    CHECK(est.radius == 1.0);
    CHECK_FALSE(est.failure_direction.has_value());
}

TEST_CASE("probe_delta0 is positive on random stabilizable problems") {
    Rng rng(73);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 4);
        const int m = 1 + static_cast<int>(rng.next_u64() % 3);
        const LqrProblem prob = testing::random_stabilizable_problem(rng, n, m);
        const Kernel p_star = oracle::solve_dare_bruteforce(prob).p_star;
        const BallEstimate est = probe_delta0(
            prob, p_star, 16, std::max(1.0, frob_norm(p_star.p)), rng);
        CHECK(est.radius > 0.0);
    }
}

TEST_CASE("probe_delta1 stays within delta0 and certifies contraction") {
    const BenchSetup& setup = bench();
    Rng rng(74);
    const BallEstimate d0 = probe_delta0(setup.prob, setup.p_star, 64, 1.0, rng);
    const BallEstimate d1 =
        probe_delta1(setup.prob, setup.p_star, d0.radius, 64, rng);
    CHECK(d1.radius > 0.0);
    CHECK(d1.radius <= d0.radius);

    // samples inside the returned ball do contract in one step
    for (int trial = 0; trial < 20; ++trial) {
        const SymMat dir = random_sym_direction(3, rng);
        const double t = rng.uniform(0.0, 1.0) * 0.999 * d1.radius;
        const Kernel p0(SymMat::from_average(setup.p_star.p.mat() + t * dir.mat()));
        const double e0 = testing::frob_diff(p0.p, setup.p_star.p);
        if (e0 < 1e-12) continue;
        const Kernel p1 = solvers::pi_step_from_kernel(setup.prob, p0);
        CHECK(testing::frob_diff(p1.p, setup.p_star.p) < e0);
    }
}

TEST_CASE("probe_delta1 hits the cap when one step is exact") {
    // A = 0: policy iteration lands on P* = Q in a single step
    const LqrProblem prob(
        lqr::Plant(Mat(2, 2), Mat::identity(2)),
        lqr::CostWeights(SymMat::identity(2), SymMat::identity(2)));
    const Kernel p_star = oracle::solve_dare_bruteforce(prob).p_star;
    Rng rng(75);
    const BallEstimate est = probe_delta1(prob, p_star, 0.5, 16, rng);
    CHECK(est.radius == 0.5);
}

TEST_CASE("quadratic_constants on the scalar problem") {
    const LqrProblem prob = worked_scalar();
    const Kernel p_star = scalar_kernel(kScalarPstar);
    const QuadraticConstants at_opt = quadratic_constants(prob, p_star, p_star);
    CHECK(at_opt.a0 == doctest::Approx((1.0 + kScalarPstar) * 0.25));
    const double expected_a1 = (1.0 / (1.0 - kScalarAstar * kScalarAstar)) *
                               (1.0 + kScalarPstar) * (1.0 + kScalarPstar);
    CHECK(at_opt.a1 == doctest::Approx(expected_a1));

    // the Newton bound holds for the hand-computed first step
    const Kernel p0 = scalar_kernel(4.0 / 3.0);
    const QuadraticConstants qc = quadratic_constants(prob, p_star, p0);
    const double e0 = std::fabs(4.0 / 3.0 - kScalarPstar);
    const double e1 = std::fabs(212.0 / 187.0 - kScalarPstar);
    CHECK(e1 <= qc.a0 * qc.a1 * e0 * e0);

    // no input authority: a0 collapses to zero
    const LqrProblem no_input = testing::scalar_problem(0.5, 0.0, 1.0, 1.0);
    const Kernel lyap = scalar_kernel(4.0 / 3.0);
    CHECK(quadratic_constants(no_input, lyap, lyap).a0 == 0.0);
}

TEST_CASE("iss_gain_fit") {
    std::vector<std::pair<double, double>> exact = {
        {1.0, 3.0}, {2.0, 6.0}, {3.0, 9.0}};
    const IssFit fit = iss_gain_fit(exact);
    CHECK(fit.slope == doctest::Approx(3.0));
    CHECK(fit.r_squared == doctest::Approx(1.0));

    CHECK_THROWS_AS(iss_gain_fit({{1.0, 1.0}, {2.0, 2.0}}), InvalidArgumentError);
    CHECK_THROWS_AS(iss_gain_fit({{1.0, 1.0}, {1.0, 2.0}, {2.0, 3.0}}),
                    InvalidArgumentError);
    CHECK_THROWS_AS(iss_gain_fit({{1.0, 0.0}, {2.0, 0.0}, {3.0, 0.0}}),
                    InvalidArgumentError);
}
