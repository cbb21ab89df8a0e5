#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "jclab/oracle.hpp"
#include "jclab/propagator.hpp"

using namespace jclab;

namespace {

constexpr double pi = std::numbers::pi;
constexpr std::complex<double> I{0.0, 1.0};

ModelParams constant_params(double omega0, double g, double g_phase = 0.0)
{
    ModelParams p;
    p.omega = TimeProfile::constant(1.0);
    p.omega0 = TimeProfile::constant(omega0);
    p.g_mod = TimeProfile::constant(g);
    p.g_phase = TimeProfile::constant(g_phase);
    return p;
}

SubspaceBlock block_of(std::size_t m, unsigned k = 3)
{
    const auto spec = FockSpaceSpec::make(m + 3 * k + 1, k);
    return make_block(spec, m);
}

}  // namespace

TEST_CASE("beta")
{
    CHECK(beta({0.0, 0.4}, 6) == 0.0);
    CHECK(std::abs(beta({pi, 0.0}, 6) - (-(pi / 2) / std::sqrt(6.0))) < 1e-15);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int i = 0; i < 20; ++i) {
        const AuxState s{u(rng), 2.0 * u(rng)};
        CHECK(std::abs(std::abs(beta(s, 60)) - s.theta / (2.0 * std::sqrt(60.0))) < 1e-15);
    }
}

TEST_CASE("V: closed form against the exponential")
{
    CHECK((build_V({0.0, 1.0}) - Matrix2::Identity()).norm() == 0.0);
    Matrix2 flip;
    flip << 0.0, 1.0, -1.0, 0.0;
    CHECK((build_V({pi, 0.0}) - flip).norm() < 1e-15);

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> th(0.0, pi), ph(-pi, pi);
    for (unsigned k : {1u, 2u, 3u})
        for (std::size_t m : {0u, 2u}) {
            const SubspaceBlock b = block_of(m, k);
            const BlockGenerators g = block_generators(b);
            for (int i = 0; i < 20; ++i) {
                const AuxState s{th(rng), ph(rng)};
                const std::complex<double> bt = beta(s, b.lambda);
                const Matrix2 gen = bt * g.Q - std::conj(bt) * g.Q_dag;
                const Matrix2 expm = gen.exp();
                CHECK((build_V(s) - expm).cwiseAbs().maxCoeff() < 1e-13);
                CHECK((build_V_exponential(s, b) - expm).cwiseAbs().maxCoeff() < 1e-13);
                CHECK((build_V(s).adjoint() * build_V(s) - Matrix2::Identity()).cwiseAbs().maxCoeff() < 1e-15);
            }
        }
}

TEST_CASE("dV/dt against a centred difference")
{
    const AuxState s{1.1, 0.4};
    const AuxRate r{0.3, -0.7};
    const double h = 1e-5;
    const Matrix2 fd = (build_V({s.theta + h * r.theta_dot, s.phi + h * r.phi_dot})
                        - build_V({s.theta - h * r.theta_dot, s.phi - h * r.phi_dot}))
                       / (2.0 * h);
    CHECK((fd - build_V_derivative(s, r)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("V diagonalises the invariant")
{
    const SubspaceBlock b = block_of(0);
    CHECK(check_IV({0.7, 1.3}, b) < 1e-12);
    CHECK(check_IV({0.0, 0.0}, b) == 0.0);
    const Eigen::SelfAdjointEigenSolver<Matrix2> es(invariant_block({0.7, 1.3}, 6));
    CHECK(es.eigenvalues()(0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(es.eigenvalues()(1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("transformed Hamiltonian")
{
    const SubspaceBlock b = block_of(1);
    SUBCASE("uncoupled limit has the stated diagonal")
    {
        const ModelParams p = constant_params(2.8, 0.0);
        const AuxState s{0.9, 0.3};
        const AuxRate r = aux_rhs(s, 0.0, p, b.lambda);
        const HVComparison c = build_HV(s, r, 0.0, p, b);
        const double bracket = 0.5 * (2.8 - 3.0) * std::cos(s.theta) - 0.5 * r.phi_dot * (1.0 - std::cos(s.theta));
        CHECK(std::abs(c.direct(0, 0).real() - (2.5 + bracket)) < 1e-14);
        CHECK(std::abs(c.direct(1, 1).real() - (2.5 - bracket)) < 1e-14);
        CHECK(c.off_diagonal < 1e-15);
    }
    SUBCASE("off the auxiliary equations the off-diagonal part survives")
    {
        const ModelParams p = constant_params(3.0, 0.05);
        const HVComparison c = build_HV({1.0, 0.5}, {0.0, 0.0}, 0.0, p, b, 1e300);
        CHECK(c.off_diagonal > 1e-3);
    }
}

TEST_CASE("phase rates")
{
    const SubspaceBlock b = block_of(2);
    const ModelParams free = constant_params(3.0, 0.0);
    for (int s : {1, -1})
        CHECK(phase_rate_dynamical(s, 0.0, {pi / 2, 0.3}, free, b) == doctest::Approx(3.5));

    const ModelParams p = constant_params(2.9, 0.05, 0.3);
    const AuxState st{1.0, -0.2};
    CHECK(phase_rate_dynamical(1, 1.0, st, p, b) + phase_rate_dynamical(-1, 1.0, st, p, b)
          == doctest::Approx(7.0).epsilon(1e-14));

    const ModelParams res = constant_params(3.0, 0.05);
    CHECK(phase_rate_dynamical(1, 0.0, {pi / 2, 0.0}, res, b)
          == doctest::Approx(3.5 - std::sqrt(60.0) * 0.05).epsilon(1e-14));

    CHECK(phase_rate_geometric(1, {0.0, 0.0}, {0.0, 5.0}) == 0.0);
    CHECK(phase_rate_geometric(1, {pi / 2, 0.0}, {0.0, 1.0}) == doctest::Approx(-0.5));
    const AuxRate r{0.1, 0.7};
    CHECK(phase_rate_geometric(1, st, r) + phase_rate_geometric(-1, st, r) == 0.0);
}

TEST_CASE("constant couplings: exact states follow the 2x2 propagator")
{
    for (double omega0 : {3.0, 2.9})
        for (double g : {0.0, 0.05}) {
            const auto spec = FockSpaceSpec::make(16, 3);
            const ModelParams p = constant_params(omega0, g, 0.4);
            const ExactSolution sol = make_exact_solution(spec, 1, p, {1.2, 0.2}, 20.0);
            const Matrix2 h = block_hamiltonian(p, sol.block(), 0.0);
            for (int sigma : {1, -1}) {
                const Vector2 psi0 = sol.block_state(sigma, 0.0);
                CHECK((psi0 - build_V({1.2, 0.2}).col(sigma > 0 ? 0 : 1)).norm() == 0.0);
                for (double t : {0.5, 7.3, 20.0}) {
                    const Matrix2 u = (-I * t * h).exp();
                    CHECK((sol.block_state(sigma, t) - u * psi0).norm() < 1e-8);
                    CHECK(std::abs(sol.exact_state(sigma, t).norm() - 1.0) < 1e-12);
                }
            }
        }
}

TEST_CASE("evolution operator")
{
    const auto spec = FockSpaceSpec::make(16, 3);
    ModelParams p = constant_params(3.0, 0.05);
    p.omega0 = TimeProfile::sinusoid(3.0, 0.1, 0.5, 0.0);
    const ExactSolution sol = make_exact_solution(spec, 0, p, {1.2, 0.2}, 20.0);
    CHECK((sol.evolution_operator(0.0) - build_V({1.2, 0.2})).norm() == 0.0);
    for (double t : {1.0, 9.0, 17.0}) {
        const Matrix2 u = sol.evolution_operator(t);
        CHECK((u.adjoint() * u - Matrix2::Identity()).cwiseAbs().maxCoeff() < 1e-12);
        double previous = 1.0;
        for (double h : {1e-3, 1e-4}) {
            const Matrix2 lhs = I * (sol.evolution_operator(t + h) - sol.evolution_operator(t - h)) / (2.0 * h);
            const double err = (lhs - block_hamiltonian(p, sol.block(), t) * u).cwiseAbs().maxCoeff();
            CHECK(err < 10.0 * h * h + 1e-8);
            CHECK(err < previous);
            previous = err;
        }
    }
    const Operator full = sol.evolution_operator_full(5.0);
    CHECK(full.matrix()(3, 3) == 1.0);
}

TEST_CASE("superpositions")
{
    const auto spec = FockSpaceSpec::make(16, 3);
    const ModelParams free = constant_params(2.9, 0.0);
    const ExactSolution a = make_exact_solution(spec, 0, free, {1.2, 0.2}, 10.0);
    const ExactSolution b = make_exact_solution(spec, 2, free, {1.2, 0.2}, 10.0);

    const Component single[] = {{&a, 1, 1.0}};
    CHECK((general_solution(single, 4.0) - a.exact_state(1, 4.0)).norm() == 0.0);

    const double h = 1.0 / std::sqrt(2.0);
    const Component pair[] = {{&a, 1, h}, {&a, -1, h}};
    const std::vector<double> grid = uniform_grid(0.0, 10.0, 21);
    const PropagationResult res = propagate(general_solution(pair, 0.0), grid, free, spec);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(fidelity(general_solution(pair, grid[i]), res.states[i]) > 1.0 - 1e-10);

    const Component mixed[] = {{&a, 1, 0.6}, {&b, -1, std::complex<double>(0.0, 0.8)}};
    const auto recovered = recover_coefficients(mixed, general_solution(mixed, 0.0));
    CHECK(std::abs(recovered[0] - 0.6) < 1e-12);
    CHECK(std::abs(recovered[1] - std::complex<double>(0.0, 0.8)) < 1e-12);

    const Component repeated[] = {{&a, 1, h}, {&a, 1, h}};
    CHECK_THROWS_AS(general_solution(repeated, 0.0), DomainError);
    const Component unnormalised[] = {{&a, 1, 1.0}, {&b, 1, 1.0}};
    CHECK_THROWS_AS(general_solution(unnormalised, 0.0), DomainError);
}

TEST_CASE("geometric phase depends only on the trajectory")
{
    // same (theta, phi) samples, different frequencies: recomputed geometric
    // rate is unchanged
    const AuxState s{1.0, 0.3};
    const AuxRate r{0.02, 0.9};
    CHECK(phase_rate_geometric(1, s, r) == -0.5 * 0.9 * (1.0 - std::cos(1.0)));
}

TEST_CASE("invariant rebuilt from the trajectory is conserved by the oracle")
{
    const auto spec = FockSpaceSpec::make(16, 3);
    ModelParams p = constant_params(3.0, 0.05);
    p.omega0 = TimeProfile::sinusoid(3.0, 0.1, 0.5, 0.0);
    const SubspaceBlock b = make_block(spec, 2);
    const AuxTrajectory tr = solve_aux({1.2, 0.2}, 0.0, 20.0, p, b.lambda);
    const Generators g = build_generators(spec);
    const Eigen::VectorXcd init = embed_state(b, spec.dim(), Vector2(0.6, std::complex<double>(0.0, 0.8)));
    const PropagationResult r = propagate(init, uniform_grid(0.0, 20.0, 81), p, spec);
    const double drift = invariant_expectation_drift(
        [&](double t) {
            const AuxState s = tr.state_at(t);
            return build_invariant(g, static_cast<double>(b.lambda), s.theta, s.phi);
        },
        r);
    CHECK(drift < 1e-6);
}
