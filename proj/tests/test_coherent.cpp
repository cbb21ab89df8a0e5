#include <doctest.h>

#include <cmath>

#include "jclab/coherent.hpp"
#include "jclab/oracle.hpp"

using namespace jclab;

namespace {

ModelParams resonant(double g)
{
    ModelParams p;
    p.omega = TimeProfile::constant(1.0);
    p.omega0 = TimeProfile::constant(3.0);
    p.g_mod = TimeProfile::constant(g);
    return p;
}

// 1 - e^{-x} sum_{m<=M} x^m/m! summed directly
double tail_direct(double xi, std::size_t m_max)
{
    long double term = 1.0L, sum = 0.0L;
    const long double x = static_cast<long double>(xi) * xi;
    for (std::size_t m = 0; m <= m_max; ++m) {
        sum += term;
        term *= x / static_cast<long double>(m + 1);
    }
    long double rest = 0.0L;
    for (std::size_t m = m_max + 1; m < m_max + 200; ++m) {
        rest += term;
        term *= x / static_cast<long double>(m + 1);
    }
    return static_cast<double>(std::exp(-x) * rest);
}

}  // namespace

TEST_CASE("tail weight and truncation")
{
    for (double xi : {0.5, 1.0, 2.0})
        for (std::size_t m : {3u, 8u, 15u})
            CHECK(tail_weight(xi, m) == doctest::Approx(tail_direct(xi, m)).epsilon(1e-10));
    CHECK(tail_weight(0.0, 0) == 0.0);
    CHECK(choose_m_max(0.0) == 0);
    for (double xi : {0.5, 1.0, 2.0}) {
        const std::size_t m = choose_m_max(xi);
        CHECK(tail_direct(xi, m) < 1e-10);
        CHECK(tail_direct(xi, m - 1) >= 1e-10);
    }
}

TEST_CASE("weights")
{
    const CoherentSpec s{1.0, 6, 1};
    const auto w = coherent_weights(s);
    double fact = 1.0;
    for (std::size_t m = 0; m <= 6; ++m) {
        if (m > 0)
            fact *= static_cast<double>(m);
        CHECK(w[m] == doctest::Approx(std::exp(-0.5) / std::sqrt(fact)).epsilon(1e-14));
    }
    const auto zero = coherent_weights({0.0, 0, -1});
    CHECK(zero.size() == 1);
    CHECK(zero[0] == 1.0);
}

TEST_CASE("truncation errors")
{
    const auto space = FockSpaceSpec::make(24, 3);
    CHECK_THROWS_AS(validate_coherent(make_coherent_spec(2.0, 1), space), TruncationError);
    CHECK_NOTHROW(validate_coherent(make_coherent_spec(1.0, 1), space));
    CHECK_THROWS_AS(validate_coherent({1.0, 5, 1}, space), TruncationError);
}

TEST_CASE("atomic inversion of basis states")
{
    const auto space = FockSpaceSpec::make(10, 3);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(20);
    v(2) = 1.0;
    CHECK(atomic_inversion(space, v) == 1.0);
    v.setZero();
    v(10 + 5) = 1.0;
    CHECK(atomic_inversion(space, v) == -1.0);
}

TEST_CASE("xi = 0 reduces to the m = 0 solution")
{
    const auto space = FockSpaceSpec::make(16, 3);
    const ModelParams p = resonant(0.05);
    const CoherentSpec spec = make_coherent_spec(0.0, -1);
    const auto sols = solve_coherent_blocks(spec, space, p, {1.2, 0.2}, 10.0);
    CHECK(sols.size() == 1);
    const ExactSolution single = make_exact_solution(space, 0, p, {1.2, 0.2}, 10.0);
    for (double t : {0.0, 4.0, 10.0})
        CHECK((build_coherent_state(spec, t, sols) - single.exact_state(-1, t)).norm() == 0.0);
}

TEST_CASE("uncoupled start matches the textbook coherent state")
{
    // theta(0) cannot be exactly 0 (the chart is singular there); a tiny angle
    // leaves V(0) = 1 + O(theta)
    const auto space = FockSpaceSpec::make(24, 3);
    const CoherentSpec spec = make_coherent_spec(1.0, 1);
    const auto sols = solve_coherent_blocks(spec, space, resonant(0.0), {1e-7, 0.0}, 1.0);
    const Eigen::VectorXcd psi = build_coherent_state(spec, 0.0, sols);
    Eigen::VectorXcd textbook = Eigen::VectorXcd::Zero(48);
    double fact = 1.0;
    for (std::size_t n = 0; n <= spec.m_max; ++n) {
        if (n > 0)
            fact *= static_cast<double>(n);
        textbook(static_cast<Eigen::Index>(n)) = std::exp(-0.5) / std::sqrt(fact);
    }
    CHECK((psi - textbook).norm() < 1e-6);
}

TEST_CASE("coherent inversion agrees with the oracle")
{
    const auto space = FockSpaceSpec::make(32, 3);
    const ModelParams p = resonant(0.05);
    for (double xi : {0.5, 1.0, 2.0}) {
        const CoherentSpec spec = make_coherent_spec(xi, 1);
        const auto sols = solve_coherent_blocks(spec, space, p, {1.2, 0.2}, 20.0, {}, 2);
        const auto grid = uniform_grid(0.0, 20.0, 101);
        const PropagationResult r = propagate(coherent_initial_state(spec, sols), grid, p, space);
        double diff = 0.0, norm = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const Eigen::VectorXcd psi = build_coherent_state(spec, grid[i], sols);
            norm = std::max(norm, std::abs(psi.norm() - 1.0));
            diff = std::max(diff, std::abs(atomic_inversion(space, psi) - atomic_inversion(space, r.states[i])));
        }
        CHECK(diff < 1e-6);
        CHECK(norm < 1e-10);
    }
}
