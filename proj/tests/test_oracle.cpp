#include <doctest.h>

#include <cmath>
#include <complex>

#include "jclab/oracle.hpp"
#include "jclab/subspace.hpp"

using namespace jclab;

namespace {

constexpr std::complex<double> I{0.0, 1.0};

ModelParams scenario(double g)
{
    ModelParams p;
    p.omega = TimeProfile::constant(1.0);
    p.omega0 = TimeProfile::sinusoid(3.0, 0.1, 0.5, 0.0);
    p.g_mod = TimeProfile::constant(g);
    p.g_phase = TimeProfile::constant(0.3);
    return p;
}

Eigen::VectorXcd unit(const FockSpaceSpec& spec, std::size_t index)
{
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(spec.dim()));
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return v;
}

}  // namespace

TEST_CASE("uncoupled evolution is a pure phase")
{
    const auto spec = FockSpaceSpec::make(16, 3);
    ModelParams p;
    p.omega = TimeProfile::constant(1.0);
    p.omega0 = TimeProfile::constant(3.0);
    const std::size_t m = 2;
    const Eigen::VectorXcd init = unit(spec, flat_index(spec, Atom::excited, m));
    const auto grid = uniform_grid(0.0, 20.0, 41);
    const PropagationResult r = propagate(init, grid, p, spec);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Eigen::VectorXcd expected = std::exp(-I * (m + 1.5) * grid[i]) * init;
        CHECK((r.states[i] - expected).norm() < 1e-9);
    }
}

TEST_CASE("conservation and block confinement")
{
    const auto spec = FockSpaceSpec::make(16, 3);
    const ModelParams p = scenario(0.05);
    const SubspaceBlock b = make_block(spec, 1);
    const Eigen::VectorXcd init = embed_state(b, spec.dim(), Vector2(0.6, 0.8));
    const auto grid = uniform_grid(0.0, 20.0, 81);
    const PropagationResult r = propagate(init, grid, p, spec);
    CHECK(r.norm_drift < 1e-9);
    CHECK(r.n_prime_drift < 1e-8);
    CHECK(r.leakage == 0.0);
    double outside = 0.0;
    for (const auto& s : r.states)
    {
        Eigen::VectorXcd rest = s;
        rest(static_cast<Eigen::Index>(b.upper)) = 0.0;
        rest(static_cast<Eigen::Index>(b.lower)) = 0.0;
        outside = std::max(outside, rest.norm());
    }
    CHECK(outside < 1e-10);
    const Generators g = build_generators(spec);
    CHECK(invariant_expectation_drift(g.N_prime, r) < 1e-8);
    // sigma_z is not conserved: the check is not vacuous
    CHECK(invariant_expectation_drift(g.sigma_z, r) > 0.1);
    const auto pops = block_populations(spec, r.states.back());
    CHECK(std::abs(pops[1] - 1.0) < 1e-9);
}

TEST_CASE("forward then backward returns the initial state")
{
    const auto spec = FockSpaceSpec::make(16, 3);
    const ModelParams p = scenario(0.05);
    const Eigen::VectorXcd init = embed_state(make_block(spec, 0), spec.dim(), Vector2(1.0, 0.0));
    const double fwd[] = {0.0, 20.0};
    const PropagationResult a = propagate(init, fwd, p, spec);
    const double bwd[] = {20.0, 0.0};
    const PropagationResult b = propagate(a.states.back(), bwd, p, spec);
    CHECK(infidelity(init, b.states.back()) < 1e-8);
}

TEST_CASE("fidelity")
{
    const auto spec = FockSpaceSpec::make(10, 3);
    const Eigen::VectorXcd a = unit(spec, 0), b = unit(spec, 1);
    CHECK(fidelity(a, a) == 1.0);
    CHECK(fidelity(a, b) == 0.0);
    CHECK(fidelity(a, std::polar(1.0, 0.7) * a) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(infidelity(a, a) == 0.0);
}

TEST_CASE("preconditions")
{
    const auto spec = FockSpaceSpec::make(16, 3);
    const ModelParams p = scenario(0.05);
    const auto grid = uniform_grid(0.0, 1.0, 3);
    CHECK_THROWS_AS(propagate(2.0 * unit(spec, 0), grid, p, spec), DomainError);
    CHECK_THROWS_AS(propagate(unit(spec, 14), grid, p, spec), DomainError);
    const double bad[] = {0.0, 1.0, 0.5};
    CHECK_THROWS_AS(propagate(unit(spec, 0), bad, p, spec), DomainError);
}

TEST_CASE("a loose oracle is rejected by the norm threshold")
{
    const auto spec = FockSpaceSpec::make(16, 3);
    const ModelParams p = scenario(0.05);
    OracleOptions loose;
    loose.rtol = 1e-3;
    loose.atol = 1e-3;
    const Eigen::VectorXcd init = embed_state(make_block(spec, 2), spec.dim(), Vector2(1.0, 0.0));
    CHECK_THROWS_AS(propagate(init, uniform_grid(0.0, 20.0, 5), p, spec, loose), VerificationError);
}
