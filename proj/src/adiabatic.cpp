#include "jclab/adiabatic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

namespace jclab {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double poly_eval(const std::vector<double>& c, double t)
{
    double v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it)
        v = v * t + *it;
    return v;
}

std::vector<double> antiderivative(const std::vector<double>& c)
{
    std::vector<double> out(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i)
        out[i + 1] = c[i] / static_cast<double>(i + 1);
    return out;
}

void require_sigma(int sigma)
{
    if (sigma != 1 && sigma != -1)
        throw DomainError("sigma must be +1 or -1");
}

double cos_guarded(double theta)
{
    const double c = std::cos(theta);
    if (std::abs(c) < 1e-6)
        throw DomainError("cos(theta) = " + std::to_string(c) + " too close to zero for the H-I relation");
    return c;
}

}  // namespace

double cycle_period(const TimeProfile& omega)
{
    const std::vector<double> w = omega.polynomial_coefficients();
    if (w.empty())
        throw ConfigError("cycle period needs a constant, linear or polynomial omega profile");
    if (!(poly_eval(w, 0.0) > 0.0))
        throw ConfigError("omega must be positive at t = 0");
    const std::vector<double> integral = antiderivative(w);
    auto f = [&](double t) { return poly_eval(integral, t) - two_pi; };
    double hi = two_pi / poly_eval(w, 0.0);
    for (int i = 0; f(hi) < 0.0; ++i) {
        if (i > 60)
            throw ConfigError("omega profile never completes a cycle");
        hi *= 2.0;
    }
    boost::uintmax_t iters = 200;
    const auto root = boost::math::tools::toms748_solve(f, 0.0, hi, boost::math::tools::eps_tolerance<double>(), iters);
    return 0.5 * (root.first + root.second);
}

double AdiabaticScenario::phi_at(double t) const
{
    return -params.g_phase(t);
}

AdiabaticScenario build_adiabatic_scenario(double theta, const TimeProfile& omega, std::size_t m, unsigned k,
                                           double g_abs, double phi0)
{
    if (!(theta > 0.0 && theta < std::numbers::pi))
        throw ConfigError("adiabatic theta must lie in (0, pi)");
    if (!(g_abs >= 0.0) || !std::isfinite(g_abs))
        throw ConfigError("adiabatic |g| must be finite and >= 0");
    const std::vector<double> w = omega.polynomial_coefficients();
    if (w.empty())
        throw ConfigError("adiabatic scenarios need a constant, linear or polynomial omega profile");

    AdiabaticScenario s;
    s.theta = theta;
    s.phi0 = phi0;
    s.g_abs = g_abs;
    s.m = m;
    s.lambda = lambda_value(m, k);
    const double cot = std::cos(theta) / std::sin(theta);
    const double shift = 2.0 * g_abs * std::sqrt(static_cast<double>(s.lambda)) * cot;

    std::vector<double> w0(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        w0[i] = (static_cast<double>(k) - 1.0) * w[i];
    w0[0] -= shift;

    std::vector<double> phase = antiderivative(w);
    phase[0] = phi0;
    for (double& c : phase)
        c = -c;

    s.params.k = k;
    s.params.omega = TimeProfile::polynomial(w);
    s.params.omega0 = TimeProfile::polynomial(w0);
    s.params.g_mod = TimeProfile::constant(g_abs);
    s.params.g_phase = TimeProfile::polynomial(phase);

    s.period = cycle_period(omega);
    for (double t : {0.0, 0.5 * s.period, s.period})
        if (!(omega(t) > 0.0))
            throw ConfigError("adiabatic omega must stay positive over the cycle");
    return s;
}

double constraint_residual(const AdiabaticScenario& s, double t)
{
    const Couplings c = evaluate(s.params, t);
    const double kk = static_cast<double>(s.params.k);
    return std::abs((kk * c.omega - c.omega0 - c.omega) * std::sin(s.theta)
                    - 2.0 * std::abs(c.g) * std::sqrt(static_cast<double>(s.lambda)) * std::cos(s.theta));
}

Matrix2 adiabatic_invariant(const AdiabaticScenario& s, double t)
{
    const double ct = cos_guarded(s.theta);
    const Couplings c = evaluate(s.params, t);
    const double d = static_cast<double>(s.params.k) * c.omega - c.omega0 - c.omega;
    SubspaceBlock block;
    block.m = s.m;
    block.k = s.params.k;
    block.lambda = s.lambda;
    const BlockGenerators g = block_generators(block);
    return (-2.0 * ct / d) * (c.g * g.Q + std::conj(c.g) * g.Q_dag - 0.5 * d * g.sigma_z);
}

HIRelation check_H_I_relation(const AdiabaticScenario& s, double t, double tol)
{
    const double ct = cos_guarded(s.theta);
    SubspaceBlock block;
    block.m = s.m;
    block.k = s.params.k;
    block.lambda = s.lambda;
    const Couplings c = evaluate(s.params, t);
    const BlockGenerators g = block_generators(block);
    const Matrix2 inv = adiabatic_invariant(s, t);
    const double coeff = ((static_cast<double>(s.params.k) - 1.0) * c.omega - c.omega0) / (2.0 * ct);
    const Matrix2 rhs = c.omega * g.N - 0.5 * c.omega * Matrix2::Identity() - coeff * inv;

    HIRelation out;
    out.residual = (block_hamiltonian(s.params, block, t) - rhs).cwiseAbs().maxCoeff();
    out.invariant_mismatch = (inv - invariant_block({s.theta, s.phi_at(t)}, s.lambda)).cwiseAbs().maxCoeff();
    if (!(out.residual <= tol) || !(out.invariant_mismatch <= tol))
        throw VerificationError("H-I relation residual " + std::to_string(out.residual) + ", invariant mismatch "
                                + std::to_string(out.invariant_mismatch));
    return out;
}

double berry_phase_cycle(double theta, int sigma)
{
    require_sigma(sigma);
    return -static_cast<double>(sigma) * std::numbers::pi * (1.0 - std::cos(theta));
}

double berry_phase_direct(double theta, const TimeProfile& omega, double period, int sigma)
{
    require_sigma(sigma);
    if (!(theta >= 0.0 && theta <= std::numbers::pi))
        throw DomainError("theta must lie in [0, pi]");
    const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double t) { return omega(t); }, 0.0, period, 10, 1e-14);
    return -0.5 * static_cast<double>(sigma) * (1.0 - std::cos(theta)) * integral;
}

double berry_phase_numeric(const AdiabaticScenario& s, int sigma, const AuxOptions& options,
                           FixedPointReport* report)
{
    require_sigma(sigma);
    const auto traj = std::make_shared<const AuxTrajectory>(
        solve_aux(s.initial_state(), 0.0, s.period, s.params, s.lambda, options));

    FixedPointReport fp;
    const double phi_end = traj->state_at(s.period).phi;
    fp.closure_error = std::abs(phi_end - s.phi0 - 2.0 * std::numbers::pi);
    for (const auto& seg : traj->segments())
        for (double t : {seg.t0, seg.t0 + 0.5 * seg.h}) {
            const AuxState st = traj->state_at(t);
            const AuxRate r = aux_rhs(st, t, s.params, s.lambda, options.theta_min);
            fp.theta_deviation = std::max(fp.theta_deviation, std::abs(st.theta - s.theta));
            fp.rate_deviation = std::max(fp.rate_deviation, std::abs(r.phi_dot - s.params.omega(t)));
        }
    if (report != nullptr)
        *report = fp;
    if (fp.closure_error > 1e-6)
        throw VerificationError("cycle closure failed: phi(T) - phi(0) differs from 2 pi by "
                                + std::to_string(fp.closure_error));

    const FockSpaceSpec spec = FockSpaceSpec::make(s.m + 3 * s.params.k + 1, s.params.k);
    const ExactSolution sol(spec, make_block(spec, s.m), s.params, traj);
    return sol.ledger(sigma, s.period).phi_g;
}

Operator evolved_invariant(const ExactSolution& solution, const Operator& op, double t)
{
    if (op.cutoff() != solution.space().cutoff)
        throw DomainError("operator and solution live in different Fock spaces");
    const Eigen::MatrixXcd u = solution.evolution_operator_full(t).matrix();
    return {op.cutoff(), u * op.matrix() * u.adjoint()};
}

}  // namespace jclab
