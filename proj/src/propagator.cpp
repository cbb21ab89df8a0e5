#include "jclab/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

#include <boost/math/quadrature/gauss.hpp>

namespace jclab {

namespace {

constexpr std::complex<double> I{0.0, 1.0};
using Gauss = boost::math::quadrature::gauss<double, 10>;

void require_sigma(int sigma)
{
    if (sigma != 1 && sigma != -1)
        throw DomainError("sigma must be +1 or -1");
}

Matrix2 exp_traceless(const Matrix2& a)
{
    const std::complex<double> d = std::sqrt(-a.determinant());
    if (std::abs(d) < 1e-8) {
        // cosh(d) = 1 + d^2/2 + d^4/24, sinh(d)/d = 1 + d^2/6 + d^4/120
        const std::complex<double> d2 = d * d;
        return (1.0 + d2 / 2.0 + d2 * d2 / 24.0) * Matrix2::Identity()
               + (1.0 + d2 / 6.0 + d2 * d2 / 120.0) * a;
    }
    return std::cosh(d) * Matrix2::Identity() + (std::sinh(d) / d) * a;
}

}  // namespace

std::complex<double> beta(const AuxState& state, std::uint64_t lambda)
{
    return -(0.5 * state.theta) * std::polar(1.0, -state.phi) / std::sqrt(static_cast<double>(lambda));
}

Matrix2 build_V(const AuxState& state)
{
    const double c = std::cos(0.5 * state.theta), s = std::sin(0.5 * state.theta);
    Matrix2 v;
    v << c, std::polar(s, state.phi), -std::polar(s, -state.phi), c;
    return v;
}

Matrix2 build_V_exponential(const AuxState& state, const SubspaceBlock& block)
{
    const BlockGenerators g = block_generators(block);
    const std::complex<double> b = beta(state, block.lambda);
    return exp_traceless(b * g.Q - std::conj(b) * g.Q_dag);
}

Matrix2 build_V_derivative(const AuxState& state, const AuxRate& rate)
{
    const double c = std::cos(0.5 * state.theta), s = std::sin(0.5 * state.theta);
    const std::complex<double> ep = std::polar(1.0, state.phi);
    const double dc = -0.5 * s * rate.theta_dot;
    Matrix2 dv;
    dv << dc, ep * (0.5 * c * rate.theta_dot + I * rate.phi_dot * s),
        -std::conj(ep) * (0.5 * c * rate.theta_dot - I * rate.phi_dot * s), dc;
    return dv;
}

Operator embed_block_operator(const Matrix2& op, const SubspaceBlock& block, const FockSpaceSpec& spec,
                              std::complex<double> outside)
{
    const auto n = static_cast<Eigen::Index>(spec.dim());
    if (block.upper >= spec.dim() || block.lower >= spec.dim())
        throw DomainError("block indices outside the Fock space");
    Eigen::MatrixXcd full = outside * Eigen::MatrixXcd::Identity(n, n);
    const std::array<Eigen::Index, 2> idx{static_cast<Eigen::Index>(block.upper),
                                          static_cast<Eigen::Index>(block.lower)};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            full(idx[i], idx[j]) = op(i, j);
    return {spec.cutoff, std::move(full)};
}

double check_IV(const AuxState& state, const SubspaceBlock& block, double tol)
{
    const Matrix2 v = build_V(state);
    const Matrix2 iv = v.adjoint() * invariant_block(state, block.lambda) * v;
    const double residual = (iv - block_generators(block).sigma_z).cwiseAbs().maxCoeff();
    if (!(residual <= tol))
        throw VerificationError("V† I V differs from sz by " + std::to_string(residual));
    return residual;
}

HVComparison build_HV(const AuxState& state, const AuxRate& rate, double t, const ModelParams& params,
                      const SubspaceBlock& block, double tol)
{
    const Couplings c = evaluate(params, t);
    const BlockGenerators gen = block_generators(block);
    const double kk = static_cast<double>(block.k);
    const double ct = std::cos(state.theta), st = std::sin(state.theta);
    const std::complex<double> ge = c.g * std::polar(1.0, state.phi);

    const double bracket = -block.sqrt_lambda() * ge.real() * st + 0.5 * (c.omega0 - kk * c.omega) * ct
                           - 0.5 * rate.phi_dot * (1.0 - ct);
    HVComparison out;
    out.formula = c.omega * gen.N + 0.5 * c.omega * (gen.sigma_z - Matrix2::Identity()) + bracket * gen.sigma_z;

    const Matrix2 v = build_V(state);
    out.direct = v.adjoint() * block_hamiltonian(params, block, t) * v
                 - I * v.adjoint() * build_V_derivative(state, rate);
    out.difference = (out.formula - out.direct).cwiseAbs().maxCoeff();
    out.off_diagonal = std::max(std::abs(out.direct(0, 1)), std::abs(out.direct(1, 0)));
    if (!(out.difference <= tol))
        throw VerificationError("transformed Hamiltonian: formula and direct evaluation differ by "
                                + std::to_string(out.difference));
    return out;
}

double phase_rate_dynamical(int sigma, double t, const AuxState& state, const ModelParams& params,
                            const SubspaceBlock& block)
{
    require_sigma(sigma);
    const Couplings c = evaluate(params, t);
    const double kk = static_cast<double>(block.k);
    const std::complex<double> ge = c.g * std::polar(1.0, state.phi);
    // block eigenvalue of N plus the (sz - 1)/2 shift
    const Matrix2 n = block_generators(block).N;
    const double constant = sigma > 0 ? n(0, 0).real() : n(1, 1).real() - 1.0;
    const double sg = static_cast<double>(sigma);
    return constant * c.omega - sg * block.sqrt_lambda() * ge.real() * std::sin(state.theta)
           + sg * 0.5 * (c.omega0 - kk * c.omega) * std::cos(state.theta);
}

double phase_rate_geometric(int sigma, const AuxState& state, const AuxRate& rate)
{
    require_sigma(sigma);
    return -static_cast<double>(sigma) * 0.5 * rate.phi_dot * (1.0 - std::cos(state.theta));
}

std::complex<double> PhaseLedger::factor() const
{
    return std::polar(1.0, -(phi_d + phi_g));
}

ExactSolution::ExactSolution(const FockSpaceSpec& spec, const SubspaceBlock& block, ModelParams params,
                             std::shared_ptr<const AuxTrajectory> trajectory)
    : spec_(spec), block_(block), params_(std::move(params)), trajectory_(std::move(trajectory))
{
    if (!trajectory_ || trajectory_->empty())
        throw DomainError("exact solution needs a solved trajectory");
    if (params_.k != spec_.k || block_.k != spec_.k)
        throw ConfigError("photon number k mismatch between space, block and model");
    const auto segs = trajectory_->segments();
    cumulative_.reserve(segs.size());
    Accumulated acc;
    for (const auto& seg : segs) {
        cumulative_.push_back(acc);
        const Accumulated part = integrate(seg, seg.t0, seg.t1());
        acc.d_plus += part.d_plus;
        acc.g_plus += part.g_plus;
        acc.d_minus += part.d_minus;
        acc.g_minus += part.g_minus;
    }
}

ExactSolution::Accumulated ExactSolution::integrate(const AuxTrajectory::Segment& seg, double a,
                                                    double b) const
{
    Accumulated out;
    if (b == a)
        return out;
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    const auto& x = Gauss::abscissa();
    const auto& w = Gauss::weights();
    auto add = [&](double t, double weight) {
        const Eigen::Vector2d y = seg.value(t);
        const AuxState s{y(0), y(1)};
        const AuxRate r = aux_rhs(s, t, params_, block_.lambda);
        out.d_plus += weight * phase_rate_dynamical(1, t, s, params_, block_);
        out.g_plus += weight * phase_rate_geometric(1, s, r);
        out.d_minus += weight * phase_rate_dynamical(-1, t, s, params_, block_);
        out.g_minus += weight * phase_rate_geometric(-1, s, r);
    };
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) {
            add(mid, w[i]);
        } else {
            add(mid - half * x[i], w[i]);
            add(mid + half * x[i], w[i]);
        }
    }
    out.d_plus *= half;
    out.g_plus *= half;
    out.d_minus *= half;
    out.g_minus *= half;
    return out;
}

PhaseLedger ExactSolution::ledger(int sigma, double t) const
{
    require_sigma(sigma);
    const std::size_t i = trajectory_->locate(t);
    const auto& seg = trajectory_->segments()[i];
    const Accumulated part = integrate(seg, seg.t0, t);
    const Accumulated& base = cumulative_[i];
    if (sigma > 0)
        return {1, base.d_plus + part.d_plus, base.g_plus + part.g_plus};
    return {-1, base.d_minus + part.d_minus, base.g_minus + part.g_minus};
}

Vector2 ExactSolution::block_state(int sigma, double t) const
{
    const PhaseLedger l = ledger(sigma, t);
    const Matrix2 v = build_V(trajectory_->state_at(t));
    return l.factor() * v.col(sigma > 0 ? 0 : 1);
}

Eigen::VectorXcd ExactSolution::exact_state(int sigma, double t) const
{
    return embed_state(block_, spec_.dim(), block_state(sigma, t));
}

Matrix2 ExactSolution::evolution_operator(double t) const
{
    Matrix2 u;
    u.col(0) = block_state(1, t);
    u.col(1) = block_state(-1, t);
    return u;
}

Operator ExactSolution::evolution_operator_full(double t) const
{
    return embed_block_operator(evolution_operator(t), block_, spec_);
}

ExactSolution make_exact_solution(const FockSpaceSpec& spec, std::size_t m, const ModelParams& params,
                                  const AuxState& initial, double t_final, const AuxOptions& options)
{
    const SubspaceBlock block = make_block(spec, m);
    auto traj = std::make_shared<const AuxTrajectory>(
        solve_aux(initial, 0.0, t_final, params, block.lambda, options));
    return {spec, block, params, std::move(traj)};
}

Eigen::VectorXcd general_solution(std::span<const Component> components, double t)
{
    if (components.empty())
        throw DomainError("general solution needs at least one component");
    std::set<std::pair<std::size_t, int>> seen;
    double weight = 0.0;
    for (const auto& c : components) {
        if (c.solution == nullptr)
            throw DomainError("component without solution");
        require_sigma(c.sigma);
        if (!seen.emplace(c.solution->block().m, c.sigma).second)
            throw DomainError("repeated (block, sigma) pair in superposition");
        weight += std::norm(c.coefficient);
    }
    if (std::abs(weight - 1.0) > 1e-12)
        throw DomainError("superposition coefficients not normalised: sum |C|^2 = " + std::to_string(weight));

    const auto dim = static_cast<Eigen::Index>(components.front().solution->space().dim());
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
    for (const auto& c : components) {
        if (static_cast<Eigen::Index>(c.solution->space().dim()) != dim)
            throw DomainError("components live in different Fock spaces");
        psi += c.coefficient * c.solution->exact_state(c.sigma, t);
    }
    return psi;
}

std::vector<std::complex<double>> recover_coefficients(std::span<const Component> components,
                                                       const Eigen::VectorXcd& initial)
{
    std::vector<std::complex<double>> out;
    out.reserve(components.size());
    for (const auto& c : components) {
        const double t0 = c.solution->trajectory().t_begin();
        out.push_back(c.solution->exact_state(c.sigma, t0).dot(initial));
    }
    return out;
}

}  // namespace jclab
