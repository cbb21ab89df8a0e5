#include "jclab/aux_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace jclab {

namespace {

using Vec2 = Eigen::Vector2d;
constexpr std::complex<double> I{0.0, 1.0};

// theta must stay strictly inside (0, pi): a step may jump across a pole
// without ever evaluating the right-hand side close to it.
void check_chart(const AuxTrajectory::Segment& seg, double theta_min)
{
    auto outside = [&](double t) {
        const double th = seg.value(t)(0);
        return !(th > theta_min && th < std::numbers::pi - theta_min);
    };
    constexpr int probes = 8;
    double good = seg.t0;
    for (int i = 1; i <= probes; ++i) {
        const double t = seg.t0 + seg.h * static_cast<double>(i) / probes;
        if (!outside(t)) {
            good = t;
            continue;
        }
        double lo = good, hi = t;
        for (int j = 0; j < 60; ++j) {
            const double mid = 0.5 * (lo + hi);
            (outside(mid) ? hi : lo) = mid;
        }
        throw SingularityError("auxiliary trajectory reaches a pole of the (theta, phi) chart at t = "
                                   + std::to_string(hi),
                               hi);
    }
}

}  // namespace

AuxRate aux_rhs(const AuxState& state, double t, const ModelParams& params, std::uint64_t lambda,
                double theta_min)
{
    const double s = std::sin(state.theta);
    if (std::abs(s) < theta_min)
        throw SingularityError("auxiliary equations singular: |sin(theta)| = " + std::to_string(std::abs(s))
                                   + " at t = " + std::to_string(t),
                               t);
    const Couplings c = evaluate(params, t);
    const double root = std::sqrt(static_cast<double>(lambda));
    const std::complex<double> ge = c.g * std::polar(1.0, state.phi);
    const double kk = static_cast<double>(params.k);
    return {-2.0 * root * ge.imag(),
            (kk * c.omega - c.omega0) - 2.0 * root * ge.real() * std::cos(state.theta) / s};
}

std::pair<std::complex<double>, std::complex<double>>
aux_equation_lhs(const AuxState& state, const AuxRate& rate, double t, const ModelParams& params,
                 std::uint64_t lambda)
{
    const Couplings c = evaluate(params, t);
    const double root = std::sqrt(static_cast<double>(lambda));
    const double kk = static_cast<double>(params.k);
    const double ct = std::cos(state.theta), st = std::sin(state.theta);
    const std::complex<double> em = std::polar(1.0, -state.phi);
    const std::complex<double> ep = std::polar(1.0, state.phi);

    const std::complex<double> first = rate.theta_dot * ct * em - I * rate.phi_dot * st * em
                                       + I * ((kk * c.omega - c.omega0) * st * em - 2.0 * c.g * root * ct);
    const std::complex<double> second = rate.theta_dot - I * root * (c.g * ep - std::conj(c.g) * em);
    return {first, second};
}

AuxTrajectory::AuxTrajectory(std::vector<Segment> segments, SolverStats stats)
    : segments_(std::move(segments)), stats_(stats)
{
    if (segments_.empty())
        throw DomainError("trajectory needs at least one step");
}

std::size_t AuxTrajectory::locate(double t) const
{
    if (segments_.empty())
        throw DomainError("empty trajectory");
    if (!(t >= t_begin() && t <= t_end()))
        throw DomainError("t = " + std::to_string(t) + " outside trajectory window ["
                          + std::to_string(t_begin()) + ", " + std::to_string(t_end()) + "]");
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double x, const Segment& s) { return x < s.t0; });
    if (it == segments_.begin())
        return 0;
    return static_cast<std::size_t>(std::distance(segments_.begin(), it)) - 1;
}

AuxState AuxTrajectory::state_at(double t) const
{
    const Vec2 v = segments_[locate(t)].value(t);
    return {v(0), v(1)};
}

AuxRate AuxTrajectory::derivative_at(double t) const
{
    const Vec2 d = segments_[locate(t)].derivative(t);
    return {d(0), d(1)};
}

std::vector<double> AuxTrajectory::node_times() const
{
    std::vector<double> out;
    out.reserve(segments_.size() + 1);
    for (const auto& s : segments_)
        out.push_back(s.t0);
    out.push_back(t_end());
    return out;
}

std::vector<AuxState> AuxTrajectory::node_states() const
{
    std::vector<AuxState> out;
    out.reserve(segments_.size() + 1);
    for (const auto& s : segments_)
        out.push_back({s.r[0](0), s.r[0](1)});
    const Vec2 last = segments_.back().value(t_end());
    out.push_back({last(0), last(1)});
    return out;
}

AuxTrajectory solve_aux(const AuxState& initial, double t0, double t1, const ModelParams& params,
                        std::uint64_t lambda, const AuxOptions& options)
{
    if (!(t1 > t0))
        throw ConfigError("auxiliary window must satisfy t1 > t0");
    if (!std::isfinite(initial.theta) || !std::isfinite(initial.phi))
        throw ConfigError("initial (theta, phi) must be finite");
    if (!(initial.theta > 0.0 && initial.theta < std::numbers::pi))
        throw ConfigError("initial theta must lie in (0, pi)");

    auto rhs = [&](double t, const Vec2& y) -> Vec2 {
        const AuxRate r = aux_rhs({y(0), y(1)}, t, params, lambda, options.theta_min);
        return {r.theta_dot, r.phi_dot};
    };

    std::vector<AuxTrajectory::Segment> segments;
    Dop853Options opt;
    opt.rtol = options.rtol;
    opt.atol = options.atol;
    opt.h_max = options.h_max;
    Dop853Stats raw;
    try {
        raw = dop853_integrate<2>(rhs, t0, Vec2{initial.theta, initial.phi}, t1, opt,
                                  [&](const AuxTrajectory::Segment& s) {
                                      check_chart(s, options.theta_min);
                                      segments.push_back(s);
                                  });
    } catch (const IntegrationError& e) {
        throw SingularityError(std::string("auxiliary integration failed: ") + e.what(), e.time());
    }

    SolverStats stats{raw.accepted, raw.rejected, raw.evaluations, 0.0};
    AuxTrajectory traj(std::move(segments), stats);
    const double residual = residual_check(traj, params, lambda);
    traj.set_max_residual(residual);
    if (!(residual <= options.residual_factor * options.rtol))
        throw VerificationError("auxiliary trajectory residual " + std::to_string(residual) + " exceeds "
                                + std::to_string(options.residual_factor * options.rtol));
    return traj;
}

double residual_at(const AuxTrajectory& trajectory, double t, const ModelParams& params,
                   std::uint64_t lambda)
{
    const auto [a, b] =
        aux_equation_lhs(trajectory.state_at(t), trajectory.derivative_at(t), t, params, lambda);
    return std::max(std::abs(a), std::abs(b));
}

namespace {

template <class F>
double max_over_probe_times(const AuxTrajectory& trajectory, F&& f)
{
    double worst = 0.0;
    for (const auto& seg : trajectory.segments()) {
        worst = std::max(worst, f(seg.t0));
        worst = std::max(worst, f(seg.t0 + 0.5 * seg.h));
    }
    worst = std::max(worst, f(trajectory.t_end()));
    return worst;
}

}  // namespace

double residual_check(const AuxTrajectory& trajectory, const ModelParams& params, std::uint64_t lambda)
{
    if (trajectory.empty())
        throw DomainError("residual_check needs a nonempty trajectory");
    return max_over_probe_times(trajectory,
                                [&](double t) { return residual_at(trajectory, t, params, lambda); });
}

Matrix2 invariant_block(const AuxState& state, std::uint64_t lambda)
{
    const double root = std::sqrt(static_cast<double>(lambda));
    Matrix2 q, qd, sz;
    q << 0.0, 0.0, root, 0.0;
    qd << 0.0, root, 0.0, 0.0;
    sz << 1.0, 0.0, 0.0, -1.0;
    return -(std::sin(state.theta) / root)
               * (std::polar(1.0, -state.phi) * q + std::polar(1.0, state.phi) * qd)
           + std::cos(state.theta) * sz;
}

// sqrt(lambda) cancels against the block matrix elements of Q and Q†
Matrix2 invariant_block_derivative(const AuxState& state, const AuxRate& rate, std::uint64_t /*lambda*/)
{
    const double c = std::cos(state.theta), s = std::sin(state.theta);
    const std::complex<double> ep = std::polar(1.0, state.phi);
    const std::complex<double> em = std::conj(ep);
    Matrix2 d;
    d << -s * rate.theta_dot, -(c * rate.theta_dot + I * s * rate.phi_dot) * ep,
        -(c * rate.theta_dot - I * s * rate.phi_dot) * em, s * rate.theta_dot;
    return d;
}

Matrix2 block_hamiltonian(const ModelParams& params, const SubspaceBlock& block, double t)
{
    const Couplings c = evaluate(params, t);
    const double m = static_cast<double>(block.m);
    const double kk = static_cast<double>(block.k);
    const double root = block.sqrt_lambda();
    Matrix2 h;
    h << m * c.omega + 0.5 * c.omega0, std::conj(c.g) * root, c.g * root,
        (m + kk) * c.omega - 0.5 * c.omega0;
    return h;
}

double invariant_equation_residual(const AuxTrajectory& trajectory, const ModelParams& params,
                                   const SubspaceBlock& block)
{
    return max_over_probe_times(trajectory, [&](double t) {
        const AuxState s = trajectory.state_at(t);
        const AuxRate r = trajectory.derivative_at(t);
        const Matrix2 inv = invariant_block(s, block.lambda);
        const Matrix2 h = block_hamiltonian(params, block, t);
        const Matrix2 res = invariant_block_derivative(s, r, block.lambda) - I * (inv * h - h * inv);
        return res.cwiseAbs().maxCoeff();
    });
}

AuxState adiabatic_matched_initial_state(const ModelParams& params, std::uint64_t lambda, double t)
{
    const Couplings c = evaluate(params, t);
    const double modulus = std::abs(c.g);
    if (modulus == 0.0)
        throw ConfigError("adiabatic-matched initial state needs |g| > 0");
    const double kk = static_cast<double>(params.k);
    const double a = kk * c.omega - c.omega0 - c.omega;
    const double b = 2.0 * modulus * std::sqrt(static_cast<double>(lambda));
    auto f = [&](double th) { return a * std::sin(th) - b * std::cos(th); };

    double lo = 0.0, hi = std::numbers::pi;  // f(lo) = -b < 0 < b = f(hi)
    for (int i = 0; i < 200 && hi - lo > 4e-16; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return {0.5 * (lo + hi), -std::arg(c.g)};
}

}  // namespace jclab
