#pragma once

// Auxiliary equations for the invariant parameters (theta, phi):
//
//   theta' cos(theta) e^{-i phi} - i phi' sin(theta) e^{-i phi}
//       + i[(k w - w0) sin(theta) e^{-i phi} - 2 g sqrt(lambda) cos(theta)] = 0
//   theta' - i sqrt(lambda) [g e^{i phi} - g* e^{-i phi}] = 0
//
// Separating real and imaginary parts gives the real system integrated here:
//
//   theta' = -2 sqrt(lambda) Im(g e^{i phi})
//   phi'   = (k w - w0) - 2 sqrt(lambda) Re(g e^{i phi}) cot(theta)
//
// residual_check evaluates the complex equations above directly, so the
// reduction is certified rather than trusted.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "jclab/dop853.hpp"
#include "jclab/params.hpp"
#include "jclab/subspace.hpp"

namespace jclab {

struct AuxState {
    double theta = 0.0;
    double phi = 0.0;  ///< unwrapped, continuous
};

struct AuxRate {
    double theta_dot = 0.0;
    double phi_dot = 0.0;
};

inline constexpr double default_theta_min = 1e-8;

/// Throws SingularityError when |sin theta| < theta_min.
AuxRate aux_rhs(const AuxState& state, double t, const ModelParams& params, std::uint64_t lambda,
                double theta_min = default_theta_min);

/// Left-hand sides of both complex auxiliary equations.
std::pair<std::complex<double>, std::complex<double>>
aux_equation_lhs(const AuxState& state, const AuxRate& rate, double t, const ModelParams& params,
                 std::uint64_t lambda);

struct AuxOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double theta_min = default_theta_min;
    /// Upper bound on the step size; 0 leaves it to the window length.
    double h_max = 0.0;
    /// solve_aux throws VerificationError if residual_check exceeds
    /// residual_factor * rtol.
    double residual_factor = 100.0;
};

struct SolverStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t evaluations = 0;
    double max_residual = 0.0;
};

/// Solution of the auxiliary equations on [t_begin, t_end].
///
/// Between accepted steps the trajectory is represented by the integrator's
/// own 7th order continuous extension, whose error is of the same order as the
/// local step error, so interpolated values and derivatives carry the solver
/// tolerance; no separate resampling grid is kept.
class AuxTrajectory {
public:
    using Segment = DenseSegment<2>;

    AuxTrajectory() = default;
    AuxTrajectory(std::vector<Segment> segments, SolverStats stats);

    double t_begin() const { return segments_.front().t0; }
    double t_end() const { return segments_.back().t1(); }
    bool empty() const { return segments_.empty(); }

    /// Throws DomainError outside [t_begin, t_end].
    AuxState state_at(double t) const;
    /// Derivative of the continuous extension (not the right-hand side).
    AuxRate derivative_at(double t) const;

    std::span<const Segment> segments() const { return segments_; }
    std::size_t locate(double t) const;

    /// Accepted step boundaries t_0 < t_1 < ... and the states there.
    std::vector<double> node_times() const;
    std::vector<AuxState> node_states() const;

    const SolverStats& stats() const { return stats_; }
    void set_max_residual(double r) { stats_.max_residual = r; }

private:
    std::vector<Segment> segments_;
    SolverStats stats_;
};

/// Adaptive DOP853 integration of the auxiliary equations on [t0, t1].
/// Throws ConfigError unless theta(0) is in (0, pi), SingularityError (with the
/// failure time) when theta reaches a pole, and
/// VerificationError if the result fails residual_check.
AuxTrajectory solve_aux(const AuxState& initial, double t0, double t1, const ModelParams& params,
                        std::uint64_t lambda, const AuxOptions& options = {});

/// Max modulus over both complex equations, evaluated at every step node and
/// step midpoint with derivatives taken from the continuous extension.
double residual_check(const AuxTrajectory& trajectory, const ModelParams& params,
                      std::uint64_t lambda);

/// Residual of both complex equations at one time, derivatives from the
/// continuous extension.
double residual_at(const AuxTrajectory& trajectory, double t, const ModelParams& params,
                   std::uint64_t lambda);

/// Block form of I(t) = -(sin(theta)/sqrt(lambda)) [e^{-i phi} Q + e^{i phi} Q†] + cos(theta) sz.
Matrix2 invariant_block(const AuxState& state, std::uint64_t lambda);

/// dI/dt for the block invariant given (theta', phi').
Matrix2 invariant_block_derivative(const AuxState& state, const AuxRate& rate, std::uint64_t lambda);

/// Max entry of dI/dt + (1/i)[I, H] on the block, over nodes and midpoints,
/// with the block Hamiltonian projected from the ladder-operator form.
double invariant_equation_residual(const AuxTrajectory& trajectory, const ModelParams& params,
                                   const SubspaceBlock& block);

/// Block restriction of H(t) built directly from its matrix elements.
Matrix2 block_hamiltonian(const ModelParams& params, const SubspaceBlock& block, double t);

/// Initial state with g e^{i phi} real positive and theta solving
/// (k w - w0 - w) sin(theta) = 2 |g| sqrt(lambda) cos(theta) at time t
/// (bisection on (0, pi)). Throws ConfigError when |g(t)| = 0.
AuxState adiabatic_matched_initial_state(const ModelParams& params, std::uint64_t lambda, double t = 0.0);

}  // namespace jclab
