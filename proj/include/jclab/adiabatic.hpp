#pragma once

// Adiabatic limit: theta held fixed, g = |g| e^{-i phi} and phi' = w. The
// scenario builder chooses w0(t) so that theta is an exact fixed point of the
// auxiliary equations:
//
//   (k w - w0 - phi') sin(theta) = 2 |g| sqrt(lambda) cos(theta)
//   =>  w0 = (k - 1) w - 2 |g| sqrt(lambda) cot(theta).

#include <cstddef>

#include "jclab/aux_solver.hpp"
#include "jclab/fock_space.hpp"
#include "jclab/params.hpp"
#include "jclab/propagator.hpp"
#include "jclab/subspace.hpp"

namespace jclab {

struct AdiabaticScenario {
    double theta = 0.0;
    double phi0 = 0.0;
    double g_abs = 0.0;
    double period = 0.0;  ///< T with int_0^T w dt = 2 pi, unless overridden
    std::size_t m = 0;
    std::uint64_t lambda = 0;
    ModelParams params;   ///< w given, w0 and g derived

    /// phi(0) + int_0^t w
    double phi_at(double t) const;
    AuxState initial_state() const { return {theta, phi0}; }
};

/// T with int_0^T w dt = 2 pi for a constant, linear or polynomial w.
double cycle_period(const TimeProfile& omega);

/// Requires theta in (0, pi), g_abs >= 0 and a polynomial (or constant,
/// linear) w profile that is positive on the cycle; throws ConfigError
/// otherwise.
AdiabaticScenario build_adiabatic_scenario(double theta, const TimeProfile& omega, std::size_t m, unsigned k = 3,
                                           double g_abs = 0.05, double phi0 = 0.0);

/// |(k w - w0 - w) sin(theta) - 2 |g| sqrt(lambda) cos(theta)| at t.
double constraint_residual(const AdiabaticScenario& s, double t);

/// The invariant written through the couplings:
///   I = -2 cos(theta) / D [g Q + g* Q† - (D/2) sz],  D = k w - w0 - w.
/// Throws DomainError when |cos(theta)| < 1e-6.
Matrix2 adiabatic_invariant(const AdiabaticScenario& s, double t);

struct HIRelation {
    double residual = 0.0;           ///< H vs w N - w/2 - ((k-1)w - w0)/(2 cos(theta)) I
    double invariant_mismatch = 0.0; ///< coupling form of I vs the (theta, phi) form
};

/// Block-level check of the H-I relation at t. Throws DomainError when
/// |cos(theta)| < 1e-6 and VerificationError when either residual exceeds tol.
HIRelation check_H_I_relation(const AdiabaticScenario& s, double t, double tol = 1e-10);

/// -sigma pi (1 - cos(theta))
double berry_phase_cycle(double theta, int sigma);

/// -sigma/2 (1 - cos(theta)) int_0^T w dt by quadrature of w alone; valid for
/// any theta in [0, pi] including the poles.
double berry_phase_direct(double theta, const TimeProfile& omega, double period, int sigma);

struct FixedPointReport {
    double theta_deviation = 0.0;  ///< max |theta(t) - theta(0)|
    double rate_deviation = 0.0;   ///< max |phi'(t) - w(t)|
    double closure_error = 0.0;    ///< |phi(T) - phi(0) - 2 pi|
};

/// Solves the auxiliary equations over one cycle and integrates the geometric
/// phase rate along the solution. Throws VerificationError with a
/// cycle-closure message when |phi(T) - phi(0) - 2 pi| > 1e-6.
double berry_phase_numeric(const AdiabaticScenario& s, int sigma, const AuxOptions& options = {},
                           FixedPointReport* report = nullptr);

/// O(t) = U(t) O U†(t) for the block evolution operator of `solution`; this
/// ordering satisfies dO/dt + (1/i)[O, H] = 0 with U(t) e_sigma = Psi_sigma(t).
Operator evolved_invariant(const ExactSolution& solution, const Operator& op, double t);

}  // namespace jclab
