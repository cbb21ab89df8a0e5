#pragma once

// Exact solutions of the time-dependent Schrodinger equation within one
// N'-block, assembled from the invariant parameters (theta, phi):
//
//   |Psi_sigma(t)> = exp(-i (Phi_d + Phi_g)) V(t) e_sigma,
//   V(t) = exp(beta Q - beta* Q†),  beta = -(theta/2) e^{-i phi} / sqrt(lambda),
//
// with e_{+1} = (|m>, 0) and e_{-1} = (0, |m+k>).

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "jclab/aux_solver.hpp"
#include "jclab/fock_space.hpp"
#include "jclab/params.hpp"
#include "jclab/subspace.hpp"

namespace jclab {

std::complex<double> beta(const AuxState& state, std::uint64_t lambda);

/// Closed form [[cos(theta/2), e^{i phi} sin(theta/2)], [-e^{-i phi} sin(theta/2), cos(theta/2)]].
Matrix2 build_V(const AuxState& state);

/// Exponential of the block projection of beta Q - beta* Q†, evaluated with
/// the 2x2 traceless formula exp(A) = cosh(d) + sinh(d)/d A, d^2 = -det A.
Matrix2 build_V_exponential(const AuxState& state, const SubspaceBlock& block);

/// dV/dt of the closed form.
Matrix2 build_V_derivative(const AuxState& state, const AuxRate& rate);

/// Full-space operator acting as `op` on the block and as `outside` times the
/// identity elsewhere.
Operator embed_block_operator(const Matrix2& op, const SubspaceBlock& block, const FockSpaceSpec& spec,
                              std::complex<double> outside = 1.0);

/// max |V† I V - sz|. Throws VerificationError above tol.
double check_IV(const AuxState& state, const SubspaceBlock& block, double tol = 1e-12);

struct HVComparison {
    Matrix2 formula;  ///< closed expression for the transformed Hamiltonian
    Matrix2 direct;   ///< V† H V - i V† dV/dt
    double difference = 0.0;
    double off_diagonal = 0.0;  ///< max off-diagonal magnitude of `direct`
};

/// Throws VerificationError when formula and direct differ by more than tol.
HVComparison build_HV(const AuxState& state, const AuxRate& rate, double t, const ModelParams& params,
                      const SubspaceBlock& block, double tol = 1e-8);

/// Dynamical phase rate (m + k/2) w -/+ (sqrt(lambda)/2)[g e^{i phi} + c.c.] sin(theta)
/// +/- ((w0 - k w)/2) cos(theta); upper signs for sigma = +1. The constant term
/// comes from the block eigenvalues of N.
double phase_rate_dynamical(int sigma, double t, const AuxState& state, const ModelParams& params,
                            const SubspaceBlock& block);

/// Geometric phase rate -sigma (phi'/2)(1 - cos(theta)).
double phase_rate_geometric(int sigma, const AuxState& state, const AuxRate& rate);

struct PhaseLedger {
    int sigma = 1;
    double phi_d = 0.0;
    double phi_g = 0.0;

    /// exp(-i (phi_d + phi_g))
    std::complex<double> factor() const;
};

/// The two particular solutions in one block, sampled from a solved
/// auxiliary trajectory. Immutable after construction.
class ExactSolution {
public:
    ExactSolution(const FockSpaceSpec& spec, const SubspaceBlock& block, ModelParams params,
                  std::shared_ptr<const AuxTrajectory> trajectory);

    const FockSpaceSpec& space() const { return spec_; }
    const SubspaceBlock& block() const { return block_; }
    const ModelParams& params() const { return params_; }
    const AuxTrajectory& trajectory() const { return *trajectory_; }

    /// Accumulated phases at t; throws DomainError outside the trajectory window.
    PhaseLedger ledger(int sigma, double t) const;

    Vector2 block_state(int sigma, double t) const;
    Eigen::VectorXcd exact_state(int sigma, double t) const;

    /// U(t) = V(t) diag(phase_+, phase_-); columns are the block states.
    Matrix2 evolution_operator(double t) const;
    /// U(t) on the block, identity elsewhere.
    Operator evolution_operator_full(double t) const;

private:
    struct Accumulated {
        double d_plus = 0.0, g_plus = 0.0, d_minus = 0.0, g_minus = 0.0;
    };
    Accumulated integrate(const AuxTrajectory::Segment& seg, double a, double b) const;

    FockSpaceSpec spec_;
    SubspaceBlock block_;
    ModelParams params_;
    std::shared_ptr<const AuxTrajectory> trajectory_;
    std::vector<Accumulated> cumulative_;  ///< at each segment start
};

/// Solves the auxiliary equations and wraps the result.
ExactSolution make_exact_solution(const FockSpaceSpec& spec, std::size_t m, const ModelParams& params,
                                  const AuxState& initial, double t_final, const AuxOptions& options = {});

struct Component {
    const ExactSolution* solution = nullptr;
    int sigma = 1;
    std::complex<double> coefficient = 1.0;
};

/// sum_n C_n |Psi_n(t)>. Requires distinct (block, sigma) pairs and
/// sum |C_n|^2 = 1 within 1e-12; throws DomainError otherwise.
Eigen::VectorXcd general_solution(std::span<const Component> components, double t);

/// C_n = <Psi_n(0)|Psi(0)> for each (solution, sigma) in `components`
/// (their coefficients are ignored).
std::vector<std::complex<double>> recover_coefficients(std::span<const Component> components,
                                                       const Eigen::VectorXcd& initial);

}  // namespace jclab
