#pragma once

// Brute-force propagation of i d|psi>/dt = H(t)|psi> on the full truncated
// space. Used as ground truth for the analytic construction, so it depends
// only on the operator builders and on Boost.Odeint.

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "jclab/fock_space.hpp"
#include "jclab/params.hpp"

namespace jclab {

struct OracleOptions {
    double rtol = 1e-11;
    double atol = 1e-13;
    /// Runs whose max | |psi| - 1 | exceeds this are rejected.
    double norm_threshold = 1e-9;
    /// Runs whose weight in the top `guard` Fock levels exceeds this are rejected.
    double leakage_threshold = 1e-10;
};

struct PropagationResult {
    std::vector<double> times;
    std::vector<Eigen::VectorXcd> states;
    double norm_drift = 0.0;     ///< max_t | |psi(t)| - 1 |
    double n_prime_drift = 0.0;  ///< max_t |<N'>(t) - <N'>(0)|
    double leakage = 0.0;        ///< max_t weight in the guard band below the cutoff
    std::size_t steps = 0;
};

/// Integrates from times.front() through every entry of `times` (strictly
/// monotone, either direction). Throws DomainError for an initial state whose
/// norm differs from 1 by more than 1e-9 or support inside the guard band, VerificationError when norm drift
/// or leakage exceed the thresholds.
PropagationResult propagate(const Eigen::VectorXcd& initial, std::span<const double> times,
                            const ModelParams& params, const FockSpaceSpec& spec,
                            const OracleOptions& options = {});

/// Uniform grid of `samples` points on [t0, t1] (samples >= 2).
std::vector<double> uniform_grid(double t0, double t1, std::size_t samples);

/// |<a|b>|
double fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);
/// 1 - fidelity
double infidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

/// max_t |<psi(t)|op|psi(t)> - <psi(0)|op|psi(0)>| for a constant operator.
double invariant_expectation_drift(const Operator& op, const PropagationResult& result);

/// Same with op(t) rebuilt at every sample time.
double invariant_expectation_drift(const std::function<Operator(double)>& op,
                                   const PropagationResult& result);

/// Probability in each block (m = 0 .. cutoff-1-k) for one state.
std::vector<double> block_populations(const FockSpaceSpec& spec, const Eigen::VectorXcd& state);

}  // namespace jclab
