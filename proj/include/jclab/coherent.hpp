#pragma once

// Time-dependent coherent superposition
//
//   |Phi_sigma(t)> = e^{-xi^2/2} sum_{m=0}^{m_max} xi^m / sqrt(m!) |Psi_{m,sigma}(t)>
//
// of exact block solutions that share one set of initial (theta, phi).

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "jclab/aux_solver.hpp"
#include "jclab/fock_space.hpp"
#include "jclab/params.hpp"
#include "jclab/propagator.hpp"

namespace jclab {

inline constexpr double default_tail_tolerance = 1e-10;

struct CoherentSpec {
    double xi = 1.0;
    std::size_t m_max = 0;
    int sigma = 1;
};

/// Poisson weight beyond m_max: e^{-xi^2} sum_{m > m_max} xi^{2m} / m!.
double tail_weight(double xi, std::size_t m_max);

/// Smallest m_max whose tail weight is below tol.
std::size_t choose_m_max(double xi, double tol = default_tail_tolerance);

/// CoherentSpec with m_max from the tail criterion.
CoherentSpec make_coherent_spec(double xi, int sigma, double tol = default_tail_tolerance);

/// e^{-xi^2/2} xi^m / sqrt(m!) for m = 0..m_max.
std::vector<double> coherent_weights(const CoherentSpec& spec);

/// Throws TruncationError when the tail weight is >= tol or the space cannot
/// hold block m_max with its guard band (cutoff >= m_max + k + guard + 1).
void validate_coherent(const CoherentSpec& spec, const FockSpaceSpec& space, double tol = default_tail_tolerance);

/// Exact block solutions for m = 0..m_max from the shared initial state,
/// solved on `jobs` threads. Results are ordered by m.
std::vector<ExactSolution> solve_coherent_blocks(const CoherentSpec& spec, const FockSpaceSpec& space,
                                                 const ModelParams& params, const AuxState& initial, double t_final,
                                                 const AuxOptions& options = {}, unsigned jobs = 1);

/// sum_m w_m Psi_{m,sigma}(t); solutions[m] must hold block m.
Eigen::VectorXcd build_coherent_state(const CoherentSpec& spec, double t, const std::vector<ExactSolution>& solutions);

/// The superposition at t = 0 rescaled to unit norm, as oracle input.
Eigen::VectorXcd coherent_initial_state(const CoherentSpec& spec, const std::vector<ExactSolution>& solutions);

/// <sigma_z> = sum over excited minus ground populations.
double atomic_inversion(const FockSpaceSpec& space, const Eigen::VectorXcd& state);

}  // namespace jclab
