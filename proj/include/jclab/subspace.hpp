#pragma once

// Two-dimensional invariant blocks span{(|m>, excited), (|m+k>, ground)}
// labelled by the N' eigenvalue lambda_m = (m+k)!/m!.

#include <cmath>
#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "jclab/fock_space.hpp"

namespace jclab {

using Matrix2 = Eigen::Matrix2cd;
using Vector2 = Eigen::Vector2cd;

/// (m+k)!/m! computed as an exact integer product. Throws DomainError when
/// the result exceeds 2^53, the largest range where it is also exact as a
/// double.
std::uint64_t lambda_value(std::uint64_t m, unsigned k);

struct SubspaceBlock {
    std::size_t m = 0;
    unsigned k = 3;
    std::uint64_t lambda = 6;
    std::size_t upper = 0;  ///< flat index of (|m>, excited)
    std::size_t lower = 0;  ///< flat index of (|m+k>, ground)

    double sqrt_lambda() const { return std::sqrt(static_cast<double>(lambda)); }
};

/// Rejects m + k > cutoff - 1.
SubspaceBlock make_block(const FockSpaceSpec& spec, std::size_t m);

/// Restriction of op to span{upper, lower}, ordered (upper, lower).
Matrix2 project_block(const Operator& op, const SubspaceBlock& block);

/// Closed-form block images of Q, Q†, sz and N.
struct BlockGenerators {
    Matrix2 Q;
    Matrix2 Q_dag;
    Matrix2 sigma_z;
    Matrix2 N;
};

BlockGenerators block_generators(const SubspaceBlock& block);

struct BlockClosureReport {
    double leakage = 0.0;          ///< max |H_ij| with j in the block and i outside
    double anticommutator = 0.0;   ///< {Q†,Q} - lambda
    double square = 0.0;           ///< (Q† - Q)^2 + lambda
    double commutator = 0.0;       ///< [Q†,Q] - lambda sz
    double n_prime = 0.0;          ///< project(N') - lambda

    double max() const;
};

/// Checks that every supplied Hamiltonian maps the block into itself and that
/// the block-level quasialgebra holds. Throws VerificationError above tol.
BlockClosureReport verify_block_closure(const FockSpaceSpec& spec, const SubspaceBlock& block,
                                        std::span<const Operator> hamiltonians, double tol = 1e-13);

Eigen::VectorXcd embed_state(const SubspaceBlock& block, std::size_t dim, const Vector2& components);

/// Components of a full-space vector on the block basis.
Vector2 restrict_state(const SubspaceBlock& block, const Eigen::VectorXcd& state);

}  // namespace jclab
