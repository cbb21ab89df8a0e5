#pragma once

// Operators of the k-photon Jaynes-Cummings model on a truncated
// two-level x Fock space, and numerical checks of their superalgebra.
//
// Basis convention: atom-major. Flat index = atom * cutoff + n with
// atom 0 = excited (upper spinor component) and atom 1 = ground, n the photon
// number 0..cutoff-1. sigma_- maps excited to ground.

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "jclab/errors.hpp"
#include "jclab/params.hpp"

namespace jclab {

using cplx = std::complex<double>;

struct FockSpaceSpec {
    std::size_t cutoff = 16;
    unsigned k = 3;
    std::size_t guard = 3;

    /// guard defaults to k.
    static FockSpaceSpec make(std::size_t cutoff, unsigned k = 3,
                              std::optional<std::size_t> guard = std::nullopt);

    /// Throws ConfigError unless k >= 1, guard >= k and cutoff >= 2k + guard + 1.
    void validate() const;

    std::size_t dim() const noexcept { return 2 * cutoff; }
    /// Highest photon number included in checks of single-Q identities.
    std::size_t checked_level(std::size_t band) const noexcept { return cutoff - 1 - band; }
};

enum class Atom : std::size_t { excited = 0, ground = 1 };

std::size_t flat_index(const FockSpaceSpec& spec, Atom atom, std::size_t photons);
std::pair<Atom, std::size_t> split_index(const FockSpaceSpec& spec, std::size_t flat);

/// Dense operator on the truncated space.
class Operator {
public:
    Operator(std::size_t cutoff, Eigen::MatrixXcd matrix);

    std::size_t cutoff() const noexcept { return cutoff_; }
    std::size_t dim() const noexcept { return 2 * cutoff_; }
    const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }

    /// max |A - A^dagger| entry
    double hermiticity_defect() const;

private:
    std::size_t cutoff_;
    Eigen::MatrixXcd matrix_;
};

struct Ladder {
    Operator a;
    Operator a_dag;
};

/// Field ladder operators embedded as identity on the atom.
Ladder build_ladder(const FockSpaceSpec& spec);

struct Generators {
    Operator N;        ///< a†a + ((k-1)/2) sz + 1/2
    Operator N_prime;  ///< diag(a^k a†^k, a†^k a^k) in spinor blocks
    Operator Q;        ///< (a†)^k s-
    Operator Q_dag;    ///< a^k s+
    Operator sigma_z;
    Operator sigma_plus;
    Operator sigma_minus;
};

Generators build_generators(const FockSpaceSpec& spec);

/// Scale-normalised max-entry residual max|L - R| / max(1, max|L|, max|R|)
/// over the rows and columns whose photon number is <= max_level.
double guarded_residual(const FockSpaceSpec& spec, const Eigen::MatrixXcd& lhs,
                        const Eigen::MatrixXcd& rhs, std::size_t max_level);

struct IdentityResidual {
    std::string name;
    double residual;
    std::size_t max_level;  ///< highest photon number included
};

struct AlgebraReport {
    std::vector<IdentityResidual> identities;

    double max_residual() const;
    std::vector<IdentityResidual> failures(double tol) const;
};

/// Residuals of the ten superalgebra relations (twelve equalities, since
/// Q^2 = (Q†)^2 = 0 and {Q,sz} = {Q†,sz} = 0 are reported separately).
AlgebraReport algebra_residuals(const FockSpaceSpec& spec);

class AlgebraError : public VerificationError {
public:
    AlgebraError(const std::string& what, AlgebraReport report)
        : VerificationError(what), report_(std::move(report)) {}
    const AlgebraReport& report() const noexcept { return report_; }

private:
    AlgebraReport report_;
};

/// Throws AlgebraError naming every identity whose residual exceeds tol.
AlgebraReport verify_algebra(const FockSpaceSpec& spec, double tol);

/// H(t) as written with ladder operators.
Operator build_hamiltonian(const FockSpaceSpec& spec, const ModelParams& params, double t);

/// H(t) = w N + ((w0 - (k-1) w)/2) sz + g Q + g* Q† - w/2, the supersymmetric
/// rewrite; identical to build_hamiltonian up to rounding.
Operator build_hamiltonian_susy(const FockSpaceSpec& spec, const ModelParams& params, double t);

/// Full-space invariant -(sin(theta)/sqrt(lambda)) [e^{-i phi} Q + e^{i phi} Q†] + cos(theta) sz.
/// Meaningful on the block whose N' eigenvalue is lambda.
Operator build_invariant(const Generators& gens, double lambda, double theta, double phi);

}  // namespace jclab
