#include "jclab/fock_space.hpp"

#include <algorithm>
#include <cmath>

namespace jclab {

namespace {

using Eigen::MatrixXcd;

MatrixXcd kron_atom(const Eigen::Matrix2cd& atom, const MatrixXcd& field)
{
    const Eigen::Index n = field.rows();
    MatrixXcd out = MatrixXcd::Zero(2 * n, 2 * n);
    for (Eigen::Index i = 0; i < 2; ++i)
        for (Eigen::Index j = 0; j < 2; ++j)
            if (atom(i, j) != cplx(0.0))
                out.block(i * n, j * n, n, n) = atom(i, j) * field;
    return out;
}

MatrixXcd field_creation(std::size_t cutoff)
{
    const auto n = static_cast<Eigen::Index>(cutoff);
    MatrixXcd ad = MatrixXcd::Zero(n, n);
    for (Eigen::Index m = 0; m + 1 < n; ++m)
        ad(m + 1, m) = std::sqrt(static_cast<double>(m + 1));
    return ad;
}

MatrixXcd matrix_power(const MatrixXcd& base, unsigned p)
{
    MatrixXcd out = MatrixXcd::Identity(base.rows(), base.cols());
    for (unsigned i = 0; i < p; ++i)
        out = out * base;
    return out;
}

// prod_{j=lo..hi} j as a double; exact for the sizes used here (< 2^53)
double falling_product(std::size_t lo, std::size_t hi)
{
    double p = 1.0;
    for (std::size_t j = lo; j <= hi; ++j)
        p *= static_cast<double>(j);
    return p;
}

Eigen::Matrix2cd spin(int which)
{
    Eigen::Matrix2cd s = Eigen::Matrix2cd::Zero();
    switch (which) {
    case 0: s(0, 0) = 1.0; s(1, 1) = -1.0; break;  // sz
    case 1: s(0, 1) = 1.0; break;                  // s+ : ground -> excited
    case 2: s(1, 0) = 1.0; break;                  // s- : excited -> ground
    default: break;
    }
    return s;
}

}  // namespace

FockSpaceSpec FockSpaceSpec::make(std::size_t cutoff, unsigned k, std::optional<std::size_t> guard)
{
    FockSpaceSpec spec{cutoff, k, guard.value_or(k)};
    spec.validate();
    return spec;
}

void FockSpaceSpec::validate() const
{
    if (k < 1)
        throw ConfigError("photon number k must be >= 1");
    if (guard < k)
        throw ConfigError("guard (" + std::to_string(guard) + ") must be >= k ("
                          + std::to_string(k) + ")");
    if (cutoff < 2 * static_cast<std::size_t>(k) + guard + 1)
        throw ConfigError("cutoff " + std::to_string(cutoff) + " too small: need >= 2k + guard + 1 = "
                          + std::to_string(2 * k + guard + 1));
}

std::size_t flat_index(const FockSpaceSpec& spec, Atom atom, std::size_t photons)
{
    if (photons >= spec.cutoff)
        throw DomainError("photon number " + std::to_string(photons) + " outside cutoff "
                          + std::to_string(spec.cutoff));
    return static_cast<std::size_t>(atom) * spec.cutoff + photons;
}

std::pair<Atom, std::size_t> split_index(const FockSpaceSpec& spec, std::size_t flat)
{
    if (flat >= spec.dim())
        throw DomainError("flat index " + std::to_string(flat) + " outside dimension "
                          + std::to_string(spec.dim()));
    return {static_cast<Atom>(flat / spec.cutoff), flat % spec.cutoff};
}

Operator::Operator(std::size_t cutoff, Eigen::MatrixXcd matrix)
    : cutoff_(cutoff), matrix_(std::move(matrix))
{
    const auto n = static_cast<Eigen::Index>(2 * cutoff_);
    if (matrix_.rows() != n || matrix_.cols() != n)
        throw DomainError("operator matrix must be " + std::to_string(n) + " x " + std::to_string(n));
}

double Operator::hermiticity_defect() const
{
    return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

Ladder build_ladder(const FockSpaceSpec& spec)
{
    spec.validate();
    const MatrixXcd ad = field_creation(spec.cutoff);
    const Eigen::Matrix2cd id2 = Eigen::Matrix2cd::Identity();
    return {Operator(spec.cutoff, kron_atom(id2, ad.adjoint())),
            Operator(spec.cutoff, kron_atom(id2, ad))};
}

Generators build_generators(const FockSpaceSpec& spec)
{
    spec.validate();
    const std::size_t n = spec.cutoff;
    const unsigned k = spec.k;
    const MatrixXcd ad = field_creation(n);
    const MatrixXcd ad_k = matrix_power(ad, k);
    const MatrixXcd a_k = ad_k.adjoint();

    MatrixXcd number = MatrixXcd::Zero(n, n);
    for (std::size_t m = 0; m < n; ++m)
        number(m, m) = static_cast<double>(m);

    const MatrixXcd sz = kron_atom(spin(0), MatrixXcd::Identity(n, n));
    const MatrixXcd id = MatrixXcd::Identity(2 * n, 2 * n);

    MatrixXcd N = kron_atom(Eigen::Matrix2cd::Identity(), number)
                  + 0.5 * static_cast<double>(k - 1) * sz + 0.5 * id;

    // a^k a†^k |m> = (m+k)!/m! |m>,  a†^k a^k |m> = m!/(m-k)! |m>
    MatrixXcd np = MatrixXcd::Zero(2 * n, 2 * n);
    for (std::size_t m = 0; m < n; ++m) {
        np(m, m) = falling_product(m + 1, m + k);
        np(n + m, n + m) = m >= k ? falling_product(m - k + 1, m) : 0.0;
    }

    return {Operator(n, std::move(N)),
            Operator(n, std::move(np)),
            Operator(n, kron_atom(spin(2), ad_k)),
            Operator(n, kron_atom(spin(1), a_k)),
            Operator(n, sz),
            Operator(n, kron_atom(spin(1), MatrixXcd::Identity(n, n))),
            Operator(n, kron_atom(spin(2), MatrixXcd::Identity(n, n)))};
}

double guarded_residual(const FockSpaceSpec& spec, const Eigen::MatrixXcd& lhs,
                        const Eigen::MatrixXcd& rhs, std::size_t max_level)
{
    std::vector<Eigen::Index> keep;
    for (std::size_t i = 0; i < spec.dim(); ++i)
        if (i % spec.cutoff <= max_level)
            keep.push_back(static_cast<Eigen::Index>(i));

    double diff = 0.0, scale = 1.0;
    for (Eigen::Index c : keep) {
        for (Eigen::Index r : keep) {
            diff = std::max(diff, std::abs(lhs(r, c) - rhs(r, c)));
            scale = std::max({scale, std::abs(lhs(r, c)), std::abs(rhs(r, c))});
        }
    }
    return diff / scale;
}

double AlgebraReport::max_residual() const
{
    double m = 0.0;
    for (const auto& id : identities)
        m = std::max(m, id.residual);
    return m;
}

std::vector<IdentityResidual> AlgebraReport::failures(double tol) const
{
    std::vector<IdentityResidual> out;
    for (const auto& id : identities)
        if (!(id.residual <= tol))
            out.push_back(id);
    return out;
}

AlgebraReport algebra_residuals(const FockSpaceSpec& spec)
{
    const Generators g = build_generators(spec);
    const MatrixXcd& N = g.N.matrix();
    const MatrixXcd& Np = g.N_prime.matrix();
    const MatrixXcd& Q = g.Q.matrix();
    const MatrixXcd& Qd = g.Q_dag.matrix();
    const MatrixXcd& sz = g.sigma_z.matrix();
    const MatrixXcd zero = MatrixXcd::Zero(Q.rows(), Q.cols());

    auto comm = [](const MatrixXcd& x, const MatrixXcd& y) -> MatrixXcd { return x * y - y * x; };
    auto anti = [](const MatrixXcd& x, const MatrixXcd& y) -> MatrixXcd { return x * y + y * x; };

    const std::size_t single = spec.checked_level(spec.guard);
    const std::size_t product =
        spec.checked_level(std::max<std::size_t>(spec.guard, 2 * static_cast<std::size_t>(spec.k)));

    AlgebraReport report;
    auto add = [&](std::string name, const MatrixXcd& lhs, const MatrixXcd& rhs, std::size_t level) {
        report.identities.push_back({std::move(name), guarded_residual(spec, lhs, rhs, level), level});
    };
    const MatrixXcd diff = Qd - Q;
    add("Q^2 = 0", Q * Q, zero, single);
    add("(Q+)^2 = 0", Qd * Qd, zero, single);
    add("[Q+,Q] = N'sz", comm(Qd, Q), Np * sz, product);
    add("[N,N'] = 0", comm(N, Np), zero, product);
    add("[N,Q] = Q", comm(N, Q), Q, single);
    add("[N,Q+] = -Q+", comm(N, Qd), -Qd, single);
    add("{Q+,Q} = N'", anti(Qd, Q), Np, product);
    add("{Q,sz} = 0", anti(Q, sz), zero, single);
    add("{Q+,sz} = 0", anti(Qd, sz), zero, single);
    add("[Q,sz] = 2Q", comm(Q, sz), 2.0 * Q, single);
    add("[Q+,sz] = -2Q+", comm(Qd, sz), -2.0 * Qd, single);
    add("(Q+ - Q)^2 = -N'", diff * diff, -Np, product);
    return report;
}

AlgebraReport verify_algebra(const FockSpaceSpec& spec, double tol)
{
    AlgebraReport report = algebra_residuals(spec);
    const auto bad = report.failures(tol);
    if (!bad.empty()) {
        std::string msg = "superalgebra identities exceed tolerance:";
        for (const auto& id : bad)
            msg += " [" + id.name + "]";
        throw AlgebraError(msg, std::move(report));
    }
    return report;
}

Operator build_hamiltonian(const FockSpaceSpec& spec, const ModelParams& params, double t)
{
    spec.validate();
    if (params.k != spec.k)
        throw ConfigError("model photon number k does not match the Fock space");
    const Couplings c = evaluate(params, t);
    const std::size_t n = spec.cutoff;
    const MatrixXcd ad = field_creation(n);
    const MatrixXcd ad_k = matrix_power(ad, spec.k);
    const MatrixXcd number = ad * ad.adjoint();

    MatrixXcd h = c.omega * kron_atom(Eigen::Matrix2cd::Identity(), number)
                  + 0.5 * c.omega0 * kron_atom(spin(0), MatrixXcd::Identity(n, n))
                  + c.g * kron_atom(spin(2), ad_k)
                  + std::conj(c.g) * kron_atom(spin(1), ad_k.adjoint());
    return {n, std::move(h)};
}

Operator build_hamiltonian_susy(const FockSpaceSpec& spec, const ModelParams& params, double t)
{
    if (params.k != spec.k)
        throw ConfigError("model photon number k does not match the Fock space");
    const Couplings c = evaluate(params, t);
    const Generators g = build_generators(spec);
    const double kk = static_cast<double>(spec.k);
    MatrixXcd h = c.omega * g.N.matrix()
                  + 0.5 * (c.omega0 - (kk - 1.0) * c.omega) * g.sigma_z.matrix()
                  + c.g * g.Q.matrix() + std::conj(c.g) * g.Q_dag.matrix()
                  - 0.5 * c.omega * MatrixXcd::Identity(spec.dim(), spec.dim());
    return {spec.cutoff, std::move(h)};
}

Operator build_invariant(const Generators& gens, double lambda, double theta, double phi)
{
    const double s = std::sin(theta) / std::sqrt(lambda);
    MatrixXcd inv = -s * (std::polar(1.0, -phi) * gens.Q.matrix() + std::polar(1.0, phi) * gens.Q_dag.matrix())
                    + std::cos(theta) * gens.sigma_z.matrix();
    return {gens.Q.cutoff(), std::move(inv)};
}

}  // namespace jclab
