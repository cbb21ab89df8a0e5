#include "jclab/subspace.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace jclab {

std::uint64_t lambda_value(std::uint64_t m, unsigned k)
{
    if (k < 1)
        throw DomainError("photon number k must be >= 1");
    constexpr std::uint64_t limit = std::uint64_t{1} << 53;
    std::uint64_t p = 1;
    for (unsigned j = 1; j <= k; ++j) {
        const std::uint64_t factor = m + j;
        if (factor < m || p > limit / factor)
            throw DomainError("lambda_m = (m+k)!/m! exceeds 2^53 for m = " + std::to_string(m)
                              + ", k = " + std::to_string(k));
        p *= factor;
    }
    return p;
}

SubspaceBlock make_block(const FockSpaceSpec& spec, std::size_t m)
{
    spec.validate();
    if (m + spec.k > spec.cutoff - 1)
        throw DomainError("block m = " + std::to_string(m) + " needs photon level m + k = "
                          + std::to_string(m + spec.k) + " beyond cutoff - 1 = "
                          + std::to_string(spec.cutoff - 1));
    return {m, spec.k, lambda_value(m, spec.k), flat_index(spec, Atom::excited, m),
            flat_index(spec, Atom::ground, m + spec.k)};
}

Matrix2 project_block(const Operator& op, const SubspaceBlock& block)
{
    const auto dim = op.dim();
    if (block.upper >= dim || block.lower >= dim)
        throw DomainError("block indices outside operator dimension");
    const auto u = static_cast<Eigen::Index>(block.upper);
    const auto l = static_cast<Eigen::Index>(block.lower);
    const auto& a = op.matrix();
    Matrix2 out;
    out << a(u, u), a(u, l), a(l, u), a(l, l);
    return out;
}

BlockGenerators block_generators(const SubspaceBlock& block)
{
    const double s = block.sqrt_lambda();
    const double half_k = 0.5 * static_cast<double>(block.k);
    const double m = static_cast<double>(block.m);
    BlockGenerators g;
    g.Q << 0.0, 0.0, s, 0.0;
    g.Q_dag << 0.0, s, 0.0, 0.0;
    g.sigma_z << 1.0, 0.0, 0.0, -1.0;
    g.N << m + half_k, 0.0, 0.0, m + half_k + 1.0;
    return g;
}

double BlockClosureReport::max() const
{
    return std::max({leakage, anticommutator, square, commutator, n_prime});
}

namespace {

double scaled(const Matrix2& lhs, const Matrix2& rhs)
{
    const double scale = std::max({1.0, lhs.cwiseAbs().maxCoeff(), rhs.cwiseAbs().maxCoeff()});
    return (lhs - rhs).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

BlockClosureReport verify_block_closure(const FockSpaceSpec& spec, const SubspaceBlock& block,
                                        std::span<const Operator> hamiltonians, double tol)
{
    const Generators gens = build_generators(spec);
    const Matrix2 Q = project_block(gens.Q, block);
    const Matrix2 Qd = project_block(gens.Q_dag, block);
    const Matrix2 sz = project_block(gens.sigma_z, block);
    const double lambda = static_cast<double>(block.lambda);
    const Matrix2 id = Matrix2::Identity();

    BlockClosureReport r;
    r.anticommutator = scaled(Qd * Q + Q * Qd, lambda * id);
    r.square = scaled((Qd - Q) * (Qd - Q), -lambda * id);
    r.commutator = scaled(Qd * Q - Q * Qd, lambda * sz);
    r.n_prime = scaled(project_block(gens.N_prime, block), lambda * id);

    for (const Operator& h : hamiltonians) {
        const auto& a = h.matrix();
        for (const auto col : {block.upper, block.lower}) {
            for (Eigen::Index row = 0; row < a.rows(); ++row) {
                const auto urow = static_cast<std::size_t>(row);
                if (urow == block.upper || urow == block.lower)
                    continue;
                r.leakage = std::max(r.leakage, std::abs(a(row, static_cast<Eigen::Index>(col))));
            }
        }
    }
    if (r.max() > tol)
        throw VerificationError("block m = " + std::to_string(block.m)
                                + " fails closure: residual " + std::to_string(r.max()));
    return r;
}

Eigen::VectorXcd embed_state(const SubspaceBlock& block, std::size_t dim, const Vector2& components)
{
    if (block.upper >= dim || block.lower >= dim)
        throw DomainError("block indices outside state dimension");
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
    out(static_cast<Eigen::Index>(block.upper)) = components(0);
    out(static_cast<Eigen::Index>(block.lower)) = components(1);
    return out;
}

Vector2 restrict_state(const SubspaceBlock& block, const Eigen::VectorXcd& state)
{
    if (block.upper >= static_cast<std::size_t>(state.size())
        || block.lower >= static_cast<std::size_t>(state.size()))
        throw DomainError("block indices outside state dimension");
    return {state(static_cast<Eigen::Index>(block.upper)), state(static_cast<Eigen::Index>(block.lower))};
}

}  // namespace jclab
