#include "jclab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Sparse>
#include <boost/numeric/odeint.hpp>

namespace jclab {

namespace {

using State = std::vector<std::complex<double>>;
namespace odeint = boost::numeric::odeint;

// H(t) = w(t) n + (w0(t)/2) sz + g(t) Q + g*(t) Q†; the diagonal pieces are
// kept as vectors and Q as a sparse matrix.
class Rhs {
public:
    Rhs(const FockSpaceSpec& spec, const ModelParams& params) : params_(params)
    {
        const Ladder lad = build_ladder(spec);
        const Generators gens = build_generators(spec);
        number_ = (lad.a_dag.matrix() * lad.a.matrix()).diagonal().real();
        sz_ = gens.sigma_z.matrix().diagonal().real();
        q_ = gens.Q.matrix().sparseView();
        q_dag_ = gens.Q_dag.matrix().sparseView();
    }

    void operator()(const State& psi, State& dpsi, double t) const
    {
        const Couplings c = evaluate(params_, t);
        const auto n = static_cast<Eigen::Index>(psi.size());
        Eigen::Map<const Eigen::VectorXcd> x(psi.data(), n);
        Eigen::Map<Eigen::VectorXcd> y(dpsi.data(), n);
        const std::complex<double> mi{0.0, -1.0};
        y = (c.omega * number_ + 0.5 * c.omega0 * sz_).cast<std::complex<double>>().cwiseProduct(x);
        y += c.g * (q_ * x) + std::conj(c.g) * (q_dag_ * x);
        y *= mi;
    }

private:
    const ModelParams& params_;
    Eigen::VectorXd number_;
    Eigen::VectorXd sz_;
    Eigen::SparseMatrix<std::complex<double>> q_;
    Eigen::SparseMatrix<std::complex<double>> q_dag_;
};

double guard_weight(const FockSpaceSpec& spec, const Eigen::VectorXcd& psi)
{
    double w = 0.0;
    for (std::size_t atom = 0; atom < 2; ++atom)
        for (std::size_t n = spec.cutoff - spec.guard; n < spec.cutoff; ++n)
            w += std::norm(psi(static_cast<Eigen::Index>(atom * spec.cutoff + n)));
    return w;
}

double expectation(const Eigen::MatrixXcd& op, const Eigen::VectorXcd& psi)
{
    return psi.dot(op * psi).real();
}

}  // namespace

std::vector<double> uniform_grid(double t0, double t1, std::size_t samples)
{
    if (samples < 2)
        throw DomainError("time grid needs at least two samples");
    std::vector<double> out(samples);
    for (std::size_t i = 0; i < samples; ++i)
        out[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(samples - 1);
    out.back() = t1;
    return out;
}

PropagationResult propagate(const Eigen::VectorXcd& initial, std::span<const double> times,
                            const ModelParams& params, const FockSpaceSpec& spec, const OracleOptions& options)
{
    spec.validate();
    if (params.k != spec.k)
        throw ConfigError("model photon number k does not match the Fock space");
    if (static_cast<std::size_t>(initial.size()) != spec.dim())
        throw DomainError("initial state dimension does not match the Fock space");
    if (std::abs(initial.norm() - 1.0) > 1e-9)
        throw DomainError("initial state is not normalised");
    if (guard_weight(spec, initial) > 0.0)
        throw DomainError("initial state has support within " + std::to_string(spec.guard)
                          + " levels of the cutoff");
    if (times.size() < 2)
        throw DomainError("propagation needs at least two sample times");
    const bool forward = times.back() > times.front();
    for (std::size_t i = 1; i < times.size(); ++i)
        if ((times[i] > times[i - 1]) != forward || times[i] == times[i - 1])
            throw DomainError("sample times must be strictly monotone");

    const Rhs rhs(spec, params);
    State psi(initial.data(), initial.data() + initial.size());

    PropagationResult result;
    result.times.assign(times.begin(), times.end());
    result.states.reserve(times.size());
    auto observer = [&](const State& x, double) {
        result.states.emplace_back(Eigen::Map<const Eigen::VectorXcd>(x.data(), static_cast<Eigen::Index>(x.size())));
    };

    using Stepper = odeint::runge_kutta_fehlberg78<State>;
    auto stepper = odeint::make_controlled<Stepper>(options.atol, options.rtol);
    const double span = std::abs(times.back() - times.front());
    const double dt0 = (forward ? 1.0 : -1.0) * std::min(1e-3, span / 10.0);
    result.steps = odeint::integrate_times(stepper, std::cref(rhs), psi, times.begin(), times.end(), dt0,
                                           observer);

    const Generators gens = build_generators(spec);
    const Eigen::MatrixXcd& np = gens.N_prime.matrix();
    const double np0 = expectation(np, result.states.front());
    for (const auto& s : result.states) {
        result.norm_drift = std::max(result.norm_drift, std::abs(s.norm() - 1.0));
        result.n_prime_drift = std::max(result.n_prime_drift, std::abs(expectation(np, s) - np0));
        result.leakage = std::max(result.leakage, guard_weight(spec, s));
    }
    if (!(result.norm_drift <= options.norm_threshold))
        throw VerificationError("oracle norm drift " + std::to_string(result.norm_drift) + " above threshold");
    if (!(result.leakage <= options.leakage_threshold))
        throw VerificationError("oracle leakage into the guard band: " + std::to_string(result.leakage));
    return result;
}

double fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b)
{
    if (a.size() != b.size())
        throw DomainError("fidelity of vectors of different dimension");
    return std::min(1.0, std::abs(a.dot(b)));
}

double infidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b)
{
    return 1.0 - fidelity(a, b);
}

double invariant_expectation_drift(const Operator& op, const PropagationResult& result)
{
    return invariant_expectation_drift([&op](double) { return op; }, result);
}

double invariant_expectation_drift(const std::function<Operator(double)>& op, const PropagationResult& result)
{
    if (result.states.empty())
        return 0.0;
    const double e0 = expectation(op(result.times.front()).matrix(), result.states.front());
    double drift = 0.0;
    for (std::size_t i = 0; i < result.states.size(); ++i)
        drift = std::max(drift, std::abs(expectation(op(result.times[i]).matrix(), result.states[i]) - e0));
    return drift;
}

std::vector<double> block_populations(const FockSpaceSpec& spec, const Eigen::VectorXcd& state)
{
    std::vector<double> out;
    for (std::size_t m = 0; m + spec.k < spec.cutoff; ++m) {
        const std::size_t up = m, low = spec.cutoff + m + spec.k;
        out.push_back(std::norm(state(static_cast<Eigen::Index>(up))) + std::norm(state(static_cast<Eigen::Index>(low))));
    }
    return out;
}

}  // namespace jclab
