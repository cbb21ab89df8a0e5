#include "jclab/coherent.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <boost/math/special_functions/gamma.hpp>

namespace jclab {

double tail_weight(double xi, std::size_t m_max)
{
    if (!(xi >= 0.0) || !std::isfinite(xi))
        throw DomainError("xi must be finite and >= 0");
    if (xi == 0.0)
        return 0.0;
    // sum_{m > M} e^{-x} x^m / m! = P(M + 1, x), x = xi^2
    return boost::math::gamma_p(static_cast<double>(m_max) + 1.0, xi * xi);
}

std::size_t choose_m_max(double xi, double tol)
{
    std::size_t m = 0;
    while (tail_weight(xi, m) >= tol) {
        if (++m > 100000)
            throw DomainError("xi too large for a finite truncation");
    }
    return m;
}

CoherentSpec make_coherent_spec(double xi, int sigma, double tol)
{
    if (sigma != 1 && sigma != -1)
        throw ConfigError("sigma must be +1 or -1");
    return {xi, choose_m_max(xi, tol), sigma};
}

std::vector<double> coherent_weights(const CoherentSpec& spec)
{
    std::vector<double> w(spec.m_max + 1, 0.0);
    if (spec.xi == 0.0) {
        w[0] = 1.0;
        return w;
    }
    const double lx = std::log(spec.xi);
    for (std::size_t m = 0; m <= spec.m_max; ++m) {
        const double md = static_cast<double>(m);
        w[m] = std::exp(-0.5 * spec.xi * spec.xi + md * lx - 0.5 * std::lgamma(md + 1.0));
    }
    return w;
}

void validate_coherent(const CoherentSpec& spec, const FockSpaceSpec& space, double tol)
{
    if (spec.sigma != 1 && spec.sigma != -1)
        throw ConfigError("sigma must be +1 or -1");
    const double tail = tail_weight(spec.xi, spec.m_max);
    if (!(tail < tol))
        throw TruncationError("coherent tail weight " + std::to_string(tail) + " with m_max = "
                              + std::to_string(spec.m_max) + " is not below " + std::to_string(tol));
    const std::size_t need = spec.m_max + space.k + space.guard + 1;
    if (space.cutoff < need)
        throw TruncationError("cutoff " + std::to_string(space.cutoff) + " too small for xi = "
                              + std::to_string(spec.xi) + ": m_max = " + std::to_string(spec.m_max)
                              + " needs cutoff >= " + std::to_string(need));
}

std::vector<ExactSolution> solve_coherent_blocks(const CoherentSpec& spec, const FockSpaceSpec& space,
                                                 const ModelParams& params, const AuxState& initial, double t_final,
                                                 const AuxOptions& options, unsigned jobs)
{
    validate_coherent(spec, space);
    const std::size_t count = spec.m_max + 1;
    std::vector<std::optional<ExactSolution>> slots(count);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (std::size_t m = next++; m < count; m = next++) {
            try {
                slots[m].emplace(make_exact_solution(space, m, params, initial, t_final, options));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < n; ++i)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    if (failure)
        std::rethrow_exception(failure);

    std::vector<ExactSolution> out;
    out.reserve(count);
    for (auto& s : slots)
        out.push_back(std::move(*s));
    return out;
}

Eigen::VectorXcd build_coherent_state(const CoherentSpec& spec, double t, const std::vector<ExactSolution>& solutions)
{
    if (solutions.size() < spec.m_max + 1)
        throw DomainError("need one solved block per m up to m_max");
    const std::vector<double> w = coherent_weights(spec);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(solutions.front().space().dim()));
    for (std::size_t m = 0; m <= spec.m_max; ++m) {
        if (solutions[m].block().m != m)
            throw DomainError("solutions must be ordered by block index");
        if (w[m] != 0.0)
            psi += w[m] * solutions[m].exact_state(spec.sigma, t);
    }
    return psi;
}

Eigen::VectorXcd coherent_initial_state(const CoherentSpec& spec, const std::vector<ExactSolution>& solutions)
{
    const Eigen::VectorXcd psi = build_coherent_state(spec, solutions.front().trajectory().t_begin(), solutions);
    return psi / psi.norm();
}

double atomic_inversion(const FockSpaceSpec& space, const Eigen::VectorXcd& state)
{
    if (static_cast<std::size_t>(state.size()) != space.dim())
        throw DomainError("state dimension does not match the Fock space");
    const auto n = static_cast<Eigen::Index>(space.cutoff);
    return state.head(n).squaredNorm() - state.tail(n).squaredNorm();
}

}  // namespace jclab
