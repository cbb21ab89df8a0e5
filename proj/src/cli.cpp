#include "jclab/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <numbers>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "jclab/adiabatic.hpp"
#include "jclab/coherent.hpp"
#include "jclab/csv.hpp"
#include "jclab/oracle.hpp"
#include "jclab/propagator.hpp"

namespace jclab {

namespace {

std::string sigma_tag(int sigma)
{
    return sigma > 0 ? "+1" : "-1";
}

// Runs task(i) for i in [0, count) on up to `jobs` threads; the first
// exception is rethrown after all workers finish.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& task)
{
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(mutex);
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
        for (auto& t : pool)
            t.join();
    }
    if (failure)
        std::rethrow_exception(failure);
}

AuxState initial_for(const ScenarioConfig& c, std::uint64_t lambda)
{
    if (c.aux.adiabatic_matched)
        return adiabatic_matched_initial_state(c.params, lambda, 0.0);
    return {c.aux.theta0, c.aux.phi0};
}

struct BlockRun {
    std::size_t m = 0;
    std::vector<std::string> lines;
    bool pass = true;
};

BlockRun propagate_block(const ScenarioConfig& c, std::size_t m, const std::filesystem::path& dir)
{
    BlockRun run;
    run.m = m;
    const int prec = c.output.precision;
    const SubspaceBlock block = make_block(c.space, m);
    const ExactSolution sol = make_exact_solution(c.space, m, c.params, initial_for(c, block.lambda), c.run.t_final,
                                                  c.aux.options);
    const AuxTrajectory& traj = sol.trajectory();
    const std::vector<double> grid = uniform_grid(0.0, c.run.t_final, c.run.samples);

    {
        CsvWriter csv(dir / fmt::format("trajectory_m{}.csv", m), {"t", "theta", "phi", "residual"}, prec);
        for (double t : grid) {
            const AuxState s = traj.state_at(t);
            csv.row({t, s.theta, s.phi, residual_at(traj, t, c.params, block.lambda)});
        }
    }
    run.lines.push_back(fmt::format("m={} lambda={} aux_steps={} aux_residual={:.3e}", m, block.lambda,
                                    traj.stats().accepted, traj.stats().max_residual));

    for (int sigma : c.run.sigmas) {
        std::vector<Eigen::VectorXcd> oracle_states;
        double norm_drift = std::nan("");
        if (c.oracle.enabled) {
            const PropagationResult res = propagate(sol.exact_state(sigma, 0.0), grid, c.params, c.space,
                                                    c.oracle.options);
            oracle_states = res.states;
            norm_drift = res.norm_drift;
            std::vector<std::string> header{"t", "norm_drift"};
            const std::size_t blocks = block_populations(c.space, res.states.front()).size();
            for (std::size_t b = 0; b < blocks; ++b)
                header.push_back(fmt::format("p_m{}", b));
            CsvWriter csv(dir / fmt::format("oracle_m{}_s{}.csv", m, sigma_tag(sigma)), header, prec);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                std::vector<double> row{grid[i], std::abs(res.states[i].norm() - 1.0)};
                const auto pops = block_populations(c.space, res.states[i]);
                row.insert(row.end(), pops.begin(), pops.end());
                csv.row(row);
            }
        }

        CsvWriter csv(dir / fmt::format("exact_m{}_s{}.csv", m, sigma_tag(sigma)),
                      {"t", "theta", "phi", "phi_d_plus", "phi_g_plus", "phi_d_minus", "phi_g_minus", "re_upper",
                       "im_upper", "re_lower", "im_lower", "norm_error", "oracle_infidelity"},
                      prec);
        double max_inf = 0.0;
        double max_norm_error = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double t = grid[i];
            const AuxState s = traj.state_at(t);
            const PhaseLedger plus = sol.ledger(1, t), minus = sol.ledger(-1, t);
            const Vector2 v = sol.block_state(sigma, t);
            const double norm_error = std::abs(v.norm() - 1.0);
            double inf = std::nan("");
            if (c.oracle.enabled) {
                inf = infidelity(sol.exact_state(sigma, t), oracle_states[i]);
                max_inf = std::max(max_inf, inf);
            }
            max_norm_error = std::max(max_norm_error, norm_error);
            csv.row({t, s.theta, s.phi, plus.phi_d, plus.phi_g, minus.phi_d, minus.phi_g, v(0).real(), v(0).imag(),
                     v(1).real(), v(1).imag(), norm_error, inf});
        }
        const bool ok = !c.oracle.enabled || max_inf < c.run.max_infidelity;
        run.pass = run.pass && ok;
        if (c.oracle.enabled)
            run.lines.push_back(fmt::format("  sigma={} max_infidelity={:.3e} oracle_norm_drift={:.3e} "
                                            "exact_norm_error={:.3e} {}",
                                            sigma_tag(sigma), max_inf, norm_drift, max_norm_error,
                                            ok ? "PASS" : "FAIL"));
        else
            run.lines.push_back(fmt::format("  sigma={} oracle disabled exact_norm_error={:.3e}", sigma_tag(sigma),
                                            max_norm_error));
    }
    return run;
}

}  // namespace

int run_verify_algebra(const ScenarioConfig& c, const std::filesystem::path& dir, std::ostream& out)
{
    const AlgebraReport report = algebra_residuals(c.space);
    bool pass = true;
    {
        CsvWriter csv(dir / "algebra.csv", {"index", "residual", "max_level"}, c.output.precision);
        for (std::size_t i = 0; i < report.identities.size(); ++i) {
            const auto& id = report.identities[i];
            const bool ok = id.residual <= c.algebra.tol;
            pass = pass && ok;
            out << fmt::format("{:<32} residual={:.3e} levels<={} {}\n", id.name, id.residual, id.max_level,
                               ok ? "PASS" : "FAIL");
            csv.row({static_cast<double>(i), id.residual, static_cast<double>(id.max_level)});
        }
    }
    const std::vector<Operator> hs{build_hamiltonian(c.space, c.params, 0.0),
                                   build_hamiltonian_susy(c.space, c.params, 0.0),
                                   build_hamiltonian(c.space, c.params, 0.5 * c.run.t_final)};
    for (std::size_t m : c.m_list) {
        const SubspaceBlock block = make_block(c.space, m);
        try {
            const BlockClosureReport r = verify_block_closure(c.space, block, hs, c.algebra.block_tol);
            out << fmt::format("block m={} lambda={} closure={:.3e} PASS\n", m, block.lambda, r.max());
        } catch (const VerificationError& e) {
            pass = false;
            out << fmt::format("block m={} lambda={} FAIL: {}\n", m, block.lambda, e.what());
        }
    }
    out << (pass ? "verify-algebra: PASS\n" : "verify-algebra: FAIL\n");
    return pass ? exit_pass : exit_verification;
}

int run_propagate(const ScenarioConfig& c, const std::filesystem::path& dir, unsigned jobs, std::ostream& out)
{
    std::vector<BlockRun> runs(c.m_list.size());
    parallel_for(c.m_list.size(), jobs, [&](std::size_t i) { runs[i] = propagate_block(c, c.m_list[i], dir); });
    bool pass = true;
    for (const auto& r : runs) {
        for (const auto& line : r.lines)
            out << line << '\n';
        pass = pass && r.pass;
    }
    out << (pass ? "propagate: PASS\n" : "propagate: FAIL\n");
    return pass ? exit_pass : exit_verification;
}

int run_berry(const ScenarioConfig& c, const std::filesystem::path& dir, unsigned jobs, std::ostream& out)
{
    const BerryConfig& b = c.berry;
    struct Row {
        double theta = 0.0;
        int sigma = 1;
        double numeric = 0.0;
        double formula = 0.0;
    };
    std::vector<Row> rows;
    for (double deg : b.theta_degrees)
        for (int sigma : b.sigmas)
            rows.push_back({deg * std::numbers::pi / 180.0, sigma});

    const double default_period = cycle_period(c.params.omega);
    parallel_for(rows.size(), jobs, [&](std::size_t i) {
        Row& r = rows[i];
        r.formula = berry_phase_cycle(r.theta, r.sigma);
        if (r.theta == 0.0 || r.theta >= std::numbers::pi) {
            r.numeric = berry_phase_direct(std::min(r.theta, std::numbers::pi), c.params.omega,
                                           b.period.value_or(default_period), r.sigma);
            return;
        }
        AdiabaticScenario s = build_adiabatic_scenario(r.theta, c.params.omega, b.m, c.space.k, b.g_abs, b.phi0);
        if (b.period)
            s.period = *b.period;
        r.numeric = berry_phase_numeric(s, r.sigma, c.aux.options);
    });

    bool pass = true;
    CsvWriter csv(dir / "berry.csv", {"theta", "sigma", "phase_numeric", "phase_formula", "abs_error"},
                  c.output.precision);
    for (const auto& r : rows) {
        const double err = std::abs(r.numeric - r.formula);
        const bool ok = err < b.max_error;
        pass = pass && ok;
        csv.row({r.theta, static_cast<double>(r.sigma), r.numeric, r.formula, err});
        out << fmt::format("theta={:.6f} sigma={} numeric={:.12f} formula={:.12f} error={:.3e} {}\n", r.theta,
                           sigma_tag(r.sigma), r.numeric, r.formula, err, ok ? "PASS" : "FAIL");
    }
    out << (pass ? "berry: PASS\n" : "berry: FAIL\n");
    return pass ? exit_pass : exit_verification;
}

int run_coherent(const ScenarioConfig& c, const std::filesystem::path& dir, unsigned jobs, std::ostream& out)
{
    if (c.aux.adiabatic_matched)
        throw ConfigError("aux.adiabatic_matched: coherent runs share explicit theta0, phi0 across blocks");
    const CoherentSpec spec{c.coherent.xi, choose_m_max(c.coherent.xi, c.coherent.tail_tol), c.coherent.sigma};
    validate_coherent(spec, c.space, c.coherent.tail_tol);

    const std::vector<ExactSolution> sols = solve_coherent_blocks(spec, c.space, c.params, {c.aux.theta0, c.aux.phi0},
                                                                  c.run.t_final, c.aux.options, jobs);
    const std::vector<double> grid = uniform_grid(0.0, c.run.t_final, c.run.samples);
    std::vector<Eigen::VectorXcd> oracle_states;
    if (c.oracle.enabled)
        oracle_states = propagate(coherent_initial_state(spec, sols), grid, c.params, c.space, c.oracle.options).states;

    CsvWriter csv(dir / "inversion.csv", {"t", "sigma_z_exact", "sigma_z_oracle", "abs_diff"}, c.output.precision);
    double max_diff = 0.0, norm_drift = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Eigen::VectorXcd psi = build_coherent_state(spec, grid[i], sols);
        norm_drift = std::max(norm_drift, std::abs(psi.norm() - 1.0));
        const double exact = atomic_inversion(c.space, psi);
        double oracle = std::nan(""), diff = std::nan("");
        if (c.oracle.enabled) {
            oracle = atomic_inversion(c.space, oracle_states[i]);
            diff = std::abs(exact - oracle);
            max_diff = std::max(max_diff, diff);
        }
        csv.row({grid[i], exact, oracle, diff});
    }
    const bool norm_ok = norm_drift < 1e-10;
    const bool diff_ok = !c.oracle.enabled || max_diff < c.coherent.max_diff;
    out << fmt::format("xi={} sigma={} m_max={} tail={:.3e}\n", spec.xi, sigma_tag(spec.sigma), spec.m_max,
                       tail_weight(spec.xi, spec.m_max));
    out << fmt::format("norm_drift={:.3e} {}\n", norm_drift, norm_ok ? "PASS" : "FAIL");
    if (c.oracle.enabled)
        out << fmt::format("max_abs_diff={:.3e} {}\n", max_diff, diff_ok ? "PASS" : "FAIL");
    const bool pass = norm_ok && diff_ok;
    out << (pass ? "coherent: PASS\n" : "coherent: FAIL\n");
    return pass ? exit_pass : exit_verification;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Invariant-based exact solutions of the k-photon Jaynes-Cummings model", "jclab"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_dir;
    unsigned jobs = 1;
    const std::vector<std::string> names{"verify-algebra", "propagate", "berry", "coherent"};
    for (const auto& name : names) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "scenario config (INI)")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        if (!reversed.empty())
            reversed.pop_back();  // program name
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_pass;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n' << app.help();
        return exit_config;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        const ScenarioConfig config = load_config(config_path);
        std::filesystem::path dir = ".";
        if (!out_dir.empty())
            dir = out_dir;
        else if (config.output.directory)
            dir = *config.output.directory;
        else if (const char* env = std::getenv(out_dir_env); env != nullptr && *env != '\0')
            dir = env;
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec)
            throw ConfigError("output directory '" + dir.string() + "': " + ec.message());

        if (command == "verify-algebra")
            return run_verify_algebra(config, dir, out);
        if (command == "propagate")
            return run_propagate(config, dir, jobs, out);
        if (command == "berry")
            return run_berry(config, dir, jobs, out);
        return run_coherent(config, dir, jobs, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const SingularityError& e) {
        err << "singularity at t = " << format_number(e.time(), 12) << ": " << e.what() << '\n';
        return exit_verification;
    } catch (const Error& e) {
        err << command << " failed: " << e.what() << '\n';
        return exit_verification;
    }
}

}  // namespace jclab
