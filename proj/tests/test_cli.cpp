#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "jclab/cli.hpp"
#include "jclab/csv.hpp"

using namespace jclab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const char* base = std::getenv("JCLAB_TEST_TMP");
    const fs::path dir = fs::path(base ? base : fs::temp_directory_path().string()) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text)
{
    const fs::path p = dir / "scenario.ini";
    std::ofstream(p) << text;
    return p;
}

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    std::vector<std::string> full{"jclab"};
    full.insert(full.end(), args.begin(), args.end());
    const int code = run_cli(full, out, err);
    return {code, out.str(), err.str()};
}

Outcome run_with(const std::string& command, const std::string& config, const fs::path& dir)
{
    return run({command, "--config", write_config(dir, config).string(), "--out", (dir / "out").string()});
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::vector<double> column(const std::string& name) const
    {
        const auto it = std::find(header.begin(), header.end(), name);
        REQUIRE(it != header.end());
        const auto idx = static_cast<std::size_t>(it - header.begin());
        std::vector<double> out;
        for (const auto& r : rows)
            out.push_back(r[idx]);
        return out;
    }
};

Table read_csv(const fs::path& p)
{
    std::ifstream in(p);
    REQUIRE(in.good());
    Table t;
    std::string line;
    std::getline(in, line);
    std::stringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');)
        t.header.push_back(cell);
    while (std::getline(in, line)) {
        std::stringstream ls(line);
        std::vector<double> row;
        for (std::string cell; std::getline(ls, cell, ',');)
            row.push_back(std::stod(cell));
        t.rows.push_back(row);
    }
    return t;
}

double max_of(const std::vector<double>& v)
{
    double m = -INFINITY;
    for (double x : v)
        m = std::max(m, x);
    return m;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("config parsing")
{
    const ScenarioConfig d = parse_config("");
    CHECK(d.space.cutoff == 32);
    CHECK(d.space.k == 3);
    CHECK(d.m_list == std::vector<std::size_t>{0, 1, 2});

    const ScenarioConfig c = parse_config("[space]\nk = 2\ncutoff = 20\nm = 0, 3\n"
                                          "[profiles]\nomega0 = sinusoid 3, 0.1, 0.5, 0\n"
                                          "; comment\n[run]\nsigma = -1\n");
    CHECK(c.space.k == 2);
    CHECK(c.space.guard == 2);
    CHECK(c.params.k == 2);
    CHECK(c.m_list == std::vector<std::size_t>{0, 3});
    CHECK(c.params.omega0(0.0) == 3.0);
    CHECK(c.run.sigmas == std::vector<int>{-1});

    CHECK_THROWS_WITH_AS(parse_config("[space]\ncutoff = 4\n"), doctest::Contains("space"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[profiles]\nomega = wobble 1\n"), doctest::Contains("profiles.omega"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[run]\nsamples = many\n"), doctest::Contains("run.samples"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[run]\nbogus = 1\n"), doctest::Contains("run.bogus"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[space]\nm = 30\n"), doctest::Contains("space.m"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[aux]\ntheta0 = 0\n"), doctest::Contains("aux.theta0"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[profiles]\ng_mod = table 0, 1, 5, 1\n"),
                         doctest::Contains("profiles.g_mod"), ConfigError);
}

TEST_CASE("number formatting")
{
    CHECK(format_number(0.1, 12) == "0.1");
    CHECK(format_number(-0.0, 12) == "0");
    CHECK(format_number(1.0 / 3.0, 12) == "0.333333333333");
    CHECK(format_number(std::nan(""), 12) == "nan");
}

TEST_CASE("verify-algebra exit codes")
{
    const fs::path dir = scratch("algebra");
    const Outcome ok = run_with("verify-algebra", "", dir);
    CHECK(ok.code == 0);
    CHECK(ok.out.find("{Q+,Q} = N'") != std::string::npos);
    CHECK(fs::exists(dir / "out" / "algebra.csv"));

    CHECK(run_with("verify-algebra", "[space]\ncutoff = 4\n", dir).code == 2);
    const Outcome strict = run_with("verify-algebra", "[algebra]\ntol = 1e-20\n", dir);
    CHECK(strict.code == 1);
    CHECK(strict.out.find("FAIL") != std::string::npos);
}

TEST_CASE("usage errors")
{
    CHECK(run({}).code == 2);
    CHECK(run({"propagate"}).code == 2);
    CHECK(run({"unknown", "--config", "x.ini"}).code == 2);
    CHECK(run({"propagate", "--config", "/nonexistent/x.ini"}).code == 2);
}

TEST_CASE("propagate writes trajectories, exact states and oracle comparisons")
{
    const fs::path dir = scratch("propagate");
    const Outcome o = run_with("propagate", "[space]\nm = 0, 1\n[run]\nsamples = 41\n", dir);
    CHECK(o.code == 0);
    for (const char* f : {"trajectory_m0.csv", "trajectory_m1.csv", "exact_m0_s+1.csv", "exact_m1_s-1.csv",
                          "oracle_m0_s+1.csv", "oracle_m1_s-1.csv"})
        CHECK(fs::exists(dir / "out" / f));
    const Table exact = read_csv(dir / "out" / "exact_m1_s+1.csv");
    CHECK(exact.rows.size() == 41);
    CHECK(max_of(exact.column("oracle_infidelity")) < 1e-6);
    CHECK(max_of(exact.column("norm_error")) < 1e-12);
    const Table traj = read_csv(dir / "out" / "trajectory_m0.csv");
    CHECK(traj.header == std::vector<std::string>{"t", "theta", "phi", "residual"});
    CHECK(max_of(traj.column("residual")) < 1e-8);
}

TEST_CASE("propagate in the uncoupled limit")
{
    const fs::path dir = scratch("free");
    const Outcome o = run_with("propagate", "[profiles]\ng_mod = constant 0\n[run]\nmax_infidelity = 1e-10\n", dir);
    CHECK(o.code == 0);
    CHECK(max_of(read_csv(dir / "out" / "exact_m2_s-1.csv").column("oracle_infidelity")) < 1e-10);
}

TEST_CASE("propagate reports configuration and singularity problems")
{
    const fs::path dir = scratch("propagate_bad");
    const Outcome bad = run_with("propagate", "[profiles]\nomega0 = wobble 3\n", dir);
    CHECK(bad.code == 2);
    CHECK(bad.err.find("profiles.omega0") != std::string::npos);

    const Outcome pole = run_with("propagate", "[aux]\ntheta0 = 1.2\nphi0 = 1.5707963267948966\n", dir);
    CHECK(pole.code == 1);
    CHECK(pole.err.find("singularity at t =") != std::string::npos);
}

TEST_CASE("output is deterministic and honours the environment default")
{
    const fs::path dir = scratch("determinism");
    const fs::path cfg = write_config(dir, "[space]\nm = 1\n[run]\nsamples = 21\n");
    CHECK(run({"propagate", "--config", cfg.string(), "--out", (dir / "a").string()}).code == 0);
    CHECK(run({"propagate", "--config", cfg.string(), "--out", (dir / "b").string(), "--jobs", "2"}).code == 0);
    for (const char* f : {"trajectory_m1.csv", "exact_m1_s+1.csv", "oracle_m1_s-1.csv"})
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));

    ::setenv(out_dir_env, (dir / "env").string().c_str(), 1);
    CHECK(run({"propagate", "--config", cfg.string()}).code == 0);
    ::unsetenv(out_dir_env);
    CHECK(slurp(dir / "a" / "exact_m1_s-1.csv") == slurp(dir / "env" / "exact_m1_s-1.csv"));
}

TEST_CASE("berry sweep")
{
    const fs::path dir = scratch("berry");
    const Outcome o = run_with("berry", "", dir);
    CHECK(o.code == 0);
    const Table t = read_csv(dir / "out" / "berry.csv");
    CHECK(t.header == std::vector<std::string>{"theta", "sigma", "phase_numeric", "phase_formula", "abs_error"});
    CHECK(t.rows.size() == 10);
    CHECK(max_of(t.column("abs_error")) < 1e-3);
    CHECK(t.rows[0][0] == 0.0);
    CHECK(t.rows[0][2] == 0.0);

    const Outcome wrong = run_with("berry", "[berry]\nperiod = 5\ntheta_degrees = 60\n", dir);
    CHECK(wrong.code == 1);
    CHECK(wrong.err.find("cycle closure") != std::string::npos);
}

TEST_CASE("coherent inversion")
{
    const fs::path dir = scratch("coherent");
    const Outcome o = run_with("coherent", "[run]\nsamples = 101\n", dir);
    CHECK(o.code == 0);
    const Table t = read_csv(dir / "out" / "inversion.csv");
    CHECK(t.header == std::vector<std::string>{"t", "sigma_z_exact", "sigma_z_oracle", "abs_diff"});
    CHECK(max_of(t.column("abs_diff")) < 1e-6);

    const Outcome small = run_with("coherent", "[space]\ncutoff = 24\n[coherent]\nxi = 2\n", dir);
    CHECK(small.code == 2);
    CHECK(small.err.find("cutoff") != std::string::npos);
}

TEST_CASE("coherent with xi = 0 matches the single-block run")
{
    const fs::path dir = scratch("coherent_zero");
    CHECK(run_with("coherent", "[coherent]\nxi = 0\n[run]\nsamples = 21\n", dir).code == 0);
    CHECK(run_with("propagate", "[space]\nm = 0\n[run]\nsamples = 21\nsigma = 1\n", dir).code == 0);
    const Table inv = read_csv(dir / "out" / "inversion.csv");
    const Table ex = read_csv(dir / "out" / "exact_m0_s+1.csv");
    const auto sz = inv.column("sigma_z_exact");
    const auto ru = ex.column("re_upper"), iu = ex.column("im_upper");
    const auto rl = ex.column("re_lower"), il = ex.column("im_lower");
    for (std::size_t i = 0; i < sz.size(); ++i)
        CHECK(std::abs(sz[i] - (ru[i] * ru[i] + iu[i] * iu[i] - rl[i] * rl[i] - il[i] * il[i])) < 1e-10);
}
