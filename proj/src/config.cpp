#include "jclab/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace jclab {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>> known_keys{
    {"space", {"k", "cutoff", "guard", "m"}},
    {"profiles", {"omega", "omega0", "g_mod", "g_phase"}},
    {"aux", {"theta0", "phi0", "adiabatic_matched", "rtol", "atol", "theta_min", "h_max"}},
    {"run", {"t_final", "samples", "sigma", "max_infidelity"}},
    {"oracle", {"enabled", "rtol", "atol"}},
    {"output", {"directory", "precision"}},
    {"algebra", {"tol", "block_tol"}},
    {"berry", {"theta_degrees", "sigma", "m", "g_abs", "phi0", "period", "max_error"}},
    {"coherent", {"xi", "sigma", "tail_tol", "max_diff"}},
};

[[noreturn]] void fail(const std::string& key, const std::string& why)
{
    throw ConfigError(key + ": " + why);
}

double to_double(const std::string& key, std::string text)
{
    boost::trim(text);
    try {
        const double v = boost::lexical_cast<double>(text);
        if (!std::isfinite(v))
            fail(key, "value must be finite");
        return v;
    } catch (const boost::bad_lexical_cast&) {
        fail(key, "expected a number, got '" + text + "'");
    }
}

long long to_integer(const std::string& key, std::string text)
{
    boost::trim(text);
    try {
        return boost::lexical_cast<long long>(text);
    } catch (const boost::bad_lexical_cast&) {
        fail(key, "expected an integer, got '" + text + "'");
    }
}

std::size_t to_count(const std::string& key, const std::string& text)
{
    const long long v = to_integer(key, text);
    if (v < 0)
        fail(key, "must be non-negative");
    return static_cast<std::size_t>(v);
}

bool to_bool(const std::string& key, std::string text)
{
    boost::trim(text);
    boost::to_lower(text);
    if (text == "true" || text == "yes" || text == "1" || text == "on")
        return true;
    if (text == "false" || text == "no" || text == "0" || text == "off")
        return false;
    fail(key, "expected true or false, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> parts;
    boost::split(parts, text, boost::is_any_of(","));
    for (auto& p : parts)
        boost::trim(p);
    if (parts.size() == 1 && parts.front().empty())
        parts.clear();
    return parts;
}

std::vector<double> to_doubles(const std::string& key, const std::string& text)
{
    std::vector<double> out;
    for (const auto& p : split_list(text))
        out.push_back(to_double(key, p));
    return out;
}

std::vector<int> to_sigmas(const std::string& key, const std::string& text)
{
    std::vector<int> out;
    for (const auto& p : split_list(text)) {
        const long long v = to_integer(key, p);
        if (v != 1 && v != -1)
            fail(key, "sigma values must be +1 or -1");
        if (std::find(out.begin(), out.end(), static_cast<int>(v)) != out.end())
            fail(key, "repeated sigma value");
        out.push_back(static_cast<int>(v));
    }
    if (out.empty())
        fail(key, "list is empty");
    return out;
}

double positive(const std::string& key, double v)
{
    if (!(v > 0.0))
        fail(key, "must be positive");
    return v;
}

class Reader {
public:
    explicit Reader(const pt::ptree& tree) : tree_(tree) {}

    template <class F>
    void with(const std::string& section, const std::string& key, F&& apply) const
    {
        const auto sec = tree_.get_child_optional(section);
        if (!sec)
            return;
        const auto value = sec->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
        if (value)
            apply(section + "." + key, *value);
    }

private:
    const pt::ptree& tree_;
};

void check_known(const pt::ptree& tree)
{
    for (const auto& [section, body] : tree) {
        const auto it = known_keys.find(section);
        if (it == known_keys.end()) {
            if (body.empty() && !body.data().empty())
                fail(section, "keys must appear inside a section");
            fail(section, "unknown section");
        }
        for (const auto& [key, value] : body)
            if (!it->second.contains(key))
                fail(section + "." + key, "unknown key");
    }
}

void validate(const ScenarioConfig& c)
{
    try {
        c.space.validate();
    } catch (const ConfigError& e) {
        fail("space", e.what());
    }
    if (c.params.k != c.space.k)
        fail("space.k", "internal mismatch");
    if (c.m_list.empty())
        fail("space.m", "list is empty");
    const std::size_t top = c.space.cutoff - 1 - c.space.guard;
    for (std::size_t m : c.m_list) {
        if (m + c.space.k > top)
            fail("space.m", "block m = " + std::to_string(m) + " reaches photon number "
                                + std::to_string(m + c.space.k) + ", above the guarded limit "
                                + std::to_string(top));
        try {
            (void)lambda_value(m, c.space.k);
        } catch (const DomainError& e) {
            fail("space.m", e.what());
        }
    }
    for (std::size_t i = 0; i < c.m_list.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (c.m_list[i] == c.m_list[j])
                fail("space.m", "repeated block index");

    const char* names[] = {"profiles.omega", "profiles.omega0", "profiles.g_mod", "profiles.g_phase"};
    const TimeProfile* profiles[] = {&c.params.omega, &c.params.omega0, &c.params.g_mod, &c.params.g_phase};
    for (double t : {0.0, 0.5 * c.run.t_final, c.run.t_final})
        for (int i = 0; i < 4; ++i) {
            try {
                const double v = (*profiles[i])(t);
                if (!std::isfinite(v))
                    fail(names[i], "non-finite value at t = " + std::to_string(t));
                if (i == 2 && v < 0.0)
                    fail(names[i], "negative coupling modulus at t = " + std::to_string(t));
            } catch (const EvaluationError& e) {
                fail(names[i], e.what());
            }
        }

    if (!c.aux.adiabatic_matched && !(c.aux.theta0 > 0.0 && c.aux.theta0 < std::numbers::pi))
        fail("aux.theta0", "must lie in (0, pi)");
    if (c.berry.m + c.space.k > 62)
        fail("berry.m", "too large");
    for (double d : c.berry.theta_degrees)
        if (!(d >= 0.0 && d <= 180.0))
            fail("berry.theta_degrees", "angles must lie in [0, 180]");
    if (!(c.berry.g_abs >= 0.0))
        fail("berry.g_abs", "must be >= 0");
    if (!(c.coherent.xi >= 0.0))
        fail("coherent.xi", "must be >= 0");
    if (c.output.precision < 1 || c.output.precision > 17)
        fail("output.precision", "must lie in [1, 17]");
}

}  // namespace

TimeProfile parse_profile(const std::string& text)
{
    std::string body = boost::trim_copy(text);
    const auto space = body.find_first_of(" \t");
    const std::string kind_name = body.substr(0, space);
    const std::string rest = space == std::string::npos ? std::string{} : body.substr(space + 1);

    static const std::map<std::string, ProfileKind> kinds{
        {"constant", ProfileKind::constant}, {"linear", ProfileKind::linear},
        {"sinusoid", ProfileKind::sinusoid}, {"chirp", ProfileKind::chirp},
        {"table", ProfileKind::table},       {"polynomial", ProfileKind::polynomial},
    };
    const auto it = kinds.find(kind_name);
    if (it == kinds.end())
        throw ConfigError("unknown profile kind '" + kind_name + "'");
    const std::vector<double> coeffs = to_doubles("coefficients", rest);
    return TimeProfile::from_coefficients(it->second, coeffs);
}

ScenarioConfig parse_config(const std::string& text)
{
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("malformed config (line " + std::to_string(e.line()) + "): " + e.message());
    }
    check_known(tree);

    ScenarioConfig c;
    const Reader r(tree);
    std::optional<long long> guard;
    r.with("space", "k", [&](const std::string& key, const std::string& v) {
        const long long k = to_integer(key, v);
        if (k < 1 || k > 8)
            fail(key, "must lie in [1, 8]");
        c.space.k = static_cast<unsigned>(k);
    });
    r.with("space", "cutoff", [&](const std::string& key, const std::string& v) { c.space.cutoff = to_count(key, v); });
    r.with("space", "guard", [&](const std::string& key, const std::string& v) { guard = static_cast<long long>(to_count(key, v)); });
    c.space.guard = guard ? static_cast<std::size_t>(*guard) : c.space.k;
    r.with("space", "m", [&](const std::string& key, const std::string& v) {
        c.m_list.clear();
        for (const auto& p : split_list(v))
            c.m_list.push_back(to_count(key, p));
    });
    c.params.k = c.space.k;

    auto profile = [&](const char* name, TimeProfile& target) {
        r.with("profiles", name, [&](const std::string& key, const std::string& v) {
            try {
                target = parse_profile(v);
            } catch (const ConfigError& e) {
                fail(key, e.what());
            }
        });
    };
    c.params.g_mod = TimeProfile::constant(0.05);
    profile("omega", c.params.omega);
    profile("omega0", c.params.omega0);
    profile("g_mod", c.params.g_mod);
    profile("g_phase", c.params.g_phase);

    r.with("aux", "theta0", [&](const std::string& key, const std::string& v) { c.aux.theta0 = to_double(key, v); });
    r.with("aux", "phi0", [&](const std::string& key, const std::string& v) { c.aux.phi0 = to_double(key, v); });
    r.with("aux", "adiabatic_matched", [&](const std::string& key, const std::string& v) { c.aux.adiabatic_matched = to_bool(key, v); });
    r.with("aux", "rtol", [&](const std::string& key, const std::string& v) { c.aux.options.rtol = positive(key, to_double(key, v)); });
    r.with("aux", "atol", [&](const std::string& key, const std::string& v) { c.aux.options.atol = positive(key, to_double(key, v)); });
    r.with("aux", "theta_min", [&](const std::string& key, const std::string& v) { c.aux.options.theta_min = positive(key, to_double(key, v)); });
    r.with("aux", "h_max", [&](const std::string& key, const std::string& v) { c.aux.options.h_max = positive(key, to_double(key, v)); });

    r.with("run", "t_final", [&](const std::string& key, const std::string& v) { c.run.t_final = positive(key, to_double(key, v)); });
    r.with("run", "samples", [&](const std::string& key, const std::string& v) {
        c.run.samples = to_count(key, v);
        if (c.run.samples < 2)
            fail(key, "need at least 2 samples");
    });
    r.with("run", "sigma", [&](const std::string& key, const std::string& v) { c.run.sigmas = to_sigmas(key, v); });
    r.with("run", "max_infidelity", [&](const std::string& key, const std::string& v) { c.run.max_infidelity = positive(key, to_double(key, v)); });

    r.with("oracle", "enabled", [&](const std::string& key, const std::string& v) { c.oracle.enabled = to_bool(key, v); });
    r.with("oracle", "rtol", [&](const std::string& key, const std::string& v) { c.oracle.options.rtol = positive(key, to_double(key, v)); });
    r.with("oracle", "atol", [&](const std::string& key, const std::string& v) { c.oracle.options.atol = positive(key, to_double(key, v)); });

    r.with("output", "directory", [&](const std::string& key, const std::string& v) {
        const std::string d = boost::trim_copy(v);
        if (d.empty())
            fail(key, "empty path");
        c.output.directory = d;
    });
    r.with("output", "precision", [&](const std::string& key, const std::string& v) { c.output.precision = static_cast<int>(to_integer(key, v)); });

    r.with("algebra", "tol", [&](const std::string& key, const std::string& v) { c.algebra.tol = positive(key, to_double(key, v)); });
    r.with("algebra", "block_tol", [&](const std::string& key, const std::string& v) { c.algebra.block_tol = positive(key, to_double(key, v)); });

    r.with("berry", "theta_degrees", [&](const std::string& key, const std::string& v) {
        c.berry.theta_degrees = to_doubles(key, v);
        if (c.berry.theta_degrees.empty())
            fail(key, "list is empty");
    });
    r.with("berry", "sigma", [&](const std::string& key, const std::string& v) { c.berry.sigmas = to_sigmas(key, v); });
    r.with("berry", "m", [&](const std::string& key, const std::string& v) { c.berry.m = to_count(key, v); });
    r.with("berry", "g_abs", [&](const std::string& key, const std::string& v) { c.berry.g_abs = to_double(key, v); });
    r.with("berry", "phi0", [&](const std::string& key, const std::string& v) { c.berry.phi0 = to_double(key, v); });
    r.with("berry", "period", [&](const std::string& key, const std::string& v) { c.berry.period = positive(key, to_double(key, v)); });
    r.with("berry", "max_error", [&](const std::string& key, const std::string& v) { c.berry.max_error = positive(key, to_double(key, v)); });

    r.with("coherent", "xi", [&](const std::string& key, const std::string& v) { c.coherent.xi = to_double(key, v); });
    r.with("coherent", "sigma", [&](const std::string& key, const std::string& v) {
        const auto s = to_sigmas(key, v);
        if (s.size() != 1)
            fail(key, "exactly one sigma value");
        c.coherent.sigma = s.front();
    });
    r.with("coherent", "tail_tol", [&](const std::string& key, const std::string& v) { c.coherent.tail_tol = positive(key, to_double(key, v)); });
    r.with("coherent", "max_diff", [&](const std::string& key, const std::string& v) { c.coherent.max_diff = positive(key, to_double(key, v)); });

    validate(c);
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

}  // namespace jclab
