#include "jclab/params.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jclab/errors.hpp"

namespace jclab {

std::string_view to_string(ProfileKind kind)
{
    switch (kind) {
    case ProfileKind::constant: return "constant";
    case ProfileKind::linear: return "linear";
    case ProfileKind::sinusoid: return "sinusoid";
    case ProfileKind::chirp: return "chirp";
    case ProfileKind::table: return "table";
    case ProfileKind::polynomial: return "polynomial";
    }
    return "unknown";
}

TimeProfile::TimeProfile(ProfileKind kind, std::vector<double> coeffs)
    : kind_(kind), coeffs_(std::move(coeffs))
{
    for (double c : coeffs_) {
        if (!std::isfinite(c))
            throw ConfigError("profile coefficients must be finite");
    }
}

TimeProfile TimeProfile::constant(double c) { return {ProfileKind::constant, {c}}; }

TimeProfile TimeProfile::linear(double c0, double c1) { return {ProfileKind::linear, {c0, c1}}; }

TimeProfile TimeProfile::sinusoid(double offset, double amplitude, double frequency, double phase)
{
    return {ProfileKind::sinusoid, {offset, amplitude, frequency, phase}};
}

TimeProfile TimeProfile::chirp(double offset, double amplitude, double frequency, double rate,
                               double phase)
{
    return {ProfileKind::chirp, {offset, amplitude, frequency, rate, phase}};
}

TimeProfile TimeProfile::polynomial(std::vector<double> coefficients)
{
    if (coefficients.empty())
        throw ConfigError("polynomial profile needs at least one coefficient");
    return {ProfileKind::polynomial, std::move(coefficients)};
}

TimeProfile TimeProfile::table(std::vector<std::pair<double, double>> knots)
{
    if (knots.size() < 2)
        throw ConfigError("table profile needs at least two knots");
    std::vector<double> flat;
    flat.reserve(2 * knots.size());
    for (std::size_t i = 0; i < knots.size(); ++i) {
        if (i > 0 && !(knots[i].first > knots[i - 1].first))
            throw ConfigError("table profile time stamps must be strictly increasing");
        flat.push_back(knots[i].first);
        flat.push_back(knots[i].second);
    }
    return {ProfileKind::table, std::move(flat)};
}

TimeProfile TimeProfile::from_coefficients(ProfileKind kind, std::span<const double> c)
{
    auto expect = [&](std::size_t n) {
        if (c.size() != n)
            throw ConfigError(std::string(to_string(kind)) + " profile expects "
                              + std::to_string(n) + " coefficients, got "
                              + std::to_string(c.size()));
    };
    switch (kind) {
    case ProfileKind::constant: expect(1); return constant(c[0]);
    case ProfileKind::linear: expect(2); return linear(c[0], c[1]);
    case ProfileKind::sinusoid: expect(4); return sinusoid(c[0], c[1], c[2], c[3]);
    case ProfileKind::chirp: expect(5); return chirp(c[0], c[1], c[2], c[3], c[4]);
    case ProfileKind::polynomial: return polynomial({c.begin(), c.end()});
    case ProfileKind::table: {
        if (c.size() % 2 != 0)
            throw ConfigError("table profile expects (t, value) pairs");
        std::vector<std::pair<double, double>> knots;
        for (std::size_t i = 0; i < c.size(); i += 2)
            knots.emplace_back(c[i], c[i + 1]);
        return table(std::move(knots));
    }
    }
    throw ConfigError("unknown profile kind");
}

double TimeProfile::operator()(double t) const
{
    if (!std::isfinite(t))
        throw EvaluationError("profile evaluated at non-finite time");
    const auto& c = coeffs_;
    double value = 0.0;
    switch (kind_) {
    case ProfileKind::constant: value = c[0]; break;
    case ProfileKind::linear: value = c[0] + c[1] * t; break;
    case ProfileKind::sinusoid: value = c[0] + c[1] * std::sin(c[2] * t + c[3]); break;
    case ProfileKind::chirp:
        value = c[0] + c[1] * std::sin(c[2] * t + 0.5 * c[3] * t * t + c[4]);
        break;
    case ProfileKind::polynomial:
        for (auto it = c.rbegin(); it != c.rend(); ++it)
            value = value * t + *it;
        break;
    case ProfileKind::table: {
        const std::size_t n = c.size() / 2;
        const double t_first = c[0];
        const double t_last = c[2 * (n - 1)];
        if (t < t_first || t > t_last)
            throw EvaluationError("table profile evaluated at t = " + std::to_string(t)
                                  + " outside [" + std::to_string(t_first) + ", "
                                  + std::to_string(t_last) + "]");
        // first knot with time >= t
        std::size_t lo = 0, hi = n - 1;
        while (hi - lo > 1) {
            std::size_t mid = (lo + hi) / 2;
            if (c[2 * mid] <= t)
                lo = mid;
            else
                hi = mid;
        }
        const double t0 = c[2 * lo], v0 = c[2 * lo + 1];
        const double t1 = c[2 * hi], v1 = c[2 * hi + 1];
        value = v0 + (v1 - v0) * (t - t0) / (t1 - t0);
        break;
    }
    }
    if (!std::isfinite(value))
        throw EvaluationError("profile produced a non-finite value at t = " + std::to_string(t));
    return value;
}

std::vector<double> TimeProfile::polynomial_coefficients() const
{
    switch (kind_) {
    case ProfileKind::constant:
    case ProfileKind::linear:
    case ProfileKind::polynomial: return coeffs_;
    default: return {};
    }
}

Couplings evaluate(const ModelParams& params, double t)
{
    const double modulus = params.g_mod(t);
    if (modulus < 0.0)
        throw EvaluationError("coupling modulus |g| is negative at t = " + std::to_string(t));
    return {params.omega(t), params.omega0(t), std::polar(modulus, params.g_phase(t))};
}

double detuning(const ModelParams& params, double t)
{
    return static_cast<double>(params.k) * params.omega(t) - params.omega0(t);
}

}  // namespace jclab
