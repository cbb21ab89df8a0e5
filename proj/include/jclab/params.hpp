#pragma once

#include <complex>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace jclab {

enum class ProfileKind { constant, linear, sinusoid, chirp, table, polynomial };

std::string_view to_string(ProfileKind kind);

/// Scalar function of time used for omega(t), omega0(t), |g|(t) and arg g(t).
///
/// Coefficient layout per kind:
///   constant    c
///   linear      c0 + c1 t
///   sinusoid    c0 + A sin(W t + d)                      (c0, A, W, d)
///   chirp       c0 + A sin(W t + rate t^2 / 2 + d)       (c0, A, W, rate, d)
///   polynomial  sum_i c_i t^i
///   table       piecewise linear through sorted (t, value) knots; evaluating
///               outside [t_first, t_last] is an error.
class TimeProfile {
public:
    static TimeProfile constant(double c);
    static TimeProfile linear(double c0, double c1);
    static TimeProfile sinusoid(double offset, double amplitude, double frequency,
                                double phase);
    static TimeProfile chirp(double offset, double amplitude, double frequency,
                             double rate, double phase);
    static TimeProfile polynomial(std::vector<double> coefficients);
    static TimeProfile table(std::vector<std::pair<double, double>> knots);

    /// Builds a profile from a kind and flat coefficient list (table knots are
    /// given as t0, v0, t1, v1, ...). Throws ConfigError on arity mismatch.
    static TimeProfile from_coefficients(ProfileKind kind, std::span<const double> coeffs);

    double operator()(double t) const;

    ProfileKind kind() const noexcept { return kind_; }
    std::span<const double> coefficients() const noexcept { return coeffs_; }

    /// Polynomial coefficients for constant, linear and polynomial kinds;
    /// empty for the others.
    std::vector<double> polynomial_coefficients() const;

private:
    TimeProfile(ProfileKind kind, std::vector<double> coeffs);

    ProfileKind kind_;
    std::vector<double> coeffs_;
};

/// Time-dependent model: H(t) = w a†a + (w0/2) sz + g (a†)^k s- + g* a^k s+.
/// g(t) = g_mod(t) exp(i g_phase(t)).
struct ModelParams {
    TimeProfile omega = TimeProfile::constant(1.0);
    TimeProfile omega0 = TimeProfile::constant(3.0);
    TimeProfile g_mod = TimeProfile::constant(0.0);
    TimeProfile g_phase = TimeProfile::constant(0.0);
    unsigned k = 3;
};

struct Couplings {
    double omega;
    double omega0;
    std::complex<double> g;
};

/// Throws EvaluationError for non-finite values or negative |g|.
Couplings evaluate(const ModelParams& params, double t);

/// k w(t) - w0(t).
double detuning(const ModelParams& params, double t);

}  // namespace jclab
