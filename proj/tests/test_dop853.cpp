#include <doctest.h>

#include <cmath>
#include <vector>

#include "jclab/dop853.hpp"

using namespace jclab;
using Vec2 = Eigen::Vector2d;

namespace {

// y = (cos t, -sin t): y0' = y1, y1' = -y0
Vec2 rotation(double, const Vec2& y) { return {y(1), -y(0)}; }

struct Run {
    std::vector<DenseSegment<2>> segments;
    Dop853Stats stats;
    Vec2 end;
};

Run run(double rtol, double t1 = 10.0)
{
    Run r;
    Dop853Options opt;
    opt.rtol = rtol;
    opt.atol = rtol * 1e-2;
    r.stats = dop853_integrate<2>(rotation, 0.0, Vec2{1.0, 0.0}, t1, opt,
                                  [&](const DenseSegment<2>& s) { r.segments.push_back(s); });
    r.end = r.segments.back().value(t1);
    return r;
}

}  // namespace

TEST_CASE("end point accuracy tracks the tolerance")
{
    double previous = 1.0;
    for (double rtol : {1e-6, 1e-8, 1e-10, 1e-12}) {
        const Run r = run(rtol);
        const double err = (r.end - Vec2{std::cos(10.0), -std::sin(10.0)}).norm();
        CHECK(err < 100.0 * rtol);
        CHECK(err < previous);
        previous = err;
    }
}

TEST_CASE("segments tile the window")
{
    const Run r = run(1e-10);
    CHECK(r.segments.front().t0 == 0.0);
    CHECK(std::abs(r.segments.back().t1() - 10.0) < 1e-14);
    for (std::size_t i = 1; i < r.segments.size(); ++i)
        CHECK(r.segments[i].t0 == r.segments[i - 1].t1());
    CHECK(r.stats.accepted == r.segments.size());
}

TEST_CASE("dense output and its derivative between nodes")
{
    const Run r = run(1e-11);
    double value_err = 0.0, deriv_err = 0.0;
    for (const auto& s : r.segments)
        for (double frac : {0.1, 0.37, 0.5, 0.81}) {
            const double t = s.t0 + frac * s.h;
            value_err = std::max(value_err, (s.value(t) - Vec2{std::cos(t), -std::sin(t)}).norm());
            deriv_err = std::max(deriv_err, (s.derivative(t) - Vec2{-std::sin(t), -std::cos(t)}).norm());
        }
    CHECK(value_err < 1e-9);
    CHECK(deriv_err < 1e-8);
    // interpolant is continuous at nodes
    for (std::size_t i = 1; i < r.segments.size(); ++i)
        CHECK((r.segments[i - 1].value(r.segments[i].t0) - r.segments[i].value(r.segments[i].t0)).norm() < 1e-13);
}

TEST_CASE("blow-up reports the failure time")
{
    // y' = y^2, y(0) = 1 has a pole at t = 1
    auto f = [](double, const Eigen::Matrix<double, 1, 1>& y) -> Eigen::Matrix<double, 1, 1> {
        return Eigen::Matrix<double, 1, 1>{y(0) * y(0)};
    };
    Dop853Options opt;
    opt.max_steps = 100000;
    try {
        dop853_integrate<1>(f, 0.0, Eigen::Matrix<double, 1, 1>{1.0}, 2.0, opt, [](const auto&) {});
        FAIL("expected an integration error");
    } catch (const IntegrationError& e) {
        CHECK(e.time() == doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("reversed window is rejected")
{
    Dop853Options opt;
    CHECK_THROWS_AS(dop853_integrate<2>(rotation, 1.0, Vec2{1.0, 0.0}, 0.0, opt, [](const auto&) {}),
                    IntegrationError);
}
