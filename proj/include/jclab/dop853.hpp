#pragma once

// Adaptive explicit Runge-Kutta integrator of order 8 with embedded 5th and
// 3rd order error estimators and a 7th order continuous extension
// (Dormand-Prince 8(5,3), coefficients from Hairer, Norsett & Wanner,
// "Solving Ordinary Differential Equations I", 2nd ed.).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "jclab/errors.hpp"

namespace jclab {

class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double time) : Error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

namespace dop853_coeffs {
// clang-format off
inline constexpr double c2 = 0.526001519587677318785587544488e-01;
inline constexpr double c3 = 0.789002279381515978178381316732e-01;
inline constexpr double c4 = 0.118350341907227396726757197510e+00;
inline constexpr double c5 = 0.281649658092772603273242802490e+00;
inline constexpr double c6 = 0.333333333333333333333333333333e+00;
inline constexpr double c7 = 0.25e+00;
inline constexpr double c8 = 0.307692307692307692307692307692e+00;
inline constexpr double c9 = 0.651282051282051282051282051282e+00;
inline constexpr double c10 = 0.6e+00;
inline constexpr double c11 = 0.857142857142857142857142857142e+00;
inline constexpr double c14 = 0.1e+00;
inline constexpr double c15 = 0.2e+00;
inline constexpr double c16 = 0.777777777777777777777777777778e+00;

inline constexpr double b1 = 5.42937341165687622380535766363e-2;
inline constexpr double b6 = 4.45031289275240888144113950566e0;
inline constexpr double b7 = 1.89151789931450038304281599044e0;
inline constexpr double b8 = -5.8012039600105847814672114227e0;
inline constexpr double b9 = 3.1116436695781989440891606237e-1;
inline constexpr double b10 = -1.52160949662516078556178806805e-1;
inline constexpr double b11 = 2.01365400804030348374776537501e-1;
inline constexpr double b12 = 4.47106157277725905176885569043e-2;

inline constexpr double bhh1 = 0.244094488188976377952755905512e+00;
inline constexpr double bhh2 = 0.733846688281611857341361741547e+00;
inline constexpr double bhh3 = 0.220588235294117647058823529412e-01;

inline constexpr double er1 = 0.1312004499419488073250102996e-01;
inline constexpr double er6 = -0.1225156446376204440720569753e+01;
inline constexpr double er7 = -0.4957589496572501915214079952e+00;
inline constexpr double er8 = 0.1664377182454986536961530415e+01;
inline constexpr double er9 = -0.3503288487499736816886487290e+00;
inline constexpr double er10 = 0.3341791187130174790297318841e+00;
inline constexpr double er11 = 0.8192320648511571246570742613e-01;
inline constexpr double er12 = -0.2235530786388629525884427845e-01;

inline constexpr double a21 = 5.26001519587677318785587544488e-2;
inline constexpr double a31 = 1.97250569845378994544595329183e-2;
inline constexpr double a32 = 5.91751709536136983633785987549e-2;
inline constexpr double a41 = 2.95875854768068491816892993775e-2;
inline constexpr double a43 = 8.87627564304205475450678981324e-2;
inline constexpr double a51 = 2.41365134159266685502369798665e-1;
inline constexpr double a53 = -8.84549479328286085344864962717e-1;
inline constexpr double a54 = 9.24834003261792003115737966543e-1;
inline constexpr double a61 = 3.7037037037037037037037037037e-2;
inline constexpr double a64 = 1.70828608729473871279604482173e-1;
inline constexpr double a65 = 1.25467687566822425016691814123e-1;
inline constexpr double a71 = 3.7109375e-2;
inline constexpr double a74 = 1.70252211019544039314978060272e-1;
inline constexpr double a75 = 6.02165389804559606850219397283e-2;
inline constexpr double a76 = -1.7578125e-2;
inline constexpr double a81 = 3.70920001185047927108779319836e-2;
inline constexpr double a84 = 1.70383925712239993810214054705e-1;
inline constexpr double a85 = 1.07262030446373284651809199168e-1;
inline constexpr double a86 = -1.53194377486244017527936158236e-2;
inline constexpr double a87 = 8.27378916381402288758473766002e-3;
inline constexpr double a91 = 6.24110958716075717114429577812e-1;
inline constexpr double a94 = -3.36089262944694129406857109825e0;
inline constexpr double a95 = -8.68219346841726006818189891453e-1;
inline constexpr double a96 = 2.75920996994467083049415600797e1;
inline constexpr double a97 = 2.01540675504778934086186788979e1;
inline constexpr double a98 = -4.34898841810699588477366255144e1;
inline constexpr double a101 = 4.77662536438264365890433908527e-1;
inline constexpr double a104 = -2.48811461997166764192642586468e0;
inline constexpr double a105 = -5.90290826836842996371446475743e-1;
inline constexpr double a106 = 2.12300514481811942347288949897e1;
inline constexpr double a107 = 1.52792336328824235832596922938e1;
inline constexpr double a108 = -3.32882109689848629194453265587e1;
inline constexpr double a109 = -2.03312017085086261358222928593e-2;
inline constexpr double a111 = -9.3714243008598732571704021658e-1;
inline constexpr double a114 = 5.18637242884406370830023853209e0;
inline constexpr double a115 = 1.09143734899672957818500254654e0;
inline constexpr double a116 = -8.14978701074692612513997267357e0;
inline constexpr double a117 = -1.85200656599969598641566180701e1;
inline constexpr double a118 = 2.27394870993505042818970056734e1;
inline constexpr double a119 = 2.49360555267965238987089396762e0;
inline constexpr double a1110 = -3.0467644718982195003823669022e0;
inline constexpr double a121 = 2.27331014751653820792359768449e0;
inline constexpr double a124 = -1.05344954667372501984066689879e1;
inline constexpr double a125 = -2.00087205822486249909675718444e0;
inline constexpr double a126 = -1.79589318631187989172765950534e1;
inline constexpr double a127 = 2.79488845294199600508499808837e1;
inline constexpr double a128 = -2.85899827713502369474065508674e0;
inline constexpr double a129 = -8.87285693353062954433549289258e0;
inline constexpr double a1210 = 1.23605671757943030647266201528e1;
inline constexpr double a1211 = 6.43392746015763530355970484046e-1;

inline constexpr double a141 = 5.61675022830479523392909219681e-2;
inline constexpr double a147 = 2.53500210216624811088794765333e-1;
inline constexpr double a148 = -2.46239037470802489917441475441e-1;
inline constexpr double a149 = -1.24191423263816360469010140626e-1;
inline constexpr double a1410 = 1.5329179827876569731206322685e-1;
inline constexpr double a1411 = 8.20105229563468988491666602057e-3;
inline constexpr double a1412 = 7.56789766054569976138603589584e-3;
inline constexpr double a1413 = -8.298e-3;
inline constexpr double a151 = 3.18346481635021405060768473261e-2;
inline constexpr double a156 = 2.83009096723667755288322961402e-2;
inline constexpr double a157 = 5.35419883074385676223797384372e-2;
inline constexpr double a158 = -5.49237485713909884646569340306e-2;
inline constexpr double a1511 = -1.08347328697249322858509316994e-4;
inline constexpr double a1512 = 3.82571090835658412954920192323e-4;
inline constexpr double a1513 = -3.40465008687404560802977114492e-4;
inline constexpr double a1514 = 1.41312443674632500278074618366e-1;
inline constexpr double a161 = -4.28896301583791923408573538692e-1;
inline constexpr double a166 = -4.69762141536116384314449447206e0;
inline constexpr double a167 = 7.68342119606259904184240953878e0;
inline constexpr double a168 = 4.06898981839711007970213554331e0;
inline constexpr double a169 = 3.56727187455281109270669543021e-1;
inline constexpr double a1613 = -1.39902416515901462129418009734e-3;
inline constexpr double a1614 = 2.9475147891527723389556272149e0;
inline constexpr double a1615 = -9.15095847217987001081870187138e0;

inline constexpr double d41 = -0.84289382761090128651353491142e+01;
inline constexpr double d46 = 0.56671495351937776962531783590e+00;
inline constexpr double d47 = -0.30689499459498916912797304727e+01;
inline constexpr double d48 = 0.23846676565120698287728149680e+01;
inline constexpr double d49 = 0.21170345824450282767155149946e+01;
inline constexpr double d410 = -0.87139158377797299206789907490e+00;
inline constexpr double d411 = 0.22404374302607882758541771650e+01;
inline constexpr double d412 = 0.63157877876946881815570249290e+00;
inline constexpr double d413 = -0.88990336451333310820698117400e-01;
inline constexpr double d414 = 0.18148505520854727256656404962e+02;
inline constexpr double d415 = -0.91946323924783554000451984436e+01;
inline constexpr double d416 = -0.44360363875948939664310572000e+01;
inline constexpr double d51 = 0.10427508642579134603413151009e+02;
inline constexpr double d56 = 0.24228349177525818288430175319e+03;
inline constexpr double d57 = 0.16520045171727028198505394887e+03;
inline constexpr double d58 = -0.37454675472269020279518312152e+03;
inline constexpr double d59 = -0.22113666853125306036270938578e+02;
inline constexpr double d510 = 0.77334326684722638389603898808e+01;
inline constexpr double d511 = -0.30674084731089398182061213626e+02;
inline constexpr double d512 = -0.93321305264302278729567221706e+01;
inline constexpr double d513 = 0.15697238121770843886131091075e+02;
inline constexpr double d514 = -0.31139403219565177677282850411e+02;
inline constexpr double d515 = -0.93529243588444783865713862664e+01;
inline constexpr double d516 = 0.35816841486394083752465898540e+02;
inline constexpr double d61 = 0.19985053242002433820987653617e+02;
inline constexpr double d66 = -0.38703730874935176555105901742e+03;
inline constexpr double d67 = -0.18917813819516756882830838328e+03;
inline constexpr double d68 = 0.52780815920542364900561016686e+03;
inline constexpr double d69 = -0.11573902539959630126141871134e+02;
inline constexpr double d610 = 0.68812326946963000169666922661e+01;
inline constexpr double d611 = -0.10006050966910838403183860980e+01;
inline constexpr double d612 = 0.77771377980534432092869265740e+00;
inline constexpr double d613 = -0.27782057523535084065932004339e+01;
inline constexpr double d614 = -0.60196695231264120758267380846e+02;
inline constexpr double d615 = 0.84320405506677161018159903784e+02;
inline constexpr double d616 = 0.11992291136182789328035130030e+02;
inline constexpr double d71 = -0.25693933462703749003312586129e+02;
inline constexpr double d76 = -0.15418974869023643374053993627e+03;
inline constexpr double d77 = -0.23152937917604549567536039109e+03;
inline constexpr double d78 = 0.35763911791061412378285349910e+03;
inline constexpr double d79 = 0.93405324183624310003907691704e+02;
inline constexpr double d710 = -0.37458323136451633156875139351e+02;
inline constexpr double d711 = 0.10409964950896230045147246184e+03;
inline constexpr double d712 = 0.29840293426660503123344363579e+02;
inline constexpr double d713 = -0.43533456590011143754432175058e+02;
inline constexpr double d714 = 0.96324553959188282948394950600e+02;
inline constexpr double d715 = -0.39177261675615439165231486172e+02;
inline constexpr double d716 = -0.14972683625798562581422125276e+03;
// clang-format on
}  // namespace dop853_coeffs

/// One accepted step [t0, t0 + h] with its continuous extension.
template <int Dim>
struct DenseSegment {
    using Vec = Eigen::Matrix<double, Dim, 1>;

    double t0 = 0.0;
    double h = 0.0;
    std::array<Vec, 8> r;

    double t1() const { return t0 + h; }

    Vec value(double t) const
    {
        const double s = (t - t0) / h;
        const double s1 = 1.0 - s;
        const Vec inner = r[4] + s * (r[5] + s1 * (r[6] + s * r[7]));
        return r[0] + s * (r[1] + s1 * (r[2] + s * (r[3] + s1 * inner)));
    }

    /// d/dt of value(t), obtained by differentiating the nested form.
    Vec derivative(double t) const
    {
        const double s = (t - t0) / h;
        const double s1 = 1.0 - s;
        // innermost first: p6 = r6 + s r7, p5 = r5 + s1 p6, ...
        const Vec p6 = r[6] + s * r[7];
        const Vec d6 = r[7];
        const Vec p5 = r[5] + s1 * p6;
        const Vec d5 = -p6 + s1 * d6;
        const Vec p4 = r[4] + s * p5;
        const Vec d4 = p5 + s * d5;
        const Vec p3 = r[3] + s1 * p4;
        const Vec d3 = -p4 + s1 * d4;
        const Vec p2 = r[2] + s * p3;
        const Vec d2 = p3 + s * d3;
        const Vec p1 = r[1] + s1 * p2;
        const Vec d1 = -p2 + s1 * d2;
        const Vec dv = p1 + s * d1;
        return dv / h;
    }
};

struct Dop853Options {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_max = 0.0;           ///< 0 means |t1 - t0|
    std::size_t max_steps = 1'000'000;
};

struct Dop853Stats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t evaluations = 0;
};

/// Integrates y' = f(t, y) from t0 to t1 > t0. on_step(segment) is called for
/// every accepted step in order. f may throw; the exception propagates.
/// Throws IntegrationError when the step size underflows or max_steps is hit.
template <int Dim, class Rhs, class OnStep>
Dop853Stats dop853_integrate(Rhs&& f, double t0, const Eigen::Matrix<double, Dim, 1>& y0,
                             double t1, const Dop853Options& opt, OnStep&& on_step)
{
    using namespace dop853_coeffs;
    using Vec = Eigen::Matrix<double, Dim, 1>;

    if (!(t1 > t0))
        throw IntegrationError("integration window must satisfy t1 > t0", t0);

    const double uround = std::numeric_limits<double>::epsilon();
    const double safe = 0.9, fac1 = 0.333, fac2 = 6.0, beta = 0.0;
    const double expo1 = 1.0 / 8.0 - beta * 0.2;
    const double facc1 = 1.0 / fac1, facc2 = 1.0 / fac2;
    const double h_max = opt.h_max > 0.0 ? opt.h_max : (t1 - t0);
    const auto n = static_cast<double>(y0.size());

    Dop853Stats stats;
    auto eval = [&](double t, const Vec& y) -> Vec {
        ++stats.evaluations;
        return f(t, y);
    };

    double t = t0;
    Vec y = y0;
    Vec k1 = eval(t, y);

    // initial step guess
    double h;
    {
        const Vec sk = (opt.atol + opt.rtol * y.array().abs()).matrix();
        const double dnf = (k1.array() / sk.array()).square().sum();
        const double dny = (y.array() / sk.array()).square().sum();
        h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
        h = std::min(h, h_max);
        const Vec k2 = eval(t + h, y + h * k1);
        const double der2 = std::sqrt(((k2 - k1).array() / sk.array()).square().sum()) / h;
        const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
        const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 1.0 / 8.0);
        h = std::min({100.0 * h, h1, h_max});
    }

    double facold = 1e-4;
    bool last_rejected = false;
    std::size_t steps = 0;
    Vec k2, k3, k4, k5, k6, k7, k8, k9, k10, k11, k12, k13, k14, k15, k16, yt, y1;

    while (t < t1) {
        if (++steps > opt.max_steps)
            throw IntegrationError("maximum number of steps exceeded", t);
        if (0.1 * std::abs(h) <= std::abs(t) * uround)
            throw IntegrationError("step size underflow at t = " + std::to_string(t), t);
        bool final_step = false;
        if (t + 1.01 * h >= t1) {
            h = t1 - t;
            final_step = true;
        }

        k2 = eval(t + c2 * h, y + h * a21 * k1);
        k3 = eval(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
        k4 = eval(t + c4 * h, y + h * (a41 * k1 + a43 * k3));
        k5 = eval(t + c5 * h, y + h * (a51 * k1 + a53 * k3 + a54 * k4));
        k6 = eval(t + c6 * h, y + h * (a61 * k1 + a64 * k4 + a65 * k5));
        k7 = eval(t + c7 * h, y + h * (a71 * k1 + a74 * k4 + a75 * k5 + a76 * k6));
        k8 = eval(t + c8 * h, y + h * (a81 * k1 + a84 * k4 + a85 * k5 + a86 * k6 + a87 * k7));
        k9 = eval(t + c9 * h,
                  y + h * (a91 * k1 + a94 * k4 + a95 * k5 + a96 * k6 + a97 * k7 + a98 * k8));
        k10 = eval(t + c10 * h, y + h * (a101 * k1 + a104 * k4 + a105 * k5 + a106 * k6 + a107 * k7
                                         + a108 * k8 + a109 * k9));
        k11 = eval(t + c11 * h, y + h * (a111 * k1 + a114 * k4 + a115 * k5 + a116 * k6 + a117 * k7
                                         + a118 * k8 + a119 * k9 + a1110 * k10));
        const double t_new = final_step ? t1 : t + h;
        k12 = eval(t_new, y + h * (a121 * k1 + a124 * k4 + a125 * k5 + a126 * k6 + a127 * k7
                                   + a128 * k8 + a129 * k9 + a1210 * k10 + a1211 * k11));
        const Vec incr = b1 * k1 + b6 * k6 + b7 * k7 + b8 * k8 + b9 * k9 + b10 * k10 + b11 * k11
                         + b12 * k12;
        y1 = y + h * incr;

        // error estimate
        const Vec sk = (opt.atol + opt.rtol * y.array().abs().max(y1.array().abs())).matrix();
        const Vec e3 = incr - bhh1 * k1 - bhh2 * k9 - bhh3 * k12;
        const Vec e5 = er1 * k1 + er6 * k6 + er7 * k7 + er8 * k8 + er9 * k9 + er10 * k10
                       + er11 * k11 + er12 * k12;
        const double err2 = (e3.array() / sk.array()).square().sum();
        double err = (e5.array() / sk.array()).square().sum();
        double deno = err + 0.01 * err2;
        if (deno <= 0.0)
            deno = 1.0;
        err = std::abs(h) * err * std::sqrt(1.0 / (n * deno));
        if (!std::isfinite(err))
            throw IntegrationError("non-finite error estimate at t = " + std::to_string(t), t);

        const double fac11 = std::pow(err, expo1);
        double fac = fac11 / std::pow(facold, beta);
        fac = std::max(facc2, std::min(facc1, fac / safe));
        double h_new = h / fac;

        if (err <= 1.0) {
            facold = std::max(err, 1e-4);
            ++stats.accepted;
            k13 = eval(t_new, y1);

            DenseSegment<Dim> seg;
            seg.t0 = t;
            seg.h = h;
            const Vec ydiff = y1 - y;
            const Vec bspl = h * k1 - ydiff;
            seg.r[0] = y;
            seg.r[1] = ydiff;
            seg.r[2] = bspl;
            seg.r[3] = ydiff - h * k13 - bspl;
            Vec r4 = d41 * k1 + d46 * k6 + d47 * k7 + d48 * k8 + d49 * k9 + d410 * k10 + d411 * k11
                     + d412 * k12;
            Vec r5 = d51 * k1 + d56 * k6 + d57 * k7 + d58 * k8 + d59 * k9 + d510 * k10 + d511 * k11
                     + d512 * k12;
            Vec r6 = d61 * k1 + d66 * k6 + d67 * k7 + d68 * k8 + d69 * k9 + d610 * k10 + d611 * k11
                     + d612 * k12;
            Vec r7 = d71 * k1 + d76 * k6 + d77 * k7 + d78 * k8 + d79 * k9 + d710 * k10 + d711 * k11
                     + d712 * k12;
            k14 = eval(t + c14 * h, y + h * (a141 * k1 + a147 * k7 + a148 * k8 + a149 * k9
                                             + a1410 * k10 + a1411 * k11 + a1412 * k12 + a1413 * k13));
            k15 = eval(t + c15 * h, y + h * (a151 * k1 + a156 * k6 + a157 * k7 + a158 * k8
                                             + a1511 * k11 + a1512 * k12 + a1513 * k13 + a1514 * k14));
            k16 = eval(t + c16 * h, y + h * (a161 * k1 + a166 * k6 + a167 * k7 + a168 * k8
                                             + a169 * k9 + a1613 * k13 + a1614 * k14 + a1615 * k15));
            seg.r[4] = h * (r4 + d413 * k13 + d414 * k14 + d415 * k15 + d416 * k16);
            seg.r[5] = h * (r5 + d513 * k13 + d514 * k14 + d515 * k15 + d516 * k16);
            seg.r[6] = h * (r6 + d613 * k13 + d614 * k14 + d615 * k15 + d616 * k16);
            seg.r[7] = h * (r7 + d713 * k13 + d714 * k14 + d715 * k15 + d716 * k16);
            on_step(static_cast<const DenseSegment<Dim>&>(seg));

            k1 = k13;
            y = y1;
            t = t_new;
            if (std::abs(h_new) > h_max)
                h_new = h_max;
            if (last_rejected)
                h_new = std::min(std::abs(h_new), std::abs(h));
            last_rejected = false;
            h = h_new;
        } else {
            h_new = h / std::min(facc1, fac11 / safe);
            last_rejected = true;
            ++stats.rejected;
            h = h_new;
        }
    }
    return stats;
}

}  // namespace jclab
