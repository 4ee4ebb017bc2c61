#include "zal/rszeta.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <unordered_set>
#include <vector>

#include "zal/quadrature.hpp"

namespace zal {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

// ---------------------------------------------------------------------------
// theta(t): asymptotic series. Coefficients of t^-(2j-1) verified against the
// log-Gamma definition to full precision.
constexpr double kThetaC[5] = {
    1.0 / 48.0, 7.0 / 5760.0, 31.0 / 80640.0, 127.0 / 430080.0, 511.0 / 1216512.0,
};

double theta_correction(double t) {
    double t2 = t * t;
    double inv = 1.0 / t;
    double acc = 0.0;
    double p = inv;
    for (double c : kThetaC) {
        acc += c * p;
        p /= t2;
    }
    return acc;
}

} // namespace

DD theta_dd(double t) {
    if (!(t >= 2.0)) throw domain_error("theta: t must be >= 2");
    DD x{t};
    DD l = dd::log(dd::div(x, dd::two_pi()));
    DD main = dd::mul(dd::mul(x, 0.5), dd::sub(l, 1.0));
    DD pi8{dd::pi().hi / 8.0, dd::pi().lo / 8.0};
    main = dd::sub(main, pi8);
    return dd::add(main, theta_correction(t));
}

double theta(double t) { return theta_dd(t).to_double(); }

double theta_method_error(double t) {
    if (!(t >= 2.0)) throw domain_error("theta: t must be >= 2");
    // Empirical envelope of the series remainder (the expansion parameter is
    // effectively (2/t)^2 with a slowly decaying prefactor at the bottom).
    if (t < 5.0) return 1.1e-3 * std::pow(2.0 / t, 10.0);
    if (t < 10.0) return 1.0e-7 * std::pow(5.0 / t, 11.0);
    return std::max(3e-14 * std::pow(10.0 / t, 11.0), 1e-16 * std::abs(theta(t)));
}

double theta_derivative(double t) {
    return 0.5 * std::log(t / kTwoPi) - 1.0 / (48.0 * t * t);
}

// ---------------------------------------------------------------------------
// Truncated power series ("jet") arithmetic used to evaluate derivatives of
//   Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p)
// at arbitrary p. Psi is entire: at p = 1/4, 3/4 both factors vanish to first
// order and the quotient series is formed after dividing out the zero.

namespace {

constexpr int JN = 56;
using Jet = std::array<DD, JN>;

// Complex double-double, just enough for evaluating Psi on a circle.
struct DDC {
    DD re, im;
};

DDC ddc_mul(DDC a, DDC b) {
    return {dd::sub(dd::mul(a.re, b.re), dd::mul(a.im, b.im)),
            dd::add(dd::mul(a.re, b.im), dd::mul(a.im, b.re))};
}

DDC ddc_div(DDC a, DDC b) {
    DD n2 = dd::add(dd::mul(b.re, b.re), dd::mul(b.im, b.im));
    DDC num = ddc_mul(a, {b.re, dd::neg(b.im)});
    return {dd::div(num.re, n2), dd::div(num.im, n2)};
}

// cos(u + iv) = cos u cosh v - i sin u sinh v
DDC ddc_cos(DDC w) {
    DD s, c;
    dd::sincos(w.re, s, c);
    DD ev = dd::exp(w.im);
    DD emv = dd::div(DD{1.0}, ev);
    DD ch = dd::mul(dd::add(ev, emv), 0.5);
    DD sh = dd::mul(dd::sub(ev, emv), 0.5);
    return {dd::mul(c, ch), dd::neg(dd::mul(s, sh))};
}

struct PsiBase {
    double p0;
    Jet taylor;                     // Taylor coefficients of Psi at p0
    std::array<double, JN> taylor_d;   // rounded copies for the fast path
};

// Taylor coefficients of Psi at p0 by a trapezoid Cauchy integral on a
// circle of radius r. Psi is entire, so the only accuracy limits are the
// point evaluations (double-double) and aliasing, both far below the jets'
// needs with 512 nodes. This avoids the geometric noise amplification a
// power-series quotient recurrence suffers when cos(2 pi p) has a zero near
// the base point.
Jet psi_taylor_cauchy(double p0) {
    constexpr int N = 512;
    constexpr double r = 1.25;
    // Node angles are offset by a half step so no node lands on the real
    // axis, where the zeros of cos(2 pi z) live.
    static const std::array<std::pair<DD, DD>, 2 * N>& trig = [] {
        static std::array<std::pair<DD, DD>, 2 * N> t;
        for (int m = 0; m < 2 * N; ++m) {
            DD ang = dd::div(dd::mul(dd::pi(), static_cast<double>(m)),
                             static_cast<double>(N));
            DD si, co;
            dd::sincos(ang, si, co);
            t[m] = {si, co};
        }
        return t;
    }();

    std::array<DDC, N> vals;
    for (int k = 0; k < N; ++k) {
        const auto& [sk, ck] = trig[2 * k + 1];
        DDC z{dd::add(dd::mul(ck, r), p0), dd::mul(sk, r)};
        DDC z2 = ddc_mul(z, z);
        DDC arg{dd::sub(dd::sub(z2.re, z.re), 0.0625), dd::sub(z2.im, z.im)};
        DDC num = ddc_cos({dd::mul(dd::two_pi(), arg.re), dd::mul(dd::two_pi(), arg.im)});
        DDC den = ddc_cos({dd::mul(dd::two_pi(), z.re), dd::mul(dd::two_pi(), z.im)});
        vals[k] = ddc_div(num, den);
    }

    Jet out;
    double rpow = 1.0;
    for (int i = 0; i < JN; ++i) {
        DD acc{0.0};
        for (int k = 0; k < N; ++k) {
            // omega^{-i k} at the offset angle (2k+1) pi / N times i
            int idx = static_cast<int>((static_cast<int64_t>(i) * (2 * k + 1)) % (2 * N));
            const auto& [si, co] = trig[idx];
            acc = dd::add(acc, dd::add(dd::mul(vals[k].re, co), dd::mul(vals[k].im, si)));
        }
        out[i] = dd::div(acc, static_cast<double>(N) * rpow);
        rpow *= r;
    }
    return out;
}

std::vector<PsiBase> make_psi_bases() {
    std::vector<PsiBase> bases;
    for (double p0 : {0.00, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45,
                      0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95,
                      1.00}) {
        PsiBase b;
        b.p0 = p0;
        b.taylor = psi_taylor_cauchy(p0);
        for (int i = 0; i < JN; ++i) b.taylor_d[i] = b.taylor[i].to_double();
        bases.push_back(std::move(b));
    }
    return bases;
}

const std::vector<PsiBase>& psi_bases() {
    static const std::vector<PsiBase> bases = make_psi_bases();
    return bases;
}

const PsiBase& pick_base(double p) {
    const auto& bases = psi_bases();
    size_t idx = static_cast<size_t>(std::min(
        std::max(0.0, std::floor(p * 20.0 + 0.5)), 20.0));
    return bases[idx];
}

// Psi and derivatives up to jmax at p. Orders <= 12 are fine in double;
// beyond that the falling factorials reach 1e30 and the sums cancel, so the
// accumulation switches to double-double.
void psi_derivatives(double p, int jmax, double* out) {
    const PsiBase& base = pick_base(p);
    double dx = p - base.p0;
    int j_fast = std::min(jmax, 12);
    for (int j = 0; j <= j_fast; ++j) {
        double acc = 0.0;
        for (int i = JN - 1; i >= j; --i) {
            double ff = 1.0;
            for (int m = 0; m < j; ++m) ff *= (i - m);
            acc = acc * dx + base.taylor_d[i] * ff;
        }
        out[j] = acc;
    }
    for (int j = 13; j <= jmax; ++j) {
        DD acc{0.0};
        for (int i = JN - 1; i >= j; --i) {
            double ff = 1.0;
            for (int m = 0; m < j; ++m) ff *= (i - m);
            acc = dd::add(dd::mul(acc, dx), dd::mul(base.taylor[i], ff));
        }
        out[j] = acc.to_double();
    }
}

// Remainder coefficient constants. C0..C4 are the classical closed forms;
// C5..C7 were fitted against high-precision reference evaluations (residuals
// below 1e-22) and carry the same derivative structure.
constexpr double kC5[4] = {-1.02202751672480500e-12, -8.24162989486882637e-09,
                           -1.09112451946924605e-05, -1.62760416666666674e-03};
constexpr double kC6[5] = {1.77435332764723075e-15, 2.60617016764825266e-11,
                           7.94266056551924886e-08, 4.66664632161458302e-05,
                           2.44140625000000000e-03};
constexpr double kC7[6] = {-2.64040673757026462e-18, -6.38767197952998456e-14,
                           -3.73361252252664557e-10, -5.59169358887575436e-07,
                           -1.55258178710935939e-04, -2.44140624999995490e-03};
constexpr double kC8[7] = {3.44796595684996899e-21,  1.27847402464654837e-16,
                           1.27489597869591532e-12,  3.89029025190675253e-09,
                           3.12792602237590761e-06,  4.07816070696707033e-04,
                           1.25247580547463823e-03};
constexpr double kC9[7] = {-3.68235650687165128e-24, -2.02013795446695200e-19,
                           -3.21556444587379531e-15, -1.76401506214564670e-11,
                           -3.13632896346194151e-08, -1.40732530768448053e-05,
                           -8.21942345613738026e-04};

double rs_coefficient_impl(int j, const double* d) {
    const double pi2 = M_PI * M_PI;
    const double pi4 = pi2 * pi2;
    const double pi6 = pi4 * pi2;
    const double pi8 = pi4 * pi4;
    const double pi10 = pi8 * pi2;
    const double pi12 = pi8 * pi4;
    const double pi14 = pi12 * pi2;
    const double pi16 = pi8 * pi8;
    const double pi18 = pi16 * pi2;
    switch (j) {
        case 0: return d[0];
        case 1: return -d[3] / (96.0 * pi2);
        case 2: return d[6] / (18432.0 * pi4) + d[2] / (64.0 * pi2);
        case 3:
            return -d[9] / (5308416.0 * pi6) - d[5] / (3840.0 * pi4) -
                   d[1] / (64.0 * pi2);
        case 4:
            return d[12] / (2038431744.0 * pi8) + 11.0 * d[8] / (5898240.0 * pi6) +
                   19.0 * d[4] / (24576.0 * pi4) + d[0] / (128.0 * pi2);
        case 5:
            return kC5[0] * d[15] / pi10 + kC5[1] * d[11] / pi8 +
                   kC5[2] * d[7] / pi6 + kC5[3] * d[3] / pi4;
        case 6:
            return kC6[0] * d[18] / pi12 + kC6[1] * d[14] / pi10 +
                   kC6[2] * d[10] / pi8 + kC6[3] * d[6] / pi6 + kC6[4] * d[2] / pi4;
        case 7:
            return kC7[0] * d[21] / pi14 + kC7[1] * d[17] / pi12 +
                   kC7[2] * d[13] / pi10 + kC7[3] * d[9] / pi8 +
                   kC7[4] * d[5] / pi6 + kC7[5] * d[1] / pi4;
        case 8:
            return kC8[0] * d[24] / pi16 + kC8[1] * d[20] / pi14 +
                   kC8[2] * d[16] / pi12 + kC8[3] * d[12] / pi10 +
                   kC8[4] * d[8] / pi8 + kC8[5] * d[4] / pi6 + kC8[6] * d[0] / pi4;
        case 9:
            return kC9[0] * d[27] / pi18 + kC9[1] * d[23] / pi16 +
                   kC9[2] * d[19] / pi14 + kC9[3] * d[15] / pi12 +
                   kC9[4] * d[11] / pi10 + kC9[5] * d[7] / pi8 + kC9[6] * d[3] / pi6;
    }
    throw domain_error("rs_coefficient: order out of range");
}

// ---------------------------------------------------------------------------
// dd logarithms of small integers for the main-sum phases.

constexpr int kLogTableSize = 4096;   // supports t up to ~1e8

const std::vector<DD>& log_table() {
    static const std::vector<DD> table = [] {
        std::vector<DD> t(kLogTableSize + 1);
        for (int n = 1; n <= kLogTableSize; ++n) t[n] = dd::log(static_cast<double>(n));
        return t;
    }();
    return table;
}

} // namespace

namespace detail {
double rs_coefficient(int j, double p) {
    double d[28];
    psi_derivatives(p, 27, d);
    return rs_coefficient_impl(j, d);
}
double psi_derivative_probe(double p, int j) {
    double d[28];
    psi_derivatives(p, 27, d);
    return d[j];
}
} // namespace detail

// ---------------------------------------------------------------------------
// Euler-Maclaurin zeta: the oracle path.

namespace {
constexpr double kBern[24] = {
    8.33333333333333287074e-02,  -1.38888888888888894189e-03, 3.30687830687830710131e-05,
    -8.26719576719576754153e-07, 2.08767569878681001866e-08,  -5.28419013868749322002e-10,
    1.33825365306846788611e-11,  -3.38968029632258271696e-13, 8.58606205627784516939e-15,
    -2.17486869855806192266e-16, 5.50900282836022953019e-18,  -1.39544646858125223056e-19,
    3.53470703962946728227e-21,  -8.95351742703754627753e-23, 2.26795245233768292988e-24,
    -5.74479066887220246190e-26, 1.45517247561486495800e-27,  -3.68599494066531028596e-29,
    9.33673425709504506551e-31,  -2.36502241570062995491e-32, 5.99067176248213414201e-34,
    -1.51745488446829031664e-35, 3.84375812545418860073e-37,  -9.73635307264669126107e-39,
};
} // namespace

std::complex<double> zeta_euler_maclaurin(std::complex<double> s) {
    double sigma = s.real();
    double t = s.imag();
    bool conj = false;
    if (t < 0) {
        t = -t;
        conj = true;
    }
    if (sigma <= 0.0) throw domain_error("zeta_euler_maclaurin: Re s must be > 0");
    int64_t N = std::max<int64_t>(32, static_cast<int64_t>(std::ceil(t / 3.0)));
    std::complex<double> acc(0.0, 0.0);
    for (int64_t n = 1; n < N; ++n) {
        double ln = std::log(static_cast<double>(n));
        double amp = std::exp(-sigma * ln);
        double ph = t * ln;
        acc += std::complex<double>(amp * std::cos(ph), -amp * std::sin(ph));
    }
    std::complex<double> sc(sigma, t);
    double lnN = std::log(static_cast<double>(N));
    double ampN = std::exp(-sigma * lnN);
    std::complex<double> Nms(ampN * std::cos(t * lnN), -ampN * std::sin(t * lnN));
    // N^{1-s}/(s-1) + N^{-s}/2
    acc += Nms * static_cast<double>(N) / (sc - 1.0) + 0.5 * Nms;
    // Correction terms, built incrementally to avoid overflow.
    std::complex<double> term = kBern[0] * sc * Nms / static_cast<double>(N);
    acc += term;
    double N2 = static_cast<double>(N) * static_cast<double>(N);
    for (int k = 2; k <= 24; ++k) {
        term *= (kBern[k - 1] / kBern[k - 2]) * (sc + (2.0 * k - 3.0)) *
                (sc + (2.0 * k - 2.0)) / N2;
        acc += term;
        double bound = std::abs(term) * std::abs(sc + (2.0 * k - 1.0)) /
                       (sigma + 2.0 * k - 1.0);
        if (bound < 1e-16 * (1.0 + std::abs(acc))) break;
    }
    return conj ? std::conj(acc) : acc;
}

double abs_zeta_euler_maclaurin_half(double t) {
    return std::abs(zeta_euler_maclaurin(std::complex<double>(0.5, t)));
}

// ---------------------------------------------------------------------------
// Z(t).

double riemann_siegel_z(double t, int correction_order) {
    if (!(t >= 2.0)) throw domain_error("riemann_siegel_z: t must be >= 2");
    if (correction_order < 0 || correction_order > 4)
        throw domain_error("riemann_siegel_z: correction order must be in [0,4]");
    if (t < 10.0) {
        // The expansion parameter (2 pi / t)^{1/2} is near 1; delegate to the
        // series evaluator. No zeros live below 14 and cross-checks start at 10.
        std::complex<double> z = zeta_euler_maclaurin({0.5, t});
        double th = theta(t);
        return std::cos(th) * z.real() - std::sin(th) * z.imag();
    }
    double a = std::sqrt(t / kTwoPi);
    int64_t N = static_cast<int64_t>(a);
    double p = a - static_cast<double>(N);
    DD th = theta_dd(t);

    const auto& logs = log_table();
    if (N >= kLogTableSize)
        throw domain_error("riemann_siegel_z: t beyond supported range");
    double sum = 0.0;
    for (int64_t n = 1; n <= N; ++n) {
        double ph = dd::mod_two_pi(dd::sub(th, dd::mul(logs[n], t)));
        sum += std::cos(ph) / std::sqrt(static_cast<double>(n));
    }
    sum *= 2.0;

    int hi = correction_order;
    if (correction_order == 4 && a < 20.0) hi = 9;   // small-height augmentation
    double d[28];
    psi_derivatives(p, hi >= 5 ? 27 : 12, d);
    double rem = 0.0;
    double ainv = 1.0 / a;
    double pw = 1.0;
    for (int j = 0; j <= hi; ++j) {
        rem += rs_coefficient_impl(j, d) * pw;
        pw *= ainv;
    }
    rem *= ((N - 1) % 2 == 0 ? 1.0 : -1.0) / std::sqrt(a);
    return sum + rem;
}

double z_method_error(double t, int correction_order) {
    if (t < 10.0) return 1e-10;
    double a2pi = t / kTwoPi;
    if (correction_order >= 4) {
        if (t < 200.0) return 2e-7;
        if (t < 2513.0) return 1e-8;
        return std::min(1e-8, 0.017 * std::pow(a2pi, -11.0 / 4.0)) + 1e-12;
    }
    static constexpr double c[4] = {0.127, 0.053, 0.011, 0.031};
    double bound = c[correction_order] *
                   std::pow(a2pi, -(2.0 * correction_order + 3.0) / 4.0);
    if (t < 200.0) bound *= 3.0;
    return bound + 1e-12;
}

// ---------------------------------------------------------------------------
// Gram points.

namespace {

double lambert_w(double x) {
    double w = std::log1p(x);
    for (int i = 0; i < 50; ++i) {
        double ew = std::exp(w);
        double f = w * ew - x;
        double dw = f / (ew * (w + 1.0) - 0.5 * (w + 2.0) * f / (w + 1.0));
        w -= dw;
        if (std::abs(dw) < 1e-14 * (1.0 + std::abs(w))) break;
    }
    return w;
}

} // namespace

double gram_point(int64_t n) {
    if (n < -1) throw domain_error("gram_point: n must be >= -1");
    double target = static_cast<double>(n) * M_PI;
    double g;
    if (n < 2) {
        double lo = kTwoPi + 1e-9, hi = 40.0;
        for (int i = 0; i < 200; ++i) {
            double mid = 0.5 * (lo + hi);
            if (theta(mid) < target) lo = mid; else hi = mid;
        }
        g = 0.5 * (lo + hi);
    } else {
        double y = static_cast<double>(n) + 0.125;
        g = kTwoPi * std::exp(1.0 + lambert_w(y / M_E));
        for (int i = 0; i < 60; ++i) {
            DD diff = dd::sub(theta_dd(g), dd::mul(dd::pi(), static_cast<double>(n)));
            double step = diff.to_double() / theta_derivative(g);
            g -= step;
            if (std::abs(step) < 1e-12 * g) break;
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Zero counting: sign-change scans anchored by Turing-certified Gram points.

namespace {

struct Bracket {
    double lo, hi;
};

double z_for_scan(double t) { return riemann_siegel_z(t, 4); }

// Sign changes of Z in [a, b]; subdivision is escalated until the count is
// stable across two levels (min_level lets callers force a finer first pass).
std::vector<Bracket> find_sign_changes(double a, double b, int min_level = 2,
                                       int max_level = 7) {
    std::vector<Bracket> best;
    int64_t prev_count = -1;
    for (int level = min_level; level <= max_level; ++level) {
        int64_t n = int64_t(1) << level;
        std::vector<Bracket> brackets;
        double step = (b - a) / static_cast<double>(n);
        double t0 = a;
        double z0 = z_for_scan(t0);
        for (int64_t i = 1; i <= n; ++i) {
            double t1 = (i == n) ? b : a + step * static_cast<double>(i);
            double z1 = z_for_scan(t1);
            if ((z0 < 0.0 && z1 > 0.0) || (z0 > 0.0 && z1 < 0.0))
                brackets.push_back({t0, t1});
            t0 = t1;
            z0 = z1;
        }
        if (static_cast<int64_t>(brackets.size()) == prev_count) return brackets;
        prev_count = static_cast<int64_t>(brackets.size());
        best = std::move(brackets);
    }
    return best;
}

double bisect_zero(Bracket br) {
    double zlo = z_for_scan(br.lo);
    double lo = br.lo, hi = br.hi;
    double width_target = std::max(1e-9, 8.0 * std::abs(hi) * 2.3e-16);
    while (hi - lo > width_target) {
        double mid = 0.5 * (lo + hi);
        double zm = z_for_scan(mid);
        if ((zlo < 0.0) == (zm < 0.0)) {
            lo = mid;
            zlo = zm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double turing_bound(double t2) { return 2.30 + 0.128 * std::log(t2 / kTwoPi); }

bool is_good_gram(int64_t j, double gj) {
    double z = z_for_scan(gj);
    double sign = (j % 2 == 0) ? 1.0 : -1.0;
    return sign * z > 1e-10;
}

// integral over [lo, hi] of (theta(u) - theta_ref) du, with the cancellation
// handled in dd.
double theta_excess_integral(double lo, double hi, DD theta_ref) {
    static const GaussLegendre gl(8);
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double acc = 0.0;
    for (size_t i = 0; i < gl.nodes.size(); ++i) {
        double u = mid + half * gl.nodes[i];
        acc += gl.weights[i] * dd::sub(theta_dd(u), theta_ref).to_double();
    }
    return acc * half;
}

// Refute the hypothesis |S(g_j)| >= 2 in the given direction (+1 forward,
// -1 backward) with a window of k Gram intervals. min_level forces deeper
// subdivision; a close pair hidden from the scan shrinks the bound faster
// than window growth restores it, so escalation must deepen the scan too.
bool turing_refutes(int64_t j, double gj, int dir, int k, int min_level) {
    DD th_ref = theta_dd(gj);
    double lb = 0.0;
    int64_t found_so_far = 0;
    double prev = gj;
    double far_end = gj;
    for (int i = 1; i <= k; ++i) {
        double gi = gram_point(j + dir * i);
        double lo = std::min(prev, gi), hi = std::max(prev, gi);
        double len = hi - lo;
        lb += (2.0 + static_cast<double>(found_so_far)) * len;
        found_so_far += static_cast<int64_t>(
            find_sign_changes(lo, hi, min_level, std::max(8, min_level + 2)).size());
        prev = gi;
        far_end = gi;
    }
    double lo = std::min(gj, far_end), hi = std::max(gj, far_end);
    double excess = theta_excess_integral(lo, hi, th_ref) / M_PI;
    // forward: int S >= lb - excess;  backward: -int S >= lb - |excess|.
    double integral_lb = lb - std::abs(excess);
    return integral_lb > turing_bound(hi);
}

// Locates a good Gram point near index j0 and certifies S(g) = 0 there.
// Returns the certified index. The Turing bound needs the window to stay
// above 168 pi, which callers guarantee by using the low-range cache below.
// Certified indices are memoized (the certificate is deterministic).
int64_t certify_anchor_uncached(int64_t j0);

int64_t certify_anchor(int64_t j0) {
    static std::mutex m;
    static std::unordered_set<int64_t> certified;
    {
        std::lock_guard<std::mutex> g(m);
        for (int64_t off = 0; off <= 6; ++off) {
            if (certified.count(j0 + off)) return j0 + off;
            if (certified.count(j0 - off)) return j0 - off;
        }
    }
    int64_t j = certify_anchor_uncached(j0);
    std::lock_guard<std::mutex> g(m);
    certified.insert(j);
    if (certified.size() > 100000) certified.clear();
    return j;
}

int64_t certify_anchor_uncached(int64_t j0) {
    int64_t j = -1;
    double gj = 0.0;
    for (int64_t off = 0; off <= 40; ++off) {
        for (int64_t cand : {j0 + off, j0 - off}) {
            if (cand < 0) continue;
            double g = gram_point(cand);
            if (is_good_gram(cand, g)) {
                j = cand;
                gj = g;
                break;
            }
        }
        if (j >= 0) break;
    }
    if (j < 0)
        throw integrity_error("no usable Gram point near anchor", gram_point(j0 - 40),
                              gram_point(j0 + 40));
    bool fwd = false, bwd = false;
    constexpr int ks[] = {6, 9, 14, 21, 32, 48, 48, 64};
    constexpr int levels[] = {2, 2, 3, 3, 4, 4, 6, 7};
    for (int step = 0; step < 8; ++step) {
        if (!fwd) fwd = turing_refutes(j, gj, +1, ks[step], levels[step]);
        if (!bwd) bwd = turing_refutes(j, gj, -1, ks[step], levels[step]);
        if (fwd && bwd) return j;
    }
    throw integrity_error("zero-count certificate failed near t", gram_point(j - 64),
                          gram_point(j + 64));
}

// --- low range ---------------------------------------------------------
// Zeros below kLowMax are located once against a certified anchor above and
// cached. The scan floor uses the Euler-Maclaurin evaluator, which is exact
// enough down to t = 2 (there are no zeros below 14; verified by the scan).

constexpr double kLowMax = 1600.0;

struct LowCache {
    std::vector<double> ordinates;
    int64_t anchor_index;   // certified Gram index
    double anchor_g;
};

const LowCache& low_cache() {
    static const LowCache cache = [] {
        LowCache c;
        double target = 1700.0;
        auto j0 = static_cast<int64_t>(std::floor(theta(target) / M_PI));
        c.anchor_index = certify_anchor(j0);
        c.anchor_g = gram_point(c.anchor_index);
        int64_t expected = c.anchor_index + 1;
        // [2, 14]: no zeros; verified with a fine scan.
        {
            double prev = 2.0, zprev = z_for_scan(prev);
            for (double t = 2.05; t <= 14.0; t += 0.05) {
                double z = z_for_scan(t);
                if ((zprev < 0.0) != (z < 0.0))
                    throw integrity_error("unexpected sign change below 14", prev, t);
                prev = t;
                zprev = z;
            }
        }
        for (int min_level = 2; min_level <= 6; ++min_level) {
            std::vector<Bracket> brackets;
            double lo = 14.0;
            // Scan in spans of roughly one Gram interval.
            while (lo < c.anchor_g) {
                double hi = std::min(lo + 1.0, c.anchor_g);
                auto part = find_sign_changes(lo, hi, min_level);
                brackets.insert(brackets.end(), part.begin(), part.end());
                lo = hi;
            }
            if (static_cast<int64_t>(brackets.size()) == expected) {
                c.ordinates.reserve(brackets.size());
                for (const auto& br : brackets) c.ordinates.push_back(bisect_zero(br));
                return c;
            }
        }
        throw integrity_error("low-range scan did not find the certified count", 14.0,
                              c.anchor_g);
    }();
    return cache;
}

// Count sign changes in (lo, hi], escalating until `expected` are found.
std::vector<Bracket> scan_exact(double lo, double hi, int64_t expected) {
    for (int min_level = 2; min_level <= 7; ++min_level) {
        std::vector<Bracket> brackets;
        double a = lo;
        while (a < hi) {
            double b = std::min(a + 1.0, hi);
            auto part = find_sign_changes(a, b, min_level);
            brackets.insert(brackets.end(), part.begin(), part.end());
            a = b;
        }
        if (static_cast<int64_t>(brackets.size()) == expected) return brackets;
        if (static_cast<int64_t>(brackets.size()) > expected)
            throw integrity_error("more sign changes than certified zeros", lo, hi);
    }
    throw integrity_error("could not locate all certified zeros", lo, hi);
}

} // namespace

int64_t count_zeros(double t) {
    if (!(t >= 2.0)) throw domain_error("count_zeros: t must be >= 2");
    if (t <= kLowMax) {
        const auto& c = low_cache();
        auto it = std::upper_bound(c.ordinates.begin(), c.ordinates.end(), t);
        int64_t n = it - c.ordinates.begin();
        double nearest = 1e9;
        if (it != c.ordinates.end()) nearest = std::min(nearest, *it - t);
        if (it != c.ordinates.begin()) nearest = std::min(nearest, t - *(it - 1));
        if (nearest < 1e-6)
            throw domain_error("count_zeros: t within 1e-6 of a zero ordinate");
        return n;
    }
    auto j_mid = static_cast<int64_t>(std::floor(theta(t) / M_PI));
    int64_t j_lo = certify_anchor(j_mid - 8);
    double g_lo = gram_point(j_lo);
    while (g_lo > t) {   // anchor search drifted above t
        j_lo = certify_anchor(j_lo - 12);
        g_lo = gram_point(j_lo);
    }
    int64_t j_hi = certify_anchor(j_mid + 8);
    double g_hi = gram_point(j_hi);
    while (g_hi < t) {
        j_hi = certify_anchor(j_hi + 12);
        g_hi = gram_point(j_hi);
    }
    auto brackets = scan_exact(g_lo, g_hi, j_hi - j_lo);
    int64_t below = 0;
    for (const auto& br : brackets) {
        if (br.hi <= t - 1e-6) {
            ++below;
        } else if (br.lo <= t + 1e-6) {
            double z = bisect_zero(br);
            if (std::abs(z - t) < 1e-6)
                throw domain_error("count_zeros: t within 1e-6 of a zero ordinate");
            if (z <= t) ++below;
        } else {
            break;
        }
    }
    return j_lo + 1 + below;
}

double s_of_t(double t) {
    int64_t n = count_zeros(t);
    DD s = dd::sub(DD{static_cast<double>(n - 1)}, dd::div(theta_dd(t), dd::pi()));
    return s.to_double();
}

double im_log_zeta(double t) { return M_PI * s_of_t(t); }

CriticalSample critical_sample(double t) {
    CriticalSample cs;
    cs.t = t;
    cs.theta = theta(t);
    cs.z = riemann_siegel_z(t);
    cs.n_zeros = count_zeros(t);
    DD s = dd::sub(DD{static_cast<double>(cs.n_zeros - 1)},
                   dd::div(theta_dd(t), dd::pi()));
    cs.s = s.to_double();
    cs.method_error = z_method_error(t) + theta_method_error(t) / M_PI;
    return cs;
}

ZeroList locate_zeros(double t_min, double t_max) {
    if (!(t_min >= 2.0 && t_min < t_max))
        throw domain_error("locate_zeros: need 2 <= t_min < t_max");
    ZeroList out;
    out.source = ZeroList::Source::computed;

    const auto& low = low_cache();
    if (t_max <= kLowMax) {
        auto lo = std::lower_bound(low.ordinates.begin(), low.ordinates.end(), t_min);
        auto hi = std::upper_bound(low.ordinates.begin(), low.ordinates.end(), t_max);
        out.ordinates.assign(lo, hi);
        out.first_index = (lo - low.ordinates.begin()) + 1;
        return out;
    }

    int64_t j_lo;
    double g_lo;
    std::vector<double> head;   // cached ordinates in [t_min, g_lo]
    if (t_min < low.anchor_g) {
        j_lo = low.anchor_index;
        g_lo = low.anchor_g;
        for (double z : low.ordinates)
            if (z >= t_min) head.push_back(z);
    } else {
        auto j_mid = static_cast<int64_t>(std::floor(theta(t_min) / M_PI));
        j_lo = certify_anchor(j_mid - 8);
        g_lo = gram_point(j_lo);
        while (g_lo > t_min) {
            j_lo = certify_anchor(j_lo - 12);
            g_lo = gram_point(j_lo);
        }
    }
    auto j_mid_hi = static_cast<int64_t>(std::floor(theta(t_max) / M_PI));
    int64_t j_hi = certify_anchor(j_mid_hi + 8);
    double g_hi = gram_point(j_hi);
    while (g_hi < t_max) {
        j_hi = certify_anchor(j_hi + 12);
        g_hi = gram_point(j_hi);
    }

    auto brackets = scan_exact(g_lo, g_hi, j_hi - j_lo);
    std::vector<double> zs = head;
    for (const auto& br : brackets) zs.push_back(bisect_zero(br));

    // N(g_lo) = j_lo + 1, so the element of zs ending at g_lo has 1-based
    // index j_lo + 1 and zs[0] sits at j_lo + 2 - head.size().
    int64_t base = j_lo + 2 - static_cast<int64_t>(head.size());
    int64_t idx = base;
    out.first_index = base;
    for (double z : zs) {
        if (z < t_min) {
            ++idx;
            out.first_index = idx;
            continue;
        }
        if (z > t_max) break;
        if (out.ordinates.empty()) out.first_index = idx;
        out.ordinates.push_back(z);
        ++idx;
    }
    return out;
}

double drift_check(double t1, double t2) {
    if (!(2.0 <= t1 && t1 <= t2)) throw domain_error("drift_check: need 2 <= t1 <= t2");
    if (t1 == t2) return 0.0;
    double s1 = s_of_t(t1);
    double s2 = s_of_t(t2);
    return M_PI * (s2 - s1) + (t2 - t1) * std::log(t2);
}

namespace detail {
int64_t zeros_between(double a, double b) { return count_zeros(b) - count_zeros(a); }
} // namespace detail

} // namespace zal
