#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "zal/ddouble.hpp"
#include "zal/errors.hpp"

namespace zal {

// One evaluation point on the critical line. s == n_zeros - 1 - theta/pi
// holds exactly by construction (right-continuous branch at the jumps).
struct CriticalSample {
    double t = 0.0;
    double theta = 0.0;
    double z = 0.0;
    int64_t n_zeros = 0;
    double s = 0.0;
    double method_error = 0.0;
};

struct ZeroList {
    enum class Source { computed, reference_table };
    std::vector<double> ordinates;   // ascending
    int64_t first_index = 1;         // 1-based index of ordinates.front()
    Source source = Source::computed;
};

// Riemann-Siegel theta, asymptotic series with remainder tracked separately.
// Domain t >= 2 (the series is unreliable below).
double theta(double t);
DD theta_dd(double t);
double theta_method_error(double t);
double theta_derivative(double t);

// Z(t) = exp(i theta(t)) zeta(1/2 + it), real-valued. correction_order selects
// how many remainder coefficients beyond C0 are applied (0..4); at order 4 the
// evaluator also applies three higher-order terms at small heights, where the
// truncated expansion alone is not accurate enough. Phases are accumulated in
// double-double. Below t = 10 the value is delegated to the Euler-Maclaurin
// evaluator (the expansion parameter is ~1 there); everything the
// cross-checks compare is t >= 10.
double riemann_siegel_z(double t, int correction_order = 4);

// Remainder bound estimate for riemann_siegel_z at the given order.
double z_method_error(double t, int correction_order = 4);

// Independent oracle path: complex zeta by Euler-Maclaurin summation.
// Never used by the Riemann-Siegel production path.
std::complex<double> zeta_euler_maclaurin(std::complex<double> s);
double abs_zeta_euler_maclaurin_half(double t);

// Gram point g_n: theta(g_n) = n pi, n >= -1.
double gram_point(int64_t n);

// Exact zero count N(t), certified by Gram scanning plus Turing-method
// completeness windows. Raises integrity_error when certification fails and
// domain_error when t is within 1e-6 of an ordinate.
int64_t count_zeros(double t);

// S(t) = N(t) - 1 - theta(t)/pi and pi*S(t).
double s_of_t(double t);
double im_log_zeta(double t);

CriticalSample critical_sample(double t);

// All ordinates in [t_min, t_max], bracketed to width max(1e-9, 8 ulp) and
// certified complete against counts at both ends.
ZeroList locate_zeros(double t_min, double t_max);

// Slack of the downward-drift inequality:
//   pi S(t2) - pi S(t1) + (t2 - t1) log(t2),
// which is bounded below by an absolute constant.
double drift_check(double t1, double t2);

namespace detail {
// Riemann-Siegel remainder coefficient C_j(p); exposed for tests.
double rs_coefficient(int j, double p);
double psi_derivative_probe(double p, int j);
// Sign-change certified count of zeros in (a, b], used by tests.
int64_t zeros_between(double a, double b);
}

} // namespace zal
