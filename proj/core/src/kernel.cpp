#include "zal/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zal/quadrature.hpp"

namespace zal {

const char* to_string(KernelFamily f) {
    switch (f) {
        case KernelFamily::smooth_bump_squared: return "smooth-bump-squared";
        case KernelFamily::fejer: return "fejer";
    }
    return "?";
}

KernelFamily kernel_family_from_string(const std::string& s) {
    if (s == "smooth-bump-squared" || s == "bump") return KernelFamily::smooth_bump_squared;
    if (s == "fejer") return KernelFamily::fejer;
    throw domain_error("unknown kernel family: " + s);
}

void KernelSpec::validate() const {
    if (!(support_halfwidth > 0.0))
        throw domain_error("kernel: support halfwidth must be positive");
    if (!(grid_step > 0.0))
        throw domain_error("kernel: grid step must be positive");
    if (!(truncation_tolerance > 0.0 && truncation_tolerance < 1.0))
        throw domain_error("kernel: truncation tolerance must be in (0,1)");
    if (family == KernelFamily::fejer && support_halfwidth != 1.0)
        throw domain_error("kernel: the fejer pair has support halfwidth 1 exactly");
}

namespace {

// The standard exponential bump on [-1, 1], scaled to [-half, half].
double bump(double u, double half) {
    double w = u / half;
    double d = 1.0 - w * w;
    if (d <= 0.0) return 0.0;
    return std::exp(-1.0 / d);
}

// (eta * eta)(lambda) for the bump of half-support `half`, by fixed-order
// Gauss-Legendre over the overlap interval.
double bump_self_convolution(double lambda, double half, const GaussLegendre& gl) {
    lambda = std::abs(lambda);
    double lo = lambda - half;
    double hi = half;
    if (lo >= hi) return 0.0;
    return gl.integrate(
        [&](double u) { return bump(u, half) * bump(lambda - u, half); }, lo, hi);
}

double fejer_phi(double x) {
    constexpr double inv_two_pi = 1.0 / (2.0 * M_PI);
    double u = 0.5 * x;
    if (std::abs(u) < 1e-6) {
        double u2 = u * u;
        double s = 1.0 - u2 / 6.0;   // sin(u)/u
        return inv_two_pi * s * s;
    }
    double s = std::sin(u) / u;
    return inv_two_pi * s * s;
}

uint64_t fnv1a(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ULL) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr double kFejerHorizon = 1e4;

} // namespace

Kernel Kernel::build(const KernelSpec& spec) {
    spec.validate();
    Kernel k;
    k.spec_ = spec;

    if (spec.family == KernelFamily::fejer) {
        k.rapid_decay_ = false;
        k.x_max_ = kFejerHorizon;
        // m = 1, 2 from the envelope phi(x) <= 2/(pi x^2), refined by scan.
        k.halfwidths_.assign(8, std::numeric_limits<double>::quiet_NaN());
        for (int m = 1; m <= 2; ++m) {
            double x = 0.5;
            auto ok_from = [&](double x0) {
                for (double x2 = x0; x2 <= 400.0; x2 += 0.01)
                    if (fejer_phi(x2) * std::pow(1.0 + x2, m) > 1.0) return false;
                // Beyond the scan, the envelope settles it.
                return (2.0 / M_PI) * std::pow(1.0 + 400.0, m) / (400.0 * 400.0) <= 1.0;
            };
            while (x < 400.0 && !ok_from(x)) x += 0.01;
            k.halfwidths_[m - 1] = x;
        }
        return k;
    }

    // smooth-bump-squared
    const double lambda = spec.support_halfwidth;
    const double half = 0.5 * lambda;
    const GaussLegendre gl_conv(96);

    // Normalization: phi_hat = (eta*eta)(lambda) / (eta*eta)(0), which makes
    // phi_hat(0) == 1 exactly, and phi = c psi^2 with c = 2 pi / (eta*eta)(0).
    const double conv0 = bump_self_convolution(0.0, half, gl_conv);
    if (!(conv0 > 0.0)) throw construction_error("kernel: bump normalization vanished");
    k.norm_c_ = 2.0 * M_PI / conv0;

    // Tabulate phi_hat on [0, lambda].
    const int nhat = 4096;
    k.phi_hat_step_ = lambda / nhat;
    k.phi_hat_table_.resize(nhat + 1);
    for (int i = 0; i <= nhat; ++i) {
        double v = bump_self_convolution(i * k.phi_hat_step_, half, gl_conv) / conv0;
        k.phi_hat_table_[i] = std::clamp(v, 0.0, 1.0);
    }
    k.phi_hat_table_[0] = 1.0;
    k.phi_hat_table_[nhat] = 0.0;

    // Tabulate psi(x) = (1/pi) int_0^half eta(u) cos(u x) du, extending the
    // table until the m = 8 decay criterion holds over a trailing stretch.
    // The Gauss order is sized to the largest phase half*x in the table.
    k.x_step_ = spec.grid_step;
    const double block = 32.0;
    const double x_cap = std::max(1024.0, 6000.0 / lambda);
    double x_end = block;
    std::vector<double> psi;
    auto tabulate_to = [&](double xe, int order) {
        GaussLegendre gl(order);
        std::vector<double> wu;  // weight * eta at mapped nodes
        std::vector<double> un;
        wu.reserve(gl.nodes.size());
        un.reserve(gl.nodes.size());
        for (size_t j = 0; j < gl.nodes.size(); ++j) {
            double u = 0.5 * half * (gl.nodes[j] + 1.0);
            un.push_back(u);
            wu.push_back(0.5 * half * gl.weights[j] * bump(u, half));
        }
        size_t n = static_cast<size_t>(std::floor(xe / k.x_step_)) + 1;
        psi.resize(n);
        for (size_t i = 0; i < n; ++i) {
            double x = i * k.x_step_;
            double acc = 0.0;
            for (size_t j = 0; j < un.size(); ++j) acc += wu[j] * std::cos(un[j] * x);
            psi[i] = acc / M_PI;
        }
    };

    auto decay_ok_from = [&](size_t i0, int m) {
        for (size_t i = i0; i < psi.size(); ++i) {
            double x = i * k.x_step_;
            double phi = k.norm_c_ * psi[i] * psi[i];
            if (phi * std::pow(1.0 + x, m) > 1.0) return false;
        }
        return true;
    };

    while (true) {
        int order = 64 + static_cast<int>(0.75 * half * x_end);
        tabulate_to(x_end, order);
        size_t tail_start = psi.size() > static_cast<size_t>(2.0 * block / k.x_step_)
                                ? psi.size() - static_cast<size_t>(2.0 * block / k.x_step_)
                                : 0;
        if (tail_start > 0 && decay_ok_from(tail_start, 8)) break;
        if (x_end >= x_cap)
            throw construction_error(
                "kernel: inverse transform tabulation did not reach the decay target");
        x_end += block;
    }
    k.psi_table_ = std::move(psi);
    k.x_max_ = (k.psi_table_.size() - 1) * k.x_step_;

    // Suffix masses of phi by trapezoid on the table grid.
    k.mass_above_.assign(k.psi_table_.size(), 0.0);
    for (size_t i = k.psi_table_.size() - 1; i-- > 0;) {
        double f0 = k.norm_c_ * k.psi_table_[i] * k.psi_table_[i];
        double f1 = k.norm_c_ * k.psi_table_[i + 1] * k.psi_table_[i + 1];
        k.mass_above_[i] = k.mass_above_[i + 1] + 0.5 * (f0 + f1) * k.x_step_;
    }

    // Tabulation convergence check against a refined rule on a subsample.
    {
        int order = 96 + static_cast<int>(1.1 * half * k.x_max_);
        GaussLegendre gl(order);
        double worst = 0.0;
        for (size_t i = 0; i < k.psi_table_.size(); i += std::max<size_t>(1, k.psi_table_.size() / 64)) {
            double x = i * k.x_step_;
            double ref = gl.integrate(
                             [&](double u) { return bump(u, half) * std::cos(u * x); }, 0.0,
                             half) /
                         M_PI;
            worst = std::max(worst, std::abs(ref - k.psi_table_[i]));
        }
        if (worst > spec.truncation_tolerance)
            throw construction_error(
                "kernel: inverse transform did not converge at the requested tolerance");
    }

    // Effective halfwidths for m = 1..8 from the table.
    k.halfwidths_.assign(8, std::numeric_limits<double>::quiet_NaN());
    for (int m = 1; m <= 8; ++m) {
        size_t i = k.psi_table_.size();
        while (i > 0) {
            double x = (i - 1) * k.x_step_;
            double phi = k.norm_c_ * k.psi_table_[i - 1] * k.psi_table_[i - 1];
            if (phi * std::pow(1.0 + x, m) > 1.0) break;
            --i;
        }
        k.halfwidths_[m - 1] = i * k.x_step_;
    }
    return k;
}

double Kernel::psi_interp(double x) const {
    // 4-point Lagrange cubic on the uniform table.
    double s = x / x_step_;
    size_t n = psi_table_.size();
    auto i1 = static_cast<ptrdiff_t>(std::floor(s));
    ptrdiff_t i0 = i1 - 1;
    if (i0 < 0) i0 = 0;
    if (i0 + 3 >= static_cast<ptrdiff_t>(n)) i0 = static_cast<ptrdiff_t>(n) - 4;
    double u = s - i0;
    const double* p = psi_table_.data() + i0;
    double c0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
    double c1 = u * (u - 2.0) * (u - 3.0) / 2.0;
    double c2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
    double c3 = u * (u - 1.0) * (u - 2.0) / 6.0;
    return c0 * p[0] + c1 * p[1] + c2 * p[2] + c3 * p[3];
}

double Kernel::phi(double x) const {
    x = std::abs(x);
    if (spec_.family == KernelFamily::fejer) return fejer_phi(x);
    if (x >= x_max_) return 0.0;
    double psi = psi_interp(x);
    return norm_c_ * psi * psi;
}

double Kernel::phi_hat_interp(double lambda) const {
    double s = lambda / phi_hat_step_;
    size_t n = phi_hat_table_.size();
    auto i1 = static_cast<ptrdiff_t>(std::floor(s));
    ptrdiff_t i0 = i1 - 1;
    if (i0 < 0) i0 = 0;
    if (i0 + 3 >= static_cast<ptrdiff_t>(n)) i0 = static_cast<ptrdiff_t>(n) - 4;
    double u = s - i0;
    const double* p = phi_hat_table_.data() + i0;
    double c0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
    double c1 = u * (u - 2.0) * (u - 3.0) / 2.0;
    double c2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
    double c3 = u * (u - 1.0) * (u - 2.0) / 6.0;
    return c0 * p[0] + c1 * p[1] + c2 * p[2] + c3 * p[3];
}

double Kernel::phi_hat(double lambda) const {
    lambda = std::abs(lambda);
    if (lambda > spec_.support_halfwidth) return 0.0;
    if (spec_.family == KernelFamily::fejer) return std::max(0.0, 1.0 - lambda);
    if (lambda == 0.0) return 1.0;
    return std::clamp(phi_hat_interp(lambda), 0.0, 1.0);
}

double Kernel::effective_halfwidth(int m) const {
    if (m < 1 || m > 8) throw domain_error("effective_halfwidth: m must be in [1,8]");
    double v = halfwidths_[m - 1];
    if (std::isnan(v))
        throw domain_error(std::string("effective_halfwidth: kernel '") +
                           to_string(spec_.family) + "' does not decay at power " +
                           std::to_string(m));
    return v;
}

double Kernel::mass_above(double x) const {
    x = std::abs(x);
    if (spec_.family == KernelFamily::fejer) {
        // phi <= 2/(pi s^2): envelope integral
        if (x < 1.0) return 1.0;
        return 2.0 / (M_PI * x);
    }
    if (x >= x_max_) return 0.0;
    double s = x / x_step_;
    auto i = static_cast<size_t>(s);
    if (i + 1 >= mass_above_.size()) return 0.0;
    double frac = s - static_cast<double>(i);
    return mass_above_[i] * (1.0 - frac) + mass_above_[i + 1] * frac;
}

double Kernel::tail_mass(double a, double tol) const {
    if (!(a > 0.0)) throw domain_error("tail_mass: a must be positive");
    auto weighted = [this](double s) { return (1.0 + std::abs(s)) * phi(s); };
    if (spec_.family == KernelFamily::fejer) {
        // (1+|s|) phi(s) ~ 2/(pi |s|): the integral diverges, so any finite
        // tolerance is unreachable; the default returns the horizon truncation.
        if (std::isfinite(tol)) {
            throw numeric_error("tail_mass: fejer weighted tail integral diverges",
                                std::numeric_limits<double>::infinity());
        }
        if (a >= kFejerHorizon) return 0.0;
        QuadResult q = integrate_adaptive([&](double s) { return weighted(-s); }, a,
                                          kFejerHorizon, 1e-10);
        return q.value;
    }
    if (a >= x_max_) return 0.0;
    double eff_tol = std::isfinite(tol) ? tol : 1e-12;
    QuadResult q = integrate_adaptive([&](double s) { return weighted(-s); }, a, x_max_,
                                      eff_tol);
    return q.value;
}

uint64_t Kernel::table_checksum() const {
    uint64_t h = fnv1a(psi_table_.data(), psi_table_.size() * sizeof(double));
    h = fnv1a(phi_hat_table_.data(), phi_hat_table_.size() * sizeof(double), h);
    h = fnv1a(&norm_c_, sizeof(norm_c_), h);
    return h;
}

nlohmann::json Kernel::describe() const {
    nlohmann::json j;
    j["family"] = to_string(spec_.family);
    j["support_halfwidth"] = spec_.support_halfwidth;
    j["grid_step"] = spec_.grid_step;
    j["truncation_tolerance"] = spec_.truncation_tolerance;
    j["rapid_decay"] = rapid_decay_;
    j["table_end"] = x_max_;
    j["table_checksum"] = table_checksum();
    return j;
}

} // namespace zal
