#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "zal/errors.hpp"

namespace zal {

enum class KernelFamily { smooth_bump_squared, fejer };

const char* to_string(KernelFamily f);
KernelFamily kernel_family_from_string(const std::string& s);

struct KernelSpec {
    KernelFamily family = KernelFamily::smooth_bump_squared;
    double support_halfwidth = 2.0;   // phi_hat vanishes for |lambda| > this
    double grid_step = 1.0 / 128.0;   // tabulation resolution for phi
    double truncation_tolerance = 1e-9;

    void validate() const;
};

// A test function phi: real, nonnegative, even, with phi_hat supported in
// [-lambda, lambda], taking values in [0, 1] and phi_hat(0) = 1, under the
// convention phi_hat(lambda) = integral phi(x) exp(-i lambda x) dx.
//
// smooth_bump_squared realizes phi = c * psi^2 where psi is the inverse
// transform of the standard C-infinity exponential bump on
// [-lambda/2, lambda/2]; psi is tabulated and cubic-interpolated, and phi is
// identically 0 beyond the table (the truncation is inside every tolerance
// budget downstream). fejer is the closed-form pair
// phi(x) = (1/2pi) (sin(x/2)/(x/2))^2, phi_hat = max(0, 1 - |lambda|); it
// decays only like x^-2, so anything needing rapid decay must check
// rapid_decay() first.
class Kernel {
public:
    static Kernel build(const KernelSpec& spec);

    const KernelSpec& spec() const { return spec_; }
    double support() const { return spec_.support_halfwidth; }
    bool rapid_decay() const { return rapid_decay_; }

    double phi(double x) const;
    double phi_hat(double lambda) const;

    // Smallest X in the table such that phi(x) <= (1+|x|)^-m for |x| >= X.
    // m in [1, 8]; for the fejer kernel only m <= 2 exists.
    double effective_halfwidth(int m) const;

    // integral over (-inf, -a] of (1+|s|) phi(s) ds.  For the bump family the
    // realized phi vanishes beyond the table and the integral is finite; for
    // fejer the true integral diverges, so a finite tol raises numeric_error
    // and the default (tol = inf) returns the documented-horizon truncation.
    double tail_mass(double a,
                     double tol = std::numeric_limits<double>::infinity()) const;

    // End of the phi tabulation (phi == 0 beyond it). For fejer this is the
    // documented tail_mass horizon.
    double table_end() const { return x_max_; }

    // integral of phi over [x, infinity) for the realized kernel (an upper
    // envelope for fejer); cheap, from a prefix table.
    double mass_above(double x) const;

    uint64_t table_checksum() const;
    nlohmann::json describe() const;

private:
    Kernel() = default;

    double psi_interp(double x) const;
    double phi_hat_interp(double lambda) const;

    KernelSpec spec_;
    bool rapid_decay_ = true;
    double norm_c_ = 1.0;           // phi = norm_c * psi^2
    double x_step_ = 0.0;
    double x_max_ = 0.0;
    std::vector<double> psi_table_;      // psi on 0, step, 2*step, ...
    std::vector<double> mass_above_;     // suffix trapezoid masses of phi
    std::vector<double> phi_hat_table_;  // phi_hat on [0, lambda], uniform
    double phi_hat_step_ = 0.0;
    std::vector<double> halfwidths_;     // effective_halfwidth(m), m = 1..8
};

inline Kernel build_kernel(const KernelSpec& spec) { return Kernel::build(spec); }

} // namespace zal
