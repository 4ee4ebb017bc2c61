#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "zal/audit.hpp"
#include "zal/kernel.hpp"

namespace zal {

struct AveragedSample {
    double tau = 0.0;
    double h = 0.0;        // averaging scale H
    double value = 0.0;    // I(tau, H)
    double quad_error = 0.0;
    double window_lo = 0.0;   // height window actually integrated
    double window_hi = 0.0;
};

// I(tau, H) = integral of pi S(tau + t/H) phi(t) dt. The integral is split
// exactly at every zero ordinate inside the window (S jumps there) and the
// smooth pieces are integrated adaptively; the infinite tails are truncated
// where the kernel tail mass, weighted by the growth bound
// |pi S| <= growth_c * log(2 + height), drops below tol.
AveragedSample averaged_im_log_zeta(double tau, double h, const Kernel& kernel,
                                    double tol = 1e-6, double growth_c = 5.0);

// Same quadrature machinery applied to an arbitrary height function; test
// mode for linearity/constant checks (no jump splitting).
AveragedSample averaged_function(const std::function<double(double)>& f, double tau,
                                 double h, const Kernel& kernel, double tol = 1e-6);

struct IterationEventParams {
    double T = 1e6;
    double V = 4.0;
    double eps = 0.25;       // in (0, 1/2)
    double K = 8.0;          // > 1; H = K * log(T) / V
    double a = 2.0;          // > 0 kernel shift
    int64_t n_samples = 1000;
    uint64_t seed = 1;
};

// Draws tau uniform in [sqrt(T), T]; among samples satisfying the premises
//   pi S(tau) >= V   and   pi S(tau - e^r/H) >= -2V for r = 0..floor(log log T)
// checks the conclusion I(tau + a/H, H) >= (1-eps) V, plus the mirrored
// negative variant. Zero premise hits make the report inconclusive.
AuditReport iteration_event_check(const IterationEventParams& params,
                                  const Kernel& kernel, unsigned threads = 0);

struct CalibrationResult {
    double a = 0.0;
    double K = 0.0;
    bool found = false;
    AuditReport selected;
    std::vector<AuditReport> grid;
};

// Sweep (a, K) over {1,2,4,...,64}^2 and pick the smallest pair (by a+K,
// then K) with at least one premise hit and zero counterexamples.
CalibrationResult calibrate_iteration_constants(double T, double V, double eps,
                                                int64_t n_samples, uint64_t seed,
                                                const Kernel& kernel,
                                                unsigned threads = 0);

} // namespace zal
