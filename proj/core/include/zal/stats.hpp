#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "zal/audit.hpp"
#include "zal/kernel.hpp"

namespace zal {

enum class SampleMode { raw, averaged };

// Monte Carlo draws of pi S(u_i T) (raw) or I(u_i T, h) (averaged) for
// u_i uniform in [0,1). Sample i depends only on (seed, i), so serial and
// parallel runs agree bit-for-bit. Samples whose height falls outside the
// evaluable domain are recorded in skipped, never silently dropped.
struct SampleSet {
    double T = 0.0;
    int64_t n = 0;
    uint64_t seed = 0;
    SampleMode mode = SampleMode::raw;
    double h = 0.0;                    // averaging scale for mode == averaged
    std::vector<double> values;        // NaN at skipped indices
    std::vector<double> z_abs;         // |Z| companions (raw mode only)
    std::vector<int64_t> skipped;
};

SampleSet draw_samples(double T, int64_t n, uint64_t seed, SampleMode mode,
                       const Kernel* kernel = nullptr, double h = 0.0,
                       unsigned threads = 0);

struct TailCurve {
    std::vector<double> v_grid;
    std::vector<double> p_hat;   // P[|value| >= V]
    std::vector<double> ci_lo;   // 95% Wilson
    std::vector<double> ci_hi;
};

TailCurve tail_probability(const SampleSet& samples, const std::vector<double>& v_grid);

// 95% Wilson score interval for hits successes out of n.
std::pair<double, double> wilson_interval(int64_t hits, int64_t n);

struct MomentEstimate {
    double k = 0.0;
    double nu_hat = 0.0;    // E[exp(2k value)]
    double stderr_est = 0.0; // jackknife over 100 blocks
    std::optional<double> mu_hat;   // E[|Z|^{2k}] companion, raw mode
};

MomentEstimate exp_moment(const SampleSet& samples, double k);

// The two reference tail terms
//   exp((log log log T)^3 - (1-eps) V^2 / log log T)  and  exp(-c V log V).
// Requires T > e^e (so log log log T is defined) and V > 1.
std::pair<double, double> gaussian_tail_reference(double V, double T, double eps,
                                                  double c_eps = 0.1);

// Empirical check of the cascade inequality
//   P[|pi S(UT)| >= V] <= sum_{r=0}^{p-1} (1+log log T)^r
//                                P[|I(UT, 2^{-r} H)| >= (1-eps) 2^r V]
// with H = K log T / V and p the first integer with 2^p V >= log T.
AuditReport union_bound_audit(double T, double V, double eps, double K,
                              const Kernel& kernel, int64_t n, uint64_t seed,
                              unsigned threads = 0);

struct MomentScanRow {
    double logT = 0.0;
    double k = 0.0;
    double nu_hat = 0.0;
    double stderr_est = 0.0;
};

struct MomentScan {
    std::vector<MomentScanRow> rows;
    double slope = 0.0;   // least squares of log nu_hat against log log T
};

MomentScan moment_growth_scan(double k, const std::vector<double>& T_grid, int64_t n,
                              uint64_t seed, unsigned threads = 0);

// Reconstructs E[exp(2k X)] by integrating gridded empirical survivor
// functions of X and -X against 2k e^{+-2kV} dV (the V <= 0 part contributes
// the mass term). Mirrors the tail-integral route to the exponential moment.
double reconstruct_exp_moment(const SampleSet& samples, double k,
                              double grid_step = 0.01);

} // namespace zal
