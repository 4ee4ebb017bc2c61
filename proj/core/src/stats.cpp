#include "zal/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zal/averaging.hpp"
#include "zal/errors.hpp"
#include "zal/parallel.hpp"
#include "zal/rng.hpp"
#include "zal/rszeta.hpp"

namespace zal {

SampleSet draw_samples(double T, int64_t n, uint64_t seed, SampleMode mode,
                       const Kernel* kernel, double h, unsigned threads) {
    if (!(T >= 1e3)) throw domain_error("draw_samples: T must be >= 1e3");
    if (n < 0) throw domain_error("draw_samples: n must be >= 0");
    if (mode == SampleMode::averaged && (kernel == nullptr || !(h > 0.0)))
        throw domain_error("draw_samples: averaged mode needs a kernel and h > 0");
    SampleSet out;
    out.T = T;
    out.n = n;
    out.seed = seed;
    out.mode = mode;
    out.h = h;
    out.values.assign(static_cast<size_t>(n), std::numeric_limits<double>::quiet_NaN());
    if (mode == SampleMode::raw)
        out.z_abs.assign(static_cast<size_t>(n),
                         std::numeric_limits<double>::quiet_NaN());
    std::vector<uint8_t> skip(static_cast<size_t>(n), 0);

    parallel_for(
        static_cast<size_t>(n),
        [&](size_t i) {
            double t = T * rng::uniform01(seed, i);
            try {
                if (mode == SampleMode::raw) {
                    out.values[i] = im_log_zeta(t);
                    out.z_abs[i] = std::abs(riemann_siegel_z(t));
                } else {
                    out.values[i] = averaged_im_log_zeta(t, h, *kernel, 1e-4).value;
                }
            } catch (const domain_error&) {
                skip[i] = 1;
            } catch (const integrity_error&) {
                skip[i] = 1;
            }
        },
        threads);

    for (size_t i = 0; i < skip.size(); ++i)
        if (skip[i]) out.skipped.push_back(static_cast<int64_t>(i));
    return out;
}

std::pair<double, double> wilson_interval(int64_t hits, int64_t n) {
    if (n <= 0) throw domain_error("wilson_interval: n must be positive");
    const double z = 1.959963984540054;   // 97.5% normal quantile
    double nn = static_cast<double>(n);
    double p = static_cast<double>(hits) / nn;
    double z2 = z * z;
    double denom = 1.0 + z2 / nn;
    double center = (p + z2 / (2.0 * nn)) / denom;
    double rad = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, center - rad), std::min(1.0, center + rad)};
}

TailCurve tail_probability(const SampleSet& samples,
                           const std::vector<double>& v_grid) {
    std::vector<double> mags;
    mags.reserve(samples.values.size());
    for (double v : samples.values)
        if (!std::isnan(v)) mags.push_back(std::abs(v));
    if (mags.empty()) throw domain_error("tail_probability: no usable samples");
    std::sort(mags.begin(), mags.end());
    auto n = static_cast<int64_t>(mags.size());

    TailCurve out;
    out.v_grid = v_grid;
    for (double V : v_grid) {
        auto it = std::lower_bound(mags.begin(), mags.end(), V);
        int64_t hits = n - (it - mags.begin());
        out.p_hat.push_back(static_cast<double>(hits) / static_cast<double>(n));
        auto [lo, hi] = wilson_interval(hits, n);
        out.ci_lo.push_back(lo);
        out.ci_hi.push_back(hi);
    }
    return out;
}

MomentEstimate exp_moment(const SampleSet& samples, double k) {
    std::vector<double> vals;
    vals.reserve(samples.values.size());
    for (double v : samples.values)
        if (!std::isnan(v)) vals.push_back(v);
    if (vals.empty()) throw domain_error("exp_moment: no usable samples");

    MomentEstimate out;
    out.k = k;
    auto n = static_cast<int64_t>(vals.size());

    // log-sum-exp mean of exp(2k v)
    double m = -std::numeric_limits<double>::infinity();
    for (double v : vals) m = std::max(m, 2.0 * k * v);
    std::vector<double> es(vals.size());
    for (size_t i = 0; i < vals.size(); ++i) es[i] = std::exp(2.0 * k * vals[i] - m);
    double mean_shift = pairwise_sum(es) / static_cast<double>(n);
    out.nu_hat = std::exp(m) * mean_shift;
    if (k == 0.0) out.nu_hat = 1.0;

    // Jackknife over up to 100 contiguous blocks.
    int64_t blocks = std::min<int64_t>(100, n);
    if (blocks >= 2) {
        double total = pairwise_sum(es);
        std::vector<double> theta(static_cast<size_t>(blocks));
        int64_t base = n / blocks;
        int64_t rem = n % blocks;
        int64_t pos = 0;
        for (int64_t b = 0; b < blocks; ++b) {
            int64_t len = base + (b < rem ? 1 : 0);
            double block_sum = pairwise_sum(es.data() + pos, static_cast<size_t>(len));
            theta[b] = std::exp(m) * (total - block_sum) /
                       static_cast<double>(n - len);
            pos += len;
        }
        double tbar = pairwise_sum(theta) / static_cast<double>(blocks);
        double acc = 0.0;
        for (double th : theta) acc += (th - tbar) * (th - tbar);
        out.stderr_est =
            std::sqrt(acc * static_cast<double>(blocks - 1) / static_cast<double>(blocks));
        if (k == 0.0) out.stderr_est = 0.0;
    }

    if (samples.mode == SampleMode::raw && !samples.z_abs.empty()) {
        std::vector<double> zs;
        zs.reserve(samples.z_abs.size());
        for (double z : samples.z_abs)
            if (!std::isnan(z)) zs.push_back(std::pow(z * z, k));
        if (!zs.empty()) out.mu_hat = pairwise_sum(zs) / static_cast<double>(zs.size());
    }
    return out;
}

std::pair<double, double> gaussian_tail_reference(double V, double T, double eps,
                                                  double c_eps) {
    if (!(T > std::exp(std::exp(1.0))))
        throw domain_error("gaussian_tail_reference: T must exceed e^e");
    if (!(V > 1.0)) throw domain_error("gaussian_tail_reference: V must be > 1");
    if (!(eps > 0.0 && eps < 1.0))
        throw domain_error("gaussian_tail_reference: eps must be in (0,1)");
    double loglogT = std::log(std::log(T));
    double lll = std::log(loglogT);
    double term1 = std::exp(lll * lll * lll - (1.0 - eps) * V * V / loglogT);
    double term2 = std::exp(-c_eps * V * std::log(V));
    return {term1, term2};
}

AuditReport union_bound_audit(double T, double V, double eps, double K,
                              const Kernel& kernel, int64_t n, uint64_t seed,
                              unsigned threads) {
    if (!(K < V && V < std::log(T)))
        throw domain_error("union_bound_audit: need K < V < log T");
    if (!(eps > 0.0 && eps < 0.5))
        throw domain_error("union_bound_audit: eps must be in (0, 1/2)");
    double logT = std::log(T);
    double loglogT = std::log(logT);
    double H = K * logT / V;
    int p = 0;
    while (std::ldexp(V, p) < logT) ++p;   // first p with 2^p V >= log T

    // Shared draws: one height per index, used by the left side and by every
    // cascade level.
    std::vector<double> pis(static_cast<size_t>(n),
                            std::numeric_limits<double>::quiet_NaN());
    std::vector<std::vector<double>> ivals(
        static_cast<size_t>(p),
        std::vector<double>(static_cast<size_t>(n),
                            std::numeric_limits<double>::quiet_NaN()));
    parallel_for(
        static_cast<size_t>(n),
        [&](size_t i) {
            double t = T * rng::uniform01(seed, i);
            try {
                pis[i] = im_log_zeta(t);
            } catch (const error&) {
                return;
            }
            for (int r = 0; r < p; ++r) {
                try {
                    ivals[r][i] =
                        averaged_im_log_zeta(t, std::ldexp(H, -r), kernel, 1e-4).value;
                } catch (const error&) {
                }
            }
        },
        threads);

    int64_t usable = 0, lhs_hits = 0;
    for (double v : pis)
        if (!std::isnan(v)) {
            ++usable;
            if (std::abs(v) >= V) ++lhs_hits;
        }
    if (usable == 0) throw domain_error("union_bound_audit: no usable samples");
    auto [lhs_lo, lhs_hi] = wilson_interval(lhs_hits, usable);
    double lhs = static_cast<double>(lhs_hits) / static_cast<double>(usable);

    double rhs = 0.0, rhs_lo = 0.0, rhs_hi = 0.0;
    AuditReport rep;
    rep.name = "union-bound-audit";
    for (int r = 0; r < p; ++r) {
        double thr = (1.0 - eps) * std::ldexp(V, r);
        int64_t u = 0, hits = 0;
        for (double v : ivals[r])
            if (!std::isnan(v)) {
                ++u;
                if (std::abs(v) >= thr) ++hits;
            }
        double weight = std::pow(1.0 + loglogT, r);
        double ph = u > 0 ? static_cast<double>(hits) / static_cast<double>(u) : 0.0;
        auto [lo, hi] = u > 0 ? wilson_interval(hits, u) : std::pair<double, double>{0, 1};
        rhs += weight * ph;
        rhs_lo += weight * lo;
        rhs_hi += weight * hi;
        rep.statistics["rhs_term_" + std::to_string(r)] = weight * ph;
    }

    rep.params = {{"T", T}, {"V", V},           {"eps", eps},
                  {"K", K}, {"H", H},           {"p", static_cast<double>(p)},
                  {"n", static_cast<double>(n)}};
    rep.seed = seed;
    rep.statistics["lhs"] = lhs;
    rep.statistics["lhs_lo"] = lhs_lo;
    rep.statistics["lhs_hi"] = lhs_hi;
    rep.statistics["rhs"] = rhs;
    rep.statistics["rhs_lo"] = rhs_lo;
    rep.statistics["rhs_hi"] = rhs_hi;
    rep.statistics["usable"] = static_cast<double>(usable);

    if (lhs_hi <= rhs_lo) {
        rep.verdict = Verdict::pass;
    } else if (lhs_lo > rhs_hi) {
        rep.verdict = Verdict::fail;
    } else {
        rep.verdict = Verdict::inconclusive;
        rep.note = "confidence intervals overlap the decision boundary";
    }
    return rep;
}

MomentScan moment_growth_scan(double k, const std::vector<double>& T_grid, int64_t n,
                              uint64_t seed, unsigned threads) {
    if (!std::is_sorted(T_grid.begin(), T_grid.end()))
        throw domain_error("moment_growth_scan: T grid must be ascending");
    MomentScan out;
    for (size_t i = 0; i < T_grid.size(); ++i) {
        SampleSet s = draw_samples(T_grid[i], n, seed + i, SampleMode::raw, nullptr,
                                   0.0, threads);
        MomentEstimate m = exp_moment(s, k);
        out.rows.push_back({std::log(T_grid[i]), k, m.nu_hat, m.stderr_est});
    }
    // least squares slope of log(nu) on log log T
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    auto m = static_cast<double>(out.rows.size());
    for (const auto& r : out.rows) {
        double x = std::log(r.logT);
        double y = r.nu_hat > 0 ? std::log(r.nu_hat) : 0.0;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double denom = m * sxx - sx * sx;
    out.slope = denom != 0.0 ? (m * sxy - sx * sy) / denom : 0.0;
    return out;
}

double reconstruct_exp_moment(const SampleSet& samples, double k, double grid_step) {
    if (k == 0.0) return 1.0;
    std::vector<double> vals;
    for (double v : samples.values)
        if (!std::isnan(v)) vals.push_back(v);
    if (vals.empty()) throw domain_error("reconstruct_exp_moment: no usable samples");
    if (k < 0.0) {   // E[e^{2kX}] = E[e^{2|k|(-X)}]
        for (double& v : vals) v = -v;
        k = -k;
    }
    auto n = static_cast<double>(vals.size());
    double vmax = 0.0;
    for (double v : vals) vmax = std::max(vmax, std::abs(v));
    vmax += 2.0 * grid_step;

    // survivor counts of X and -X on the grid
    std::vector<double> up = vals, down;
    down.reserve(vals.size());
    for (double v : vals) down.push_back(-v);
    std::sort(up.begin(), up.end());
    std::sort(down.begin(), down.end());
    auto survivor = [&](const std::vector<double>& sorted, double V) {
        auto it = std::lower_bound(sorted.begin(), sorted.end(), V);
        return static_cast<double>(sorted.end() - it) / n;
    };

    // E[e^{2kX}] = 1 + int_0^inf 2k e^{2kV} P[X >= V] dV
    //               - int_0^inf 2k e^{-2kV} P[-X >= V] dV,
    // with the survivor functions frozen to their left-grid-point values.
    double acc = 1.0;
    for (double v = 0.0; v < vmax; v += grid_step) {
        double v2 = v + grid_step;
        acc += survivor(up, v) * (std::exp(2.0 * k * v2) - std::exp(2.0 * k * v));
        acc += survivor(down, v) * (std::exp(-2.0 * k * v2) - std::exp(-2.0 * k * v));
    }
    return acc;
}

} // namespace zal
