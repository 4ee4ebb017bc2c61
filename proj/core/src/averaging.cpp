#include "zal/averaging.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "zal/ddouble.hpp"
#include "zal/parallel.hpp"
#include "zal/quadrature.hpp"
#include "zal/rng.hpp"
#include "zal/rszeta.hpp"

namespace zal {

namespace {

// Smallest kernel-variable halfwidth X such that the discarded tail,
// weighted by the growth bound, stays below tol/2.
double choose_window(double tau, double h, const Kernel& kernel, double tol,
                     double growth_c) {
    double hi = kernel.table_end();
    double weight = std::log(2.0 + std::abs(tau) + hi / h);
    double beyond = 0.0;
    if (!kernel.rapid_decay())
        beyond = (2.0 / M_PI) * (std::log(2.0 + std::abs(tau)) + 2.0) / hi;
    double X = std::min(8.0, hi);
    while (X < hi) {
        if (2.0 * growth_c * (weight * kernel.mass_above(X) + beyond) < 0.5 * tol)
            return X;
        X = std::min(X * 1.5, hi);
        if (X >= hi * 0.999) break;
    }
    return hi;
}

double tail_bound(double tau, double h, const Kernel& kernel, double X,
                  double growth_c) {
    double hi = kernel.table_end();
    double beyond = 0.0;
    if (!kernel.rapid_decay())
        beyond = (2.0 / M_PI) * (std::log(2.0 + std::abs(tau)) + 2.0) / hi;
    return 2.0 * growth_c *
           (std::log(2.0 + std::abs(tau) + hi / h) * kernel.mass_above(X) + beyond);
}

} // namespace

AveragedSample averaged_function(const std::function<double(double)>& f, double tau,
                                 double h, const Kernel& kernel, double tol) {
    if (!(h > 0.0)) throw domain_error("averaged_function: h must be positive");
    double X = kernel.table_end();
    AveragedSample out;
    out.tau = tau;
    out.h = h;
    out.window_lo = tau - X / h;
    out.window_hi = tau + X / h;
    QuadResult q = integrate_adaptive(
        [&](double t) { return f(tau + t / h) * kernel.phi(t); }, -X, X, tol);
    out.value = q.value;
    out.quad_error = q.error;
    return out;
}

AveragedSample averaged_im_log_zeta(double tau, double h, const Kernel& kernel,
                                    double tol, double growth_c) {
    if (!(h > 0.0)) throw domain_error("averaged_im_log_zeta: h must be positive");
    double X = choose_window(tau, h, kernel, tol, growth_c);
    double lo = tau - X / h, hi = tau + X / h;
    if (!(lo >= 2.0))
        throw domain_error("averaged_im_log_zeta: window reaches below t = 2");

    ZeroList zeros = locate_zeros(lo, hi);

    AveragedSample out;
    out.tau = tau;
    out.h = h;
    out.window_lo = lo;
    out.window_hi = hi;

    // Piece boundaries in the kernel variable; S is constant between zeros,
    // so each piece integrand is (pi (N-1) - theta(height)) phi(t).
    std::vector<double> cuts;
    cuts.push_back(-X);
    for (double g : zeros.ordinates) cuts.push_back(h * (g - tau));
    cuts.push_back(X);

    int64_t n_left = zeros.first_index - 1;   // N(height) on the first piece
    double value = 0.0, err = 0.0;
    double piece_tol = tol / (2.0 * static_cast<double>(cuts.size()));
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        double a = cuts[i], b = cuts[i + 1];
        if (b - a < 1e-14) {
            ++n_left;
            continue;
        }
        int64_t n_here = n_left + static_cast<int64_t>(i);
        auto integrand = [&](double t) {
            DD pis = dd::sub(dd::mul(dd::pi(), static_cast<double>(n_here - 1)),
                             theta_dd(tau + t / h));
            return pis.to_double() * kernel.phi(t);
        };
        QuadResult q = integrate_adaptive(integrand, a, b, piece_tol);
        value += q.value;
        err += q.error;
    }
    out.value = value;
    out.quad_error = err + tail_bound(tau, h, kernel, X, growth_c);
    return out;
}

AuditReport iteration_event_check(const IterationEventParams& p, const Kernel& kernel,
                                  unsigned threads) {
    if (!(p.eps > 0.0 && p.eps < 0.5))
        throw domain_error("iteration_event_check: eps must be in (0, 1/2)");
    if (!(p.K > 1.0 && p.K < p.V && p.V < std::log(p.T)))
        throw domain_error("iteration_event_check: need 1 < K < V < log T");
    double logT = std::log(p.T);
    double H = p.K * logT / p.V;
    int r_max = static_cast<int>(std::floor(std::log(logT)));

    // 0 = no hit, 1 = hit and conclusion holds, 2 = counterexample
    std::vector<int> outcome(static_cast<size_t>(p.n_samples), 0);
    std::vector<int> skipped(static_cast<size_t>(p.n_samples), 0);
    double lo = std::sqrt(p.T);

    parallel_for(
        static_cast<size_t>(p.n_samples),
        [&](size_t i) {
            double tau = lo + (p.T - lo) * rng::uniform01(p.seed, i);
            try {
                double pis = im_log_zeta(tau);
                // positive variant
                if (pis >= p.V) {
                    bool premises = true;
                    for (int r = 0; r <= r_max && premises; ++r)
                        if (im_log_zeta(tau - std::exp(static_cast<double>(r)) / H) <
                            -2.0 * p.V)
                            premises = false;
                    if (premises) {
                        AveragedSample I =
                            averaged_im_log_zeta(tau + p.a / H, H, kernel, 1e-4);
                        outcome[i] =
                            (I.value >= (1.0 - p.eps) * p.V - I.quad_error) ? 1 : 2;
                        return;
                    }
                }
                // negative variant
                if (pis <= -p.V) {
                    bool premises = true;
                    for (int r = 0; r <= r_max && premises; ++r)
                        if (im_log_zeta(tau + std::exp(static_cast<double>(r)) / H) >
                            2.0 * p.V)
                            premises = false;
                    if (premises) {
                        AveragedSample I =
                            averaged_im_log_zeta(tau - p.a / H, H, kernel, 1e-4);
                        outcome[i] =
                            (I.value <= -(1.0 - p.eps) * p.V + I.quad_error) ? 1 : 2;
                    }
                }
            } catch (const domain_error&) {
                skipped[i] = 1;
            }
        },
        threads);

    int64_t hits = 0, cx = 0, skip = 0;
    for (size_t i = 0; i < outcome.size(); ++i) {
        if (outcome[i] != 0) ++hits;
        if (outcome[i] == 2) ++cx;
        skip += skipped[i];
    }

    AuditReport rep;
    rep.name = "iteration-event-check";
    rep.params = {{"T", p.T},           {"V", p.V}, {"eps", p.eps}, {"K", p.K},
                  {"a", p.a},           {"H", H},   {"r_max", static_cast<double>(r_max)},
                  {"n", static_cast<double>(p.n_samples)}};
    rep.seed = p.seed;
    rep.statistics["premises_hit"] = static_cast<double>(hits);
    rep.statistics["counterexamples"] = static_cast<double>(cx);
    rep.statistics["skipped"] = static_cast<double>(skip);
    if (hits == 0) {
        rep.verdict = Verdict::inconclusive;
        rep.note = "no premise hits";
    } else {
        rep.verdict = (cx == 0) ? Verdict::pass : Verdict::fail;
    }
    return rep;
}

CalibrationResult calibrate_iteration_constants(double T, double V, double eps,
                                                int64_t n_samples, uint64_t seed,
                                                const Kernel& kernel,
                                                unsigned threads) {
    CalibrationResult out;
    // Log-spaced grid in [1, 64]; K is constrained to (1, V) by the premise.
    const double grid[] = {1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0,
                           12.0, 16.0, 24.0, 32.0, 48.0, 64.0};
    double best_score = 1e300;
    for (double K : grid) {
        if (!(K > 1.0 && K < V)) continue;
        for (double a : grid) {
            IterationEventParams p;
            p.T = T;
            p.V = V;
            p.eps = eps;
            p.K = K;
            p.a = a;
            p.n_samples = n_samples;
            p.seed = seed;
            AuditReport rep = iteration_event_check(p, kernel, threads);
            rep.params["a"] = a;
            out.grid.push_back(rep);
            bool ok = rep.verdict == Verdict::pass;
            double score = a + K + 1e-3 * K;
            if (ok && score < best_score) {
                best_score = score;
                out.a = a;
                out.K = K;
                out.found = true;
                out.selected = rep;
            }
        }
    }
    return out;
}

} // namespace zal
