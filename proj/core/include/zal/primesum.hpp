#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "zal/audit.hpp"
#include "zal/kernel.hpp"

namespace zal {

struct PrimeTable {
    uint64_t limit = 0;
    std::vector<uint64_t> primes;   // ascending, exactly the primes <= limit
};

// Segmented sieve. Raises resource_error when the estimated footprint would
// exceed memory_budget_bytes, domain_error for limit < 2 or > 2^48.
PrimeTable sieve_primes(uint64_t limit,
                        uint64_t memory_budget_bytes = uint64_t(2) << 30);

// On-disk cache: 8-byte magic "ZALPRIM1", then limit and the primes as
// little-endian 64-bit integers.
void save_prime_table(const PrimeTable& table, const std::string& path);
PrimeTable load_prime_table(const std::string& path);

// sum over primes p <= e^{lambda h} of p^{-1/2} e^{-i tau log p} phi_hat(log p / h).
std::complex<double> prime_sum_main(double tau, double h, const Kernel& kernel,
                                    const PrimeTable& table);

// (1/2) sum over primes of p^{-1 - 2 i tau} phi_hat(2 log p / h).
std::complex<double> prime_sum_squares(double tau, double h, const Kernel& kernel,
                                       const PrimeTable& table);

// I(tau,h) - Im(main) - Im(squares); bounded uniformly in the admissible
// range h < alpha log(2+|tau|). alpha is an empirically workable value, the
// analysis only guarantees existence of one.
double approximation_residual(double tau, double h, const Kernel& kernel,
                              const PrimeTable& table, double alpha = 1.2,
                              double quad_tol = 1e-6);

struct PrimeSumDecomposition {
    std::complex<double> s1, s2, s3;
    double x_split = 0.0;   // T^{1/(V log log T)}
    double h = 0.0;
    double tau = 0.0;
    double total_im = 0.0;
};

// Splits the main sum at x_split; s3 is the squares sum.
PrimeSumDecomposition split_decomposition(double tau, double h, const Kernel& kernel,
                                          const PrimeTable& table, double T, double V);

// Monte Carlo audit of the mean-value bound
//   (1/T) int_T^{2T} |sum_{p<=x} a(p) p^{-1/2-it}|^{2k} dt <= C k! (sum |a(p)|^2/p)^k
// for t uniform in [T, 2T]. Requires x^k <= T / log T.
AuditReport mean_value_check(const std::vector<std::pair<uint64_t, std::complex<double>>>& coeffs,
                             double x, int k, double T, int64_t n_samples,
                             uint64_t seed, unsigned threads = 0);

} // namespace zal
