#pragma once

#include <cmath>
#include <cstdint>

namespace zal {

// Double-double value: an unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
// Gives ~31 significant digits; used for phase accumulation where
// t*log(n) reaches 1e8+ and plain double would lose 1e-8 of a radian.
// Algorithms are the classical error-free transformations (Dekker/Knuth),
// products via std::fma.
struct DD {
    double hi = 0.0;
    double lo = 0.0;

    constexpr DD() = default;
    constexpr DD(double x) : hi(x), lo(0.0) {}
    constexpr DD(double h, double l) : hi(h), lo(l) {}

    double to_double() const { return hi + lo; }
};

namespace dd {

inline DD two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return {s, err};
}

// Requires |a| >= |b|.
inline DD quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}

inline DD two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

inline DD add(DD a, DD b) {
    DD s = two_sum(a.hi, b.hi);
    double lo = s.lo + a.lo + b.lo;
    return quick_two_sum(s.hi, lo);
}

inline DD add(DD a, double b) {
    DD s = two_sum(a.hi, b);
    return quick_two_sum(s.hi, s.lo + a.lo);
}

inline DD sub(DD a, DD b) { return add(a, DD{-b.hi, -b.lo}); }
inline DD sub(DD a, double b) { return add(a, -b); }
inline DD neg(DD a) { return {-a.hi, -a.lo}; }

inline DD mul(DD a, DD b) {
    DD p = two_prod(a.hi, b.hi);
    double lo = p.lo + a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, lo);
}

inline DD mul(DD a, double b) {
    DD p = two_prod(a.hi, b);
    return quick_two_sum(p.hi, p.lo + a.lo * b);
}

inline DD div(DD a, DD b) {
    double q1 = a.hi / b.hi;
    DD r = sub(a, mul(b, q1));
    double q2 = r.hi / b.hi;
    r = sub(r, mul(b, q2));
    double q3 = r.hi / b.hi;
    return add(quick_two_sum(q1, q2), q3);
}

inline DD div(DD a, double b) { return div(a, DD{b}); }

inline constexpr DD pi()      { return {3.141592653589793116e+00,  1.224646799147353177e-16}; }
inline constexpr DD two_pi()  { return {6.283185307179586232e+00,  2.449293598294706354e-16}; }
inline constexpr DD ln2()     { return {6.931471805599452862e-01,  2.319046813846299558e-17}; }

// exp(x) for |x| up to a few hundred: argument reduction against ln 2,
// then a plain Taylor series in the reduced argument.
inline DD exp(DD x) {
    if (x.hi > 709.0) return {HUGE_VAL, 0.0};
    if (x.hi < -709.0) return {0.0, 0.0};
    double k = std::nearbyint(x.hi / ln2().hi);
    DD r = sub(x, mul(ln2(), k));
    // |r| <= ln2/2; sum 1 + r + r^2/2! + ... until terms vanish.
    DD term{1.0};
    DD sum{1.0};
    for (int i = 1; i < 32; ++i) {
        term = mul(term, r);
        term = div(term, static_cast<double>(i));
        sum = add(sum, term);
        if (std::abs(term.hi) < 1e-35 * std::abs(sum.hi)) break;
    }
    return mul(sum, std::ldexp(1.0, static_cast<int>(k)));
}

// log(x), x > 0: one Newton step y <- y + x*exp(-y) - 1 from the double seed
// is enough to reach full dd precision.
inline DD log(DD x) {
    double y0 = std::log(x.hi);
    DD y{y0};
    DD e = exp(neg(y));
    DD corr = sub(mul(x, e), 1.0);
    y = add(y, corr);
    e = exp(neg(y));
    corr = sub(mul(x, e), 1.0);
    return add(y, corr);
}

inline DD log(double x) { return log(DD{x}); }

// sin/cos by Taylor series after reduction mod 2*pi; intended for the
// moderate arguments that arise in series constructions, not as a general
// libm replacement.
inline void sincos(DD x, DD& s, DD& c) {
    double q = std::nearbyint(x.hi / two_pi().hi);
    if (q != 0.0) x = sub(x, mul(two_pi(), q));
    DD x2 = mul(x, x);
    DD term = x;
    DD acc = x;
    for (int k = 1; k < 30; ++k) {
        term = mul(term, x2);
        term = div(term, -static_cast<double>((2 * k) * (2 * k + 1)));
        acc = add(acc, term);
        if (std::abs(term.hi) < 1e-36) break;
    }
    s = acc;
    term = DD{1.0};
    acc = DD{1.0};
    for (int k = 1; k < 30; ++k) {
        term = mul(term, x2);
        term = div(term, -static_cast<double>((2 * k - 1) * (2 * k)));
        acc = add(acc, term);
        if (std::abs(term.hi) < 1e-36) break;
    }
    c = acc;
}

// Reduce x modulo 2*pi into roughly [-pi, pi]; exact for |x| < 2^52.
inline double mod_two_pi(DD x) {
    double q = std::nearbyint(x.hi / two_pi().hi);
    DD r = sub(x, mul(two_pi(), q));
    // One more pass in case the first rounding left more than a period.
    q = std::nearbyint(r.hi / two_pi().hi);
    if (q != 0.0) r = sub(r, mul(two_pi(), q));
    return r.to_double();
}

} // namespace dd
} // namespace zal
