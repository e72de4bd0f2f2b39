#pragma once

#include <cmath>
#include <stdexcept>

namespace qcap::specfun {

/// Largest |x| for which kummer_m is validated.
inline constexpr double kKummerMaxArgument = 300.0;

/**
 * Kummer's confluent hypergeometric function
 *
 *     M(a, b, x) = sum_n (a)_n x^n / ((b)_n n!)
 *
 * x >= 0 is summed directly in extended precision; x < 0 goes through
 * M(a, b, x) = e^x M(b - a, b, -x), so the summed series never alternates
 * because of the argument. Summation stops once five consecutive terms fall
 * below 1e-16 of the running sum, or the series terminates (a a non-positive
 * integer).
 *
 * Throws std::domain_error for b a non-positive integer and std::range_error
 * for |x| > kKummerMaxArgument.
 */
inline double kummer_m(double a, double b, double x)
{
    if (b <= 0.0 && b == std::floor(b))
        throw std::domain_error("kummer_m: b must not be a non-positive integer");
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(x))
        throw std::domain_error("kummer_m: non-finite argument");
    if (std::abs(x) > kKummerMaxArgument)
        throw std::range_error("kummer_m: |x| beyond the validated range");
    if (x < 0.0)
        return std::exp(x) * kummer_m(b - a, b, -x);

    using real = long double;
    const real la = a, lb = b, lx = x;
    real term = 1.0L;
    real sum = 1.0L;
    int small_run = 0;
    constexpr int max_terms = 5000;
    for (int n = 0; n < max_terms; ++n) {
        term *= (la + n) * lx / ((lb + n) * (n + 1));
        if (term == 0.0L)
            return static_cast<double>(sum);
        sum += term;
        // only trust the stopping test once the factor (a+n) keeps its sign
        if (la + n > 0.0L && std::abs(term) < 1e-16L * std::abs(sum)) {
            if (++small_run == 5)
                return static_cast<double>(sum);
        } else {
            small_run = 0;
        }
    }
    throw std::runtime_error("kummer_m: series did not converge");
}

} // namespace qcap::specfun
