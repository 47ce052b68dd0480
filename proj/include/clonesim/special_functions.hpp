#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace clonesim {

namespace detail {

inline constexpr int kLogFactorialTableSize = 1024;

// ln(n!) for n < kLogFactorialTableSize, accumulated in extended precision.
inline const std::array<double, kLogFactorialTableSize>& log_factorial_table() {
    static const auto table = [] {
        std::array<double, kLogFactorialTableSize> t{};
        long double acc = 0.0L;
        t[0] = 0.0;
        for (int n = 1; n < kLogFactorialTableSize; ++n) {
            acc += std::log(static_cast<long double>(n));
            t[n] = static_cast<double>(acc);
        }
        return t;
    }();
    return table;
}

}  // namespace detail

/// Natural log of n!. Tabulated below 1024, lgamma above.
inline double log_factorial(int n) {
    if (n < 0) throw std::invalid_argument("log_factorial: negative argument");
    if (n < detail::kLogFactorialTableSize) return detail::log_factorial_table()[n];
    return std::lgamma(static_cast<double>(n) + 1.0);
}

/// ln C(n, k); -inf when k is outside [0, n].
inline double log_binomial(int n, int k) {
    if (k < 0 || k > n) return -INFINITY;
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

/// ln B(a, b) = ln Γ(a) + ln Γ(b) - ln Γ(a + b).
inline double log_euler_beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("log_euler_beta: arguments must be positive");
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace clonesim
