#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <numeric>

namespace thetaforge {

// Exact coefficient type. Identity coefficients grow like partition counts,
// so fixed-width integers are not enough at the orders we verify.
using Int = boost::multiprecision::cpp_int;

using i64 = std::int64_t;

inline i64 floor_div(i64 a, i64 b) {
    i64 q = a / b, r = a % b;
    return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

inline i64 mod_floor(i64 a, i64 b) { return a - floor_div(a, b) * b; }

inline i64 gcd64(i64 a, i64 b) { return std::gcd(a, b); }

// floor(sqrt(num/den)) for num >= 0, den > 0, exact.
inline i64 floor_sqrt_ratio(const Int& num, const Int& den) {
    if (num <= 0) return 0;
    Int q = num / den;
    Int r = boost::multiprecision::sqrt(q);
    // sqrt() truncates; fix up against the exact inequality r^2 * den <= num.
    while ((r + 1) * (r + 1) * den <= num) ++r;
    while (r * r * den > num) --r;
    return static_cast<i64>(r);
}

} // namespace thetaforge
