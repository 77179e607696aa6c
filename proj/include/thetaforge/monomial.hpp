#pragma once

#include <string>

#include "errors.hpp"
#include "ints.hpp"

namespace thetaforge {

/// Signed power of q: +-q^e.  Theta-function arguments are always of this
/// shape here; exponents may go negative in intermediate algebra (b/a style
/// quotients) and are restored to the canonical range by normalization.
struct MonomialArg {
    int sign = 1; // +1 or -1
    i64 exp = 0;

    static MonomialArg q(i64 e) { return {+1, e}; }
    static MonomialArg neg_q(i64 e) { return {-1, e}; }
    static MonomialArg one() { return {+1, 0}; }
    static MonomialArg minus_one() { return {-1, 0}; }

    bool is_unit() const { return exp == 0; }
    bool is_one() const { return sign > 0 && exp == 0; }
    bool is_minus_one() const { return sign < 0 && exp == 0; }

    MonomialArg negated() const { return {-sign, exp}; }

    friend MonomialArg operator*(const MonomialArg& a, const MonomialArg& b) {
        return {a.sign * b.sign, a.exp + b.exp};
    }

    /// m^n for any integer n (sign is +-1, so negative powers are fine).
    MonomialArg pow(i64 n) const {
        int s = (sign < 0 && (n % 2 != 0)) ? -1 : 1;
        return {s, exp * n};
    }

    bool operator==(const MonomialArg& o) const { return sign == o.sign && exp == o.exp; }
    bool operator!=(const MonomialArg& o) const { return !(*this == o); }
    bool operator<(const MonomialArg& o) const {
        return exp != o.exp ? exp < o.exp : sign < o.sign;
    }

    std::string to_string() const {
        std::string s = sign < 0 ? "-" : "";
        if (exp == 0) return s + "1";
        s += "q";
        if (exp != 1) s += "^" + std::to_string(exp);
        return s;
    }
};

} // namespace thetaforge
