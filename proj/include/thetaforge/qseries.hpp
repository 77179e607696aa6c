#pragma once

#include <map>
#include <sstream>
#include <string>
#include <utility>

#include "errors.hpp"
#include "ints.hpp"

namespace thetaforge {

/// Truncated formal power series in q with exact integer coefficients.
///
/// A value represents  sum_{e < order} c_e q^e + O(q^order).  Exponents may
/// be negative (finite Laurent tails appear in intermediate monomial
/// quotients before cancellation).  Stored coefficients are never zero and
/// always sit strictly below the truncation order.
class QSeries {
public:
    using term_map = std::map<i64, Int>;

    explicit QSeries(i64 order) : order_(order) {}

    static QSeries zero(i64 order) { return QSeries(order); }

    static QSeries monomial(Int c, i64 e, i64 order) {
        if (order <= e)
            throw truncation_error("monomial exponent " + std::to_string(e) +
                                   " does not fit below order " + std::to_string(order));
        QSeries s(order);
        if (c != 0) s.coeffs_[e] = std::move(c);
        return s;
    }

    static QSeries one(i64 order) { return monomial(1, 0, order); }

    i64 order() const { return order_; }
    bool is_zero() const { return coeffs_.empty(); }

    /// Lowest stored exponent; for the zero series this is the order itself
    /// (everything below the truncation window is known to vanish).
    i64 min_exp() const { return coeffs_.empty() ? order_ : coeffs_.begin()->first; }

    Int coeff(i64 e) const {
        auto it = coeffs_.find(e);
        return it == coeffs_.end() ? Int(0) : it->second;
    }

    const term_map& terms() const { return coeffs_; }

    void set_coeff(i64 e, Int c) {
        if (e >= order_) return;
        if (c == 0)
            coeffs_.erase(e);
        else
            coeffs_[e] = std::move(c);
    }

    void add_coeff(i64 e, const Int& c) {
        if (e >= order_ || c == 0) return;
        auto it = coeffs_.find(e);
        if (it == coeffs_.end()) {
            coeffs_.emplace(e, c);
        } else {
            it->second += c;
            if (it->second == 0) coeffs_.erase(it);
        }
    }

    QSeries truncated(i64 new_order) const {
        QSeries r(std::min(order_, new_order));
        for (const auto& [e, c] : coeffs_) {
            if (e >= r.order_) break;
            r.coeffs_.emplace(e, c);
        }
        return r;
    }

    friend QSeries add(const QSeries& f, const QSeries& g) {
        QSeries r = f.truncated(std::min(f.order_, g.order_));
        for (const auto& [e, c] : g.coeffs_) r.add_coeff(e, c);
        return r;
    }

    friend QSeries neg(const QSeries& f) {
        QSeries r(f.order_);
        for (const auto& [e, c] : f.coeffs_) r.coeffs_.emplace(e, -c);
        return r;
    }

    friend QSeries sub(const QSeries& f, const QSeries& g) { return add(f, neg(g)); }

    /// Product order tightens to min(f.order + g.min_exp, g.order + f.min_exp):
    /// the unknown tail of one factor meets the lowest term of the other.
    friend QSeries mul(const QSeries& f, const QSeries& g) {
        i64 order = std::min(f.order_ + g.min_exp(), g.order_ + f.min_exp());
        QSeries r(order);
        for (const auto& [ef, cf] : f.coeffs_) {
            if (ef + g.min_exp() >= order) break;
            for (const auto& [eg, cg] : g.coeffs_) {
                i64 e = ef + eg;
                if (e >= order) break;
                r.add_coeff(e, cf * cg);
            }
        }
        return r;
    }

    QSeries operator-() const { return neg(*this); }
    friend QSeries operator+(const QSeries& f, const QSeries& g) { return add(f, g); }
    friend QSeries operator-(const QSeries& f, const QSeries& g) { return sub(f, g); }
    friend QSeries operator*(const QSeries& f, const QSeries& g) { return mul(f, g); }

    QSeries scaled(const Int& c) const {
        QSeries r(order_);
        if (c != 0)
            for (const auto& [e, k] : coeffs_) r.coeffs_.emplace(e, k * c);
        return r;
    }

    /// Multiply by q^s.
    QSeries shifted(i64 s) const {
        QSeries r(order_ + s);
        for (const auto& [e, c] : coeffs_) r.coeffs_.emplace(e + s, c);
        return r;
    }

    /// Inverse of a series with lowest term +-q^s.  Coefficients stay integral
    /// exactly when the lowest coefficient is a unit, which is all the theta
    /// quotients in play ever need.
    QSeries inverted() const {
        if (coeffs_.empty())
            throw not_invertible_error("cannot invert the zero series");
        auto lead = *coeffs_.begin();
        if (lead.second != 1 && lead.second != -1)
            throw not_invertible_error("lowest coefficient is not a unit");
        const i64 s = lead.first;
        const i64 n = order_ - s; // terms known in the normalized unit
        if (n <= 0)
            throw not_invertible_error("no terms below truncation order");
        // u = q^-s * f has constant term +-1; invert u by the convolution
        // recurrence, then shift back.
        const Int u0 = lead.second;
        QSeries inv(n);
        inv.coeffs_[0] = u0;
        for (i64 k = 1; k < n; ++k) {
            Int acc = 0;
            for (const auto& [e, c] : coeffs_) {
                i64 j = e - s;
                if (j > k) break;
                if (j == 0) continue;
                Int g = inv.coeff(k - j);
                if (g != 0) acc += c * g;
            }
            if (acc != 0) inv.coeffs_[k] = -u0 * acc;
        }
        return inv.shifted(-s);
    }

    friend QSeries invert_unit(const QSeries& f) {
        if (f.min_exp() != 0)
            throw not_invertible_error("series is not a unit: lowest exponent is not 0");
        return f.inverted();
    }

    friend QSeries div(const QSeries& f, const QSeries& g) { return mul(f, g.inverted()); }

    /// q -> q^k.
    QSeries substitute_power(i64 k) const {
        if (k < 1) throw error("substitute_power requires k >= 1");
        QSeries r(k * (order_ - 1) + 1);
        for (const auto& [e, c] : coeffs_) r.coeffs_.emplace(k * e, c);
        return r;
    }

    /// q^k -> q; every nonzero coefficient must sit on a multiple of k.
    QSeries extract_power(i64 k) const {
        if (k < 1) throw error("extract_power requires k >= 1");
        QSeries r(floor_div(order_ - 1, k) + 1);
        for (const auto& [e, c] : coeffs_) {
            if (mod_floor(e, k) != 0)
                throw misaligned_error("exponent " + std::to_string(e) +
                                       " is not divisible by " + std::to_string(k));
            r.coeffs_.emplace(e / k, c);
        }
        return r;
    }

    /// Exact agreement of all coefficients on exponents < n.  Never compares
    /// beyond what either operand actually knows.
    friend bool eq_to_order(const QSeries& f, const QSeries& g, i64 n) {
        if (n > f.order_ || n > g.order_)
            throw precision_error("comparison order " + std::to_string(n) +
                                  " exceeds a truncation order");
        return first_mismatch(f, g, n) == n;
    }

    /// Smallest exponent < n where the two disagree, or n if none.
    friend i64 first_mismatch(const QSeries& f, const QSeries& g, i64 n) {
        auto it = f.coeffs_.begin();
        auto jt = g.coeffs_.begin();
        while (it != f.coeffs_.end() || jt != g.coeffs_.end()) {
            i64 ef = it != f.coeffs_.end() ? it->first : n;
            i64 eg = jt != g.coeffs_.end() ? jt->first : n;
            i64 e = std::min(ef, eg);
            if (e >= n) break;
            Int cf = ef == e ? it->second : Int(0);
            Int cg = eg == e ? jt->second : Int(0);
            if (cf != cg) return e;
            if (ef == e) ++it;
            if (eg == e) ++jt;
        }
        return n;
    }

    bool operator==(const QSeries& o) const {
        return order_ == o.order_ && coeffs_ == o.coeffs_;
    }

    std::string to_string() const {
        if (coeffs_.empty()) return "0";
        std::ostringstream out;
        bool first = true;
        for (const auto& [e, c] : coeffs_) {
            Int a = c < 0 ? Int(-c) : c;
            if (first) {
                if (c < 0) out << "-";
                first = false;
            } else {
                out << (c < 0 ? " - " : " + ");
            }
            if (a != 1 || e == 0) out << a.str();
            if (e != 0) {
                if (a != 1) out << "*";
                out << "q";
                if (e != 1) out << "^" << e;
            }
        }
        return out.str();
    }

private:
    term_map coeffs_;
    i64 order_;
};

inline QSeries from_monomial(Int c, i64 e, i64 order) {
    return QSeries::monomial(std::move(c), e, order);
}

inline QSeries pow(const QSeries& base, i64 n) {
    QSeries r = QSeries::one(base.order());
    for (i64 i = 0; i < n; ++i) r = mul(r, base);
    return r;
}

} // namespace thetaforge
