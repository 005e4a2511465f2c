#ifndef QINDEX_SERIES_HPP
#define QINDEX_SERIES_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "errors.hpp"

namespace qindex {

using BigInt = boost::multiprecision::cpp_int;

// Truncated Laurent series in a half-integer power of q.  Exponents count
// half-units: the stored exponent e represents q^{e/2}.  Coefficients are
// exact integers.  `trunc` is the first half-unit exponent at which the
// coefficients are no longer claimed to be correct; every stored exponent
// is < trunc and every stored coefficient is nonzero.
class HalfExpSeries {
public:
    using Map = std::map<std::int64_t, BigInt>;

    explicit HalfExpSeries(std::int64_t trunc = 0) : trunc_(trunc) {}

    static HalfExpSeries zero(std::int64_t trunc) { return HalfExpSeries(trunc); }

    static HalfExpSeries monomial(const BigInt& coef, std::int64_t halfExp,
                                  std::int64_t trunc) {
        HalfExpSeries s(trunc);
        if (coef != 0 && halfExp < trunc) s.c_[halfExp] = coef;
        return s;
    }

    static HalfExpSeries one(std::int64_t trunc) { return monomial(1, 0, trunc); }

    std::int64_t trunc() const { return trunc_; }
    const Map& coeffs() const { return c_; }
    bool isZero() const { return c_.empty(); }

    // Minimum stored exponent; trunc() for the zero series.
    std::int64_t valuation() const {
        return c_.empty() ? trunc_ : c_.begin()->first;
    }

    BigInt coeff(std::int64_t halfExp) const {
        auto it = c_.find(halfExp);
        return it == c_.end() ? BigInt(0) : it->second;
    }

    HalfExpSeries truncated(std::int64_t newTrunc) const {
        HalfExpSeries r(std::min(trunc_, newTrunc));
        for (const auto& [e, v] : c_) {
            if (e >= r.trunc_) break;
            r.c_.emplace_hint(r.c_.end(), e, v);
        }
        return r;
    }

    HalfExpSeries operator-() const {
        HalfExpSeries r(trunc_);
        for (const auto& [e, v] : c_) r.c_.emplace_hint(r.c_.end(), e, -v);
        return r;
    }

    friend HalfExpSeries operator+(const HalfExpSeries& a, const HalfExpSeries& b) {
        HalfExpSeries r(std::min(a.trunc_, b.trunc_));
        for (const auto& [e, v] : a.c_)
            if (e < r.trunc_) r.c_[e] += v;
        for (const auto& [e, v] : b.c_)
            if (e < r.trunc_) r.c_[e] += v;
        r.prune();
        return r;
    }

    friend HalfExpSeries operator-(const HalfExpSeries& a, const HalfExpSeries& b) {
        return a + (-b);
    }

    friend HalfExpSeries operator*(const HalfExpSeries& a, const HalfExpSeries& b) {
        // With Laurent parts the product is only reliable where every
        // cross-term against an unknown tail would land at or beyond the
        // result truncation.
        std::int64_t t = std::min(a.trunc_, b.trunc_);
        t = std::min(t, a.trunc_ + std::min<std::int64_t>(b.valuation(), 0));
        t = std::min(t, b.trunc_ + std::min<std::int64_t>(a.valuation(), 0));
        HalfExpSeries r(t);
        for (const auto& [ea, va] : a.c_) {
            for (const auto& [eb, vb] : b.c_) {
                std::int64_t e = ea + eb;
                if (e >= t) break; // b sorted ascending
                r.c_[e] += va * vb;
            }
        }
        r.prune();
        return r;
    }

    // Multiply by coef * q^{halfExp/2}.
    HalfExpSeries shifted(const BigInt& coef, std::int64_t halfExp) const {
        HalfExpSeries r(trunc_ + halfExp);
        if (coef != 0)
            for (const auto& [e, v] : c_) r.c_.emplace_hint(r.c_.end(), e + halfExp, coef * v);
        return r;
    }

    // Substitute q -> q^2 (doubles every half-unit exponent).  Odd
    // exponents of the image are identically zero, so knowledge extends
    // to twice the original truncation.
    HalfExpSeries substQSquared() const {
        HalfExpSeries r(2 * trunc_);
        for (const auto& [e, v] : c_) r.c_.emplace_hint(r.c_.end(), 2 * e, v);
        return r;
    }

    // Multiplicative inverse.  Requires an invertible leading term
    // (coefficient +-1), which is all the integer-coefficient quotients in
    // this project need.
    HalfExpSeries inverse(std::int64_t order) const {
        if (c_.empty()) throw InconsistentData("series inverse of zero");
        auto lead = *c_.begin();
        if (lead.second != 1 && lead.second != -1)
            throw InconsistentData("series inverse needs unit leading coefficient");
        std::int64_t v = lead.first;
        // Work with the unit-normalized tail u, f = lead * q^{v/2} (1 + u).
        // half-units of 1/(1+u) needed; the tail u is only known below
        // trunc_ - v, which caps what the inverse can claim.
        std::int64_t n = std::min(order + v, trunc_ - v);
        HalfExpSeries inv(n);
        if (n <= 0) return HalfExpSeries(order);
        inv.c_[0] = lead.second; // 1/lead == lead for +-1
        // inv satisfies f_shifted * inv = 1; fill coefficients in order.
        for (std::int64_t e = 1; e < n; ++e) {
            BigInt acc = 0;
            for (const auto& [ef, vf] : c_) {
                std::int64_t ei = e - (ef - v);
                if (ef == v) continue;
                if (ei < 0) break;
                auto it = inv.c_.find(ei);
                if (it != inv.c_.end()) acc += vf * it->second;
            }
            if (acc != 0) inv.c_[e] = -acc * lead.second;
        }
        HalfExpSeries r = inv.shifted(1, -v);
        return r.truncated(order);
    }

    bool operator==(const HalfExpSeries& o) const {
        return trunc_ == o.trunc_ && c_ == o.c_;
    }

    // Equality of the jointly-known region.
    friend bool agreeOnOverlap(const HalfExpSeries& a, const HalfExpSeries& b) {
        std::int64_t t = std::min(a.trunc_, b.trunc_);
        for (const auto& [e, v] : a.c_)
            if (e < t && b.coeff(e) != v) return false;
        for (const auto& [e, v] : b.c_)
            if (e < t && a.coeff(e) != v) return false;
        return true;
    }

    // Canonical text form: sorted [[halfExp, "coef"], ...] plus trunc.
    std::string toJson() const {
        std::ostringstream os;
        os << "{\"trunc\":" << trunc_ << ",\"terms\":[";
        bool first = true;
        for (const auto& [e, v] : c_) {
            if (!first) os << ",";
            first = false;
            os << "[" << e << ",\"" << v.str() << "\"]";
        }
        os << "]}";
        return os.str();
    }

private:
    void prune() {
        for (auto it = c_.begin(); it != c_.end();) {
            if (it->second == 0) it = c_.erase(it);
            else ++it;
        }
    }

    std::int64_t trunc_;
    Map c_;
};

} // namespace qindex

#endif
