#ifndef QINDEX_QSERIES_HPP
#define QINDEX_QSERIES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "series.hpp"

namespace qindex {

// (sign * q^{a/2}; q^{step/2})_infty as a truncated series.  a > 0 (or
// a == 0 with sign == -1), step > 0, all in half-units.
inline HalfExpSeries pochhammerSeries(std::int64_t a, int sign, std::int64_t step,
                                      std::int64_t order) {
    if (step <= 0) throw MalformedInput("pochhammerSeries: step must be positive");
    if (a < 0 || (a == 0 && sign == 1))
        throw MalformedInput("pochhammerSeries: vanishing or divergent factor");
    HalfExpSeries r = HalfExpSeries::one(order);
    for (std::int64_t e = a; e < order; e += step) {
        HalfExpSeries f = HalfExpSeries::one(order);
        f = f + HalfExpSeries::monomial(-sign, e, order);
        r = r * f;
    }
    return r;
}

// Finite Pochhammer (q;q)_n.
inline HalfExpSeries pochFinite(std::int64_t n, std::int64_t order) {
    HalfExpSeries r = HalfExpSeries::one(order);
    for (std::int64_t k = 1; k <= n; ++k) {
        if (2 * k >= order) break; // remaining factors are 1 + O(q^{order/2})
        HalfExpSeries f = HalfExpSeries::one(order) + HalfExpSeries::monomial(-1, 2 * k, order);
        r = r * f;
    }
    return r;
}

// c(q) = (q;q)_infty^2 / (q^2;q^2)_infty.
inline HalfExpSeries cSeries(std::int64_t order) {
    HalfExpSeries p1 = pochhammerSeries(2, 1, 2, order);
    HalfExpSeries p2 = pochhammerSeries(4, 1, 4, order);
    return p1 * p1 * p2.inverse(order);
}

// J(n) = sum_{k >= max(0,-n)} q^{k(k+1)/2} / ((q)_k (q)_{n+k}).
inline HalfExpSeries jSeries(std::int64_t n, std::int64_t order) {
    HalfExpSeries r(order);
    for (std::int64_t k = std::max<std::int64_t>(0, -n);; ++k) {
        std::int64_t hu = k * (k + 1); // half-units of q^{k(k+1)/2}
        if (hu >= order) break;
        HalfExpSeries term = pochFinite(k, order).inverse(order) *
                             pochFinite(n + k, order).inverse(order);
        r = r + term.shifted(1, hu).truncated(order);
    }
    return r;
}

// Half-unit exponent of the n-th summand of the tetrahedron index at (m,e).
inline std::int64_t tetTermDegreeHU(std::int64_t n, std::int64_t m, std::int64_t e) {
    return n * (n + 1) - (2 * n + e) * m;
}

// min_n of the above over the summation range n >= max(0,-e); this is a
// lower bound for the valuation of I_tet(m,e) in half-units.
inline std::int64_t minDegreeTetHU(std::int64_t m, std::int64_t e) {
    std::int64_t n0 = std::max<std::int64_t>(0, -e);
    // The exponent is a parabola in n with vertex at (2m-1)/2.
    std::int64_t best = tetTermDegreeHU(n0, m, e);
    for (std::int64_t n : {m - 1, m, m + 1}) {
        if (n < n0) continue;
        best = std::min(best, tetTermDegreeHU(n, m, e));
    }
    return best;
}

// Exact valuation of I_tet(m,e) in half-units.  In the cone m <= 0, e >= 0
// the summand degrees n(n+1) - (2n+e)m are strictly increasing in n, so the
// valuation equals the n=0 term degree -e*m.  Every (m,e) maps into that
// cone along the S3 symmetry orbit of I^tet, whose members differ by exact
// powers of (-q); tracking those powers transports the valuation back.
inline std::int64_t tetValuationHU(std::int64_t m, std::int64_t e) {
    struct Rep { std::int64_t m, e, k; }; // I^tet(m0,e0) = (-q)^k I^tet(m,e)
    const Rep orbit[] = {
        {m, e, 0},
        {-e, -m, e + m},
        {-e - m, m, e},
        {e, -e - m, e + m},
        {-m, m + e, 0},
        {m + e, -e, e},
    };
    for (const Rep& r : orbit) {
        if (r.m <= 0 && r.e >= 0) {
            // val_q I^tet(m0,e0) = k + e' + val_hu I_tet(m',e'), and the
            // (q -> q^2)/(-q)^{e0} bookkeeping gives val_hu I_tet(m0,e0)
            // = that minus e0.
            return r.k + r.e - r.e * r.m - e;
        }
    }
    throw InconsistentData("tetValuationHU: orbit misses the closed cone"); // unreachable
}

namespace detail {

// Memoized 1/(q;q)_n, grown on demand.  These inverses dominate the cost of
// tetrahedron-index evaluation across many (m,e), so share them.
inline const HalfExpSeries& invPochCached(std::int64_t n, std::int64_t order) {
    thread_local std::map<std::int64_t, HalfExpSeries> cache;
    auto it = cache.find(n);
    if (it == cache.end() || it->second.trunc() < order) {
        std::int64_t ord = std::max<std::int64_t>(order, 64);
        if (it != cache.end()) ord = std::max(ord, 2 * it->second.trunc());
        HalfExpSeries inv = pochFinite(n, ord).inverse(ord);
        it = cache.insert_or_assign(it == cache.end() ? cache.begin() : it, n, inv);
    }
    return it->second;
}

} // namespace detail

// Tetrahedron index I_tet(m,e) = sum_{n >= (-e)_+} (-1)^n
//   q^{n(n+1)/2 - (n + e/2) m} / ((q)_n (q)_{n+e}),
// exact to the given half-unit order.
inline HalfExpSeries tetIndexSeries(std::int64_t m, std::int64_t e, std::int64_t order) {
    HalfExpSeries r(order);
    std::int64_t n0 = std::max<std::int64_t>(0, -e);
    for (std::int64_t n = n0;; ++n) {
        std::int64_t hu = tetTermDegreeHU(n, m, e);
        if (hu >= order) {
            // Safe to stop once past the parabola vertex.
            if (2 * n >= 2 * m - 1) break;
            continue;
        }
        std::int64_t inner = order - std::min<std::int64_t>(hu, 0);
        HalfExpSeries term = detail::invPochCached(n, inner).truncated(inner) *
                             detail::invPochCached(n + e, inner).truncated(inner);
        BigInt sign = (n % 2 == 0) ? 1 : -1;
        r = r + term.shifted(sign, hu).truncated(order);
    }
    return r;
}

// I^tet(m,e)(q) = (-q)^e * I_tet(m,e)(q^2): integer q-exponents only.
inline HalfExpSeries iDeltaHat(std::int64_t m, std::int64_t e, std::int64_t order) {
    std::int64_t inner = (order - 2 * e + 1) / 2;
    inner = std::max<std::int64_t>(inner, minDegreeTetHU(m, e));
    HalfExpSeries t = tetIndexSeries(m, e, inner);
    BigInt sign = (((e % 2) + 2) % 2 == 0) ? 1 : -1;
    return t.substQSquared().shifted(sign, 2 * e).truncated(order);
}

// Exact valuation of iDeltaHat in half-units of q (always even).
inline std::int64_t iDeltaHatValuationHU(std::int64_t m, std::int64_t e) {
    return 2 * e + 2 * tetValuationHU(m, e);
}

struct VerifyReport {
    bool pass = true;
    int checked = 0;
    std::string detail;
};

namespace detail {

// Product of tetrahedron indices, each pre-shifted so the final result is
// exact to `order` half-units despite negative valuations.
inline HalfExpSeries tetProduct(const std::vector<std::pair<std::int64_t, std::int64_t>>& mes,
                                std::int64_t extraShiftHU, std::int64_t order) {
    std::int64_t totalNeg = std::min<std::int64_t>(extraShiftHU, 0);
    std::vector<std::int64_t> lo(mes.size());
    for (size_t i = 0; i < mes.size(); ++i) {
        lo[i] = std::min<std::int64_t>(tetValuationHU(mes[i].first, mes[i].second), 0);
        totalNeg += lo[i];
    }
    HalfExpSeries r = HalfExpSeries::one(order - totalNeg);
    for (size_t i = 0; i < mes.size(); ++i) {
        std::int64_t need = order - (totalNeg - lo[i]) - std::min<std::int64_t>(extraShiftHU, 0);
        r = r * tetIndexSeries(mes[i].first, mes[i].second, need);
    }
    return r.shifted(1, extraShiftHU).truncated(order);
}

} // namespace detail

// Pentagon identity for the tetrahedron index:
//   I(m1-e2,e1) I(m2-e1,e2)
//     = sum_{e3} q^{e3} I(m1,e1+e3) I(m2,e2+e3) I(m1+m2,e3),
// checked as series to `order` half-units for all |m_i|,|e_i| <= bound.
inline VerifyReport verifyPentagonSeries(std::int64_t bound, std::int64_t order) {
    VerifyReport rep;
    for (std::int64_t m1 = -bound; m1 <= bound; ++m1)
    for (std::int64_t m2 = -bound; m2 <= bound; ++m2)
    for (std::int64_t e1 = -bound; e1 <= bound; ++e1)
    for (std::int64_t e2 = -bound; e2 <= bound; ++e2) {
        HalfExpSeries lhs = detail::tetProduct({{m1 - e2, e1}, {m2 - e1, e2}}, 0, order);
        HalfExpSeries rhs(order);
        auto termBound = [&](std::int64_t e3) {
            return 2 * e3 + tetValuationHU(m1, e1 + e3) + tetValuationHU(m2, e2 + e3) +
                   tetValuationHU(m1 + m2, e3);
        };
        auto addTerm = [&](std::int64_t e3) {
            rhs = rhs + detail::tetProduct({{m1, e1 + e3}, {m2, e2 + e3}, {m1 + m2, e3}},
                                           2 * e3, order);
        };
        // The degree bound eventually grows in both directions; expand the
        // e3 range until a long run of terms falls past the order.
        const int runLen = 25;
        for (std::int64_t e3 = 0, miss = 0; miss < runLen; ++e3) {
            if (termBound(e3) < order) { addTerm(e3); miss = 0; } else ++miss;
        }
        for (std::int64_t e3 = -1, miss = 0; miss < runLen; --e3) {
            if (termBound(e3) < order) { addTerm(e3); miss = 0; } else ++miss;
        }
        ++rep.checked;
        if (!agreeOnOverlap(lhs, rhs)) {
            rep.pass = false;
            rep.detail = "pentagon mismatch at m1=" + std::to_string(m1) +
                         " e1=" + std::to_string(e1) + " m2=" + std::to_string(m2) +
                         " e2=" + std::to_string(e2);
            return rep;
        }
    }
    return rep;
}

// Symmetries of I^tet: the S3 orbit
//   I^tet(m,e) = (-q)^{e+m} I^tet(-e,-m)
//              = (-q)^e     I^tet(-e-m,m)
//              = (-q)^{e+m} I^tet(e,-e-m)
//              =            I^tet(-m,m+e)
inline VerifyReport verifySymmetries(std::int64_t bound, std::int64_t order) {
    VerifyReport rep;
    auto shiftedHat = [&](std::int64_t m, std::int64_t e, std::int64_t k) {
        // (-q)^k * I^tet(m,e)
        HalfExpSeries s = iDeltaHat(m, e, order - 2 * std::min<std::int64_t>(k, 0));
        BigInt sign = (((k % 2) + 2) % 2 == 0) ? 1 : -1;
        return s.shifted(sign, 2 * k).truncated(order);
    };
    for (std::int64_t m = -bound; m <= bound; ++m)
    for (std::int64_t e = -bound; e <= bound; ++e) {
        HalfExpSeries base = iDeltaHat(m, e, order);
        struct Case { std::int64_t m, e, k; const char* name; };
        const Case cases[] = {
            {-e, -m, e + m, "(m,e)->(-e,-m)"},
            {-e - m, m, e, "(m,e)->(-e-m,m)"},
            {e, -e - m, e + m, "(m,e)->(e,-e-m)"},
            {-m, m + e, 0, "(m,e)->(-m,m+e)"},
        };
        for (const Case& c : cases) {
            ++rep.checked;
            if (!agreeOnOverlap(base, shiftedHat(c.m, c.e, c.k))) {
                rep.pass = false;
                rep.detail = std::string("symmetry ") + c.name + " fails at m=" +
                             std::to_string(m) + " e=" + std::to_string(e);
                return rep;
            }
        }
    }
    return rep;
}

} // namespace qindex

#endif
