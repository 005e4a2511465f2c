#ifndef QINDEX_INDEX3D_HPP
#define QINDEX_INDEX3D_HPP

#include <cstdint>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "gluing.hpp"
#include "integrator.hpp"
#include "qseries.hpp"
#include "rational_la.hpp"

namespace qindex {

namespace detail {

// Each term x = (r,s) of the expanded integrand carries the angle prefactor
// (-q)^{L(x)/pi} with L(x) = -sum_i ((alpha_i+gamma_i) s_i + alpha_i r_i).
// On the balanced locus L reduces to m*mu + (e/2)*lambda + j*pi; the pair
// (m,e) labels the Laurent coefficient and (-q)^j weights the term.
struct IndexLattice {
    IntMat m;        // (N+1) x 2N: N-1 edge rows, then the mu and lambda rows
    IntLattice lat;  // kernel rank N-1
    BigInt dMu = 1, dLam = 1; // rhs scales of the last two rows
    RatVec piRow;    // j as a rational functional of (r,s)
    int n;
};

inline IndexLattice buildIndexLattice(const GluingData& g) {
    ReducedAB ab = reducedAB(g);
    QuadSystem quad = selectQuad(g);
    RatMat forms = solveAngleForms(g, quad.choice, quad.droppedRow);
    SymBasis sb{g.n};
    const int n = g.n;
    IndexLattice il;
    il.n = n;
    for (int r = 0; r + 1 < n; ++r) {
        // edge holonomy must vanish: A_r s + B_r (-r-s) = 0; the dropped
        // row is implied since the columns of A and B sum to zero
        IntVec row(2 * n);
        for (int i = 0; i < n; ++i) {
            row[i] = -ab.b[r][i];
            row[n + i] = ab.a[r][i] - ab.b[r][i];
        }
        il.m.push_back(std::move(row));
    }
    auto lrow = [&](int sym) {
        RatVec v(2 * n, 0);
        for (int i = 0; i < n; ++i) {
            v[i] = -forms[3 * i][sym];
            v[n + i] = -(forms[3 * i][sym] + forms[3 * i + 2][sym]);
        }
        return v;
    };
    auto pushScaled = [&](const RatVec& v, BigInt& scale) {
        for (const Rat& x : v) scale = boost::multiprecision::lcm(scale, denominator(x));
        IntVec row(2 * n);
        for (int c = 0; c < 2 * n; ++c) row[c] = numerator(v[c] * Rat(scale));
        il.m.push_back(std::move(row));
    };
    pushScaled(lrow(sb.mu()), il.dMu);
    RatVec lam = lrow(sb.lam());
    for (Rat& x : lam) x *= 2; // e counts half-units of lambda
    pushScaled(lam, il.dLam);
    il.piRow = lrow(sb.pi());
    il.lat = integerLattice(il.m);
    return il;
}

} // namespace detail

// One Laurent coefficient of the state integral as an exact q-series in
// half-integer exponents: the lattice sum of tetrahedron-index products.
inline HalfExpSeries latticeIndex(const GluingData& g, std::int64_t m, std::int64_t e,
                                  int orderHU, int shellCap = 40, int* shellsUsed = nullptr) {
    validateGluing(g);
    if (!findStrictAngles(g, 0, 0))
        throw NoStrictAngles("latticeIndex: no strict angle structure; Laurent expansion "
                             "on the unit torus is not defined");
    detail::IndexLattice il = detail::buildIndexLattice(g);
    const int n = il.n;
    IntVec rhs(n + 1, 0);
    rhs[n - 1] = il.dMu * m;
    rhs[n] = il.dLam * e;
    IntVec x0;
    if (!particularSolution(il.lat, il.m, rhs, x0)) {
        if (shellsUsed) *shellsUsed = 0;
        return HalfExpSeries::zero(orderHU);
    }
    const int kdim = (int)il.lat.kernel.size();
    auto termAt = [&](const std::vector<std::int64_t>& k, HalfExpSeries& acc,
                      bool& any) {
        IntVec u = x0;
        for (int j = 0; j < kdim; ++j)
            for (int c = 0; c < 2 * n; ++c) u[c] += k[j] * il.lat.kernel[j][c];
        Rat jr = 0;
        for (int c = 0; c < 2 * n; ++c) jr += il.piRow[c] * Rat(u[c]);
        if (denominator(jr) != 1)
            throw InconsistentData("latticeIndex: fractional angle weight");
        std::int64_t j = numerator(jr).convert_to<std::int64_t>();
        std::int64_t val = 2 * j, totNeg = std::min<std::int64_t>(2 * j, 0);
        std::vector<std::pair<std::int64_t, std::int64_t>> mes(n);
        for (int i = 0; i < n; ++i) {
            std::int64_t ri = u[i].convert_to<std::int64_t>();
            std::int64_t si = u[n + i].convert_to<std::int64_t>();
            mes[i] = {ri, si};
            std::int64_t v = iDeltaHatValuationHU(ri, si);
            val += v;
            if (v < 0) totNeg += v;
        }
        if (val >= orderHU) return;
        any = true;
        // headroom so that negative-valuation factors do not eat precision
        std::int64_t ord = orderHU - totNeg;
        HalfExpSeries prod = HalfExpSeries::one(ord);
        for (int i = 0; i < n; ++i)
            prod = prod * iDeltaHat(mes[i].first, mes[i].second, ord);
        prod = prod.shifted(j % 2 == 0 ? 1 : -1, 2 * j); // the (-q)^j weight
        acc = acc + prod.truncated(orderHU);
    };
    HalfExpSeries acc = HalfExpSeries::zero(orderHU);
    if (kdim == 0) {
        bool any = false;
        termAt({}, acc, any);
        if (shellsUsed) *shellsUsed = 1;
        return acc;
    }
    int emptyRun = 0;
    for (int radius = 0; radius <= shellCap; ++radius) {
        if (shellsUsed) *shellsUsed = radius + 1;
        bool any = false;
        // l-infinity shell of the given radius
        std::vector<std::int64_t> k(kdim, -radius);
        for (;;) {
            bool onShell = radius == 0;
            for (int j = 0; j < kdim && !onShell; ++j)
                if (std::llabs(k[j]) == radius) onShell = true;
            if (onShell) termAt(k, acc, any);
            int j = 0;
            while (j < kdim && ++k[j] > radius) k[j++] = -radius;
            if (j == kdim) break;
        }
        emptyRun = any ? 0 : emptyRun + 1;
        if (emptyRun >= 2 && radius >= 2) return acc;
        if (radius == shellCap)
            throw NonConvergent("latticeIndex: shell cap reached with contributions still "
                                "arriving; series does not converge");
    }
    return acc;
}

// All Laurent coefficients in a window via one shared evaluation grid of
// the state integral on the unit torus.  Fractional s,t exponents in the
// integrand (principal powers are not single-valued on the circle) are
// handled by sampling on the cover where all exponents become integers.
inline std::vector<std::vector<Cx>> fourierIndex(const GluingData& g, const QContext& ctx,
                                                 int mmax, int emax, int grid,
                                                 double tol = 1e-9, int threads = 1) {
    validateGluing(g);
    BalancedIntegrand bi = compileIntegrand(g, selectQuad(g));
    std::int64_t ds = 1, dt = 1;
    auto lcmIn = [](std::int64_t l, const Rat& r) {
        return std::lcm(l, denominator(r).convert_to<std::int64_t>());
    };
    for (const Factor& f : bi.factors) { ds = lcmIn(ds, f.cMu); dt = lcmIn(dt, f.cLam); }
    for (const Factor& f : bi.constFactors) { ds = lcmIn(ds, f.cMu); dt = lcmIn(dt, f.cLam); }
    BalancedIntegrand bc = bi;
    for (Factor& f : bc.factors) { f.cMu *= ds; f.cLam *= dt; }
    for (Factor& f : bc.constFactors) { f.cMu *= ds; f.cLam *= dt; }
    const int gs = grid * (int)ds, gt = grid * (int)dt;
    std::vector<std::vector<Cx>> ivals(gs, std::vector<Cx>(gt));
    auto evalRows = [&](int a0, int stride) {
        for (int a = a0; a < gs; a += stride)
            for (int b = 0; b < gt; ++b) {
                Cx sig = std::polar(1.0, 2 * M_PI * a / gs);
                Cx tau = std::polar(1.0, 2 * M_PI * b / gt);
                ContourSpec c = defaultContour(bc, ctx, sig, tau);
                ivals[a][b] = evalIntegral(bc, ctx, sig, tau, c, tol).value;
            }
    };
    if (threads <= 1) {
        evalRows(0, 1);
    } else {
        // cells are independent and written to disjoint slots, so the
        // result is bit-identical to the serial order
        std::vector<std::thread> pool;
        std::exception_ptr err;
        std::mutex errMu;
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                try {
                    evalRows(w, threads);
                } catch (...) {
                    std::scoped_lock lk(errMu);
                    if (!err) err = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        if (err) std::rethrow_exception(err);
    }
    std::vector<std::vector<Cx>> out(2 * mmax + 1, std::vector<Cx>(2 * emax + 1));
    for (int m = -mmax; m <= mmax; ++m)
        for (int e = -emax; e <= emax; ++e) {
            // coefficient of s^m t^e = sigma^{ds m} tau^{dt e}
            Cx sum{0.0, 0.0};
            for (int a = 0; a < gs; ++a)
                for (int b = 0; b < gt; ++b) {
                    double ph = -2 * M_PI * (double(ds * m) * a / gs + double(dt * e) * b / gt);
                    sum += ivals[a][b] * std::polar(1.0, ph);
                }
            out[m + mmax][e + emax] = sum / double(gs) / double(gt);
        }
    return out;
}

// Single Laurent coefficient from the analytic side.
inline Cx fourierIndexCoeff(const GluingData& g, const QContext& ctx, int m, int e, int grid,
                            double tol = 1e-9, int threads = 1) {
    int mm = std::abs(m), em = std::abs(e);
    return fourierIndex(g, ctx, mm, em, grid, tol, threads)[m + mm][e + em];
}

// The lattice sum's normalization is fixed by probing the analytic side:
// the (-q)^j weight of each lattice point comes from the pi-part of the
// exact angle functional (tag "angle-weighted").  A probe failure means
// the normalization question is unsettled for this input.
inline std::string resolvePrefactorConvention(const GluingData& g, const QContext& ctx,
                                              int orderHU = 48, double tol = 1e-5) {
    const std::pair<int, int> probes[] = {{0, 0}, {1, 0}, {0, 1}};
    auto probe = fourierIndex(g, ctx, 1, 1, 32, 1e-10);
    double worst = 0;
    for (auto [m, e] : probes) {
        Cx lat = evalHalfExp(ctx, latticeIndex(g, m, e, orderHU));
        Cx fou = probe[m + 1][e + 1];
        worst = std::max(worst, std::abs(lat - fou) / std::max(1.0, std::abs(fou)));
    }
    if (worst < tol) return "angle-weighted";
    throw AmbiguousConvention("lattice sum does not match the analytic Fourier "
                              "coefficients under the angle-weighted convention");
}

} // namespace qindex

#endif
