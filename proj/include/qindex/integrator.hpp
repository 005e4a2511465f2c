#ifndef QINDEX_INTEGRATOR_HPP
#define QINDEX_INTEGRATOR_HPP

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "errors.hpp"
#include "gluing.hpp"
#include "specialfn.hpp"

namespace qindex {

using Cx = std::complex<double>;

// Product-torus contour.  radii are |y_i|; logRadiiQ the same in units of
// log|q| (radius = |q|^rho).
struct ContourSpec {
    std::vector<double> radii;
    std::vector<double> logRadiiQ;
    double guardband = 0.01;
    int maxGrid = 0; // 0: pick by dimension
};

struct IntegralResult {
    Cx value{0.0, 0.0};
    double estErr = 0;
    int gridUsed = 0;
};

namespace detail {

inline double sigmaQ(const QContext& ctx, Cx x) {
    return std::log(std::abs(x)) / std::log(std::abs(ctx.q));
}

// modulus exponent of a factor argument on the contour, in units of log|q|
inline double factorU(const QContext& ctx, const Factor& f, Cx s, Cx t,
                      const std::vector<double>& rho, const std::vector<double>& eps = {}) {
    double u = f.c0.convert_to<double>() + f.cMu.convert_to<double>() * sigmaQ(ctx, s) +
               f.cLam.convert_to<double>() * sigmaQ(ctx, t);
    for (size_t d = 0; d < f.mono.size(); ++d) u += double(f.mono[d]) * rho[d];
    for (size_t r = 0; r < eps.size(); ++r)
        u += f.cEps.size() > r ? f.cEps[r].convert_to<double>() * eps[r] / M_PI : 0.0;
    return u;
}

// distance from u to the pole exponents {0,-1,-2,...} of G_q
inline double poleClearance(double u) {
    if (u >= 0) return u;
    return std::abs(u - std::round(u));
}

inline double minClearance(const QContext& ctx, const BalancedIntegrand& bi, Cx s, Cx t,
                           const std::vector<double>& rho) {
    double c = 1e100;
    for (const Factor& f : bi.factors) c = std::min(c, poleClearance(factorU(ctx, f, s, t, rho)));
    return c;
}

// complex argument of a factor at a contour point given by phase indices
inline Cx factorBase(const QContext& ctx, const Factor& f, Cx s, Cx t,
                     const std::vector<double>& radii, const std::vector<double>& eps = {}) {
    Cx a = powNegQ(ctx, f.c0.convert_to<double>());
    a *= std::pow(s, Cx(f.cMu.convert_to<double>()));
    a *= std::pow(t, Cx(f.cLam.convert_to<double>()));
    for (size_t d = 0; d < f.mono.size(); ++d)
        if (f.mono[d] != 0) a *= std::pow(radii[d], double(f.mono[d]));
    for (size_t r = 0; r < eps.size(); ++r)
        if (f.cEps.size() > r && f.cEps[r] != 0)
            a *= powNegQ(ctx, f.cEps[r].convert_to<double>() * eps[r] / M_PI);
    return a;
}

// poles of opposing factor pairs collide when S^b T^a lands in
// q^{-aN-bN}; there the contour is pinched for any radius choice
inline void pinchCheck(const BalancedIntegrand& bi, const QContext& ctx, Cx s, Cx t,
                       double guardband = 1e-6) {
    auto content = [](const std::vector<std::int64_t>& v) {
        std::int64_t c = 0;
        for (auto x : v) c = std::gcd(c, std::llabs(x));
        return c;
    };
    for (size_t i = 0; i < bi.factors.size(); ++i)
        for (size_t j = i + 1; j < bi.factors.size(); ++j) {
            const Factor& fp = bi.factors[i];
            const Factor& fn = bi.factors[j];
            std::int64_t a = content(fp.mono), b = content(fn.mono);
            if (a == 0 || b == 0) continue;
            bool anti = true;
            for (size_t d = 0; d < fp.mono.size(); ++d)
                if (fp.mono[d] * b != -fn.mono[d] * a) anti = false;
            if (!anti) continue;
            Cx sp = detail::factorBase(ctx, fp, s, t, std::vector<double>(bi.dim, 1.0));
            Cx tn = detail::factorBase(ctx, fn, s, t, std::vector<double>(bi.dim, 1.0));
            Cx c = std::pow(sp, double(b)) * std::pow(tn, double(a));
            // walk q^{-an-bm} values with modulus near |c|
            double lq = std::log(std::abs(ctx.q));
            double u = std::log(std::abs(c)) / lq; // c ~ q^u, pinch at u <= 0
            if (u > 0.5) continue;
            for (std::int64_t n = 0; n * a <= -u + 1; ++n)
                for (std::int64_t mm = 0; n * a + mm * b <= -u + 1; ++mm) {
                    Cx p = std::pow(ctx.q, -double(n * a + mm * b));
                    if (std::abs(c - p) < guardband * std::abs(p))
                        throw PinchDetected("opposing pole families collide on a q-ray");
                }
        }
}

} // namespace detail

// Contour at the given center log-radii, trying the listed side patterns
// (offsets side*delta per variable) with a deterministic delta sweep.
// Deformations never cross a pole locus, preserving the homotopy class of
// the centered contour.
inline ContourSpec searchContour(const BalancedIntegrand& bi, const QContext& ctx, Cx s, Cx t,
                                 const std::vector<double>& center,
                                 const std::vector<std::vector<int>>& sidePatterns,
                                 double guardband = 0.01) {
    const int dim = bi.dim;
    // constant prefactors cannot be fixed by contour choice
    for (const Factor& f : bi.constFactors) {
        try {
            (void)gq(ctx, detail::factorBase(ctx, f, s, t, std::vector<double>(dim, 1.0)));
        } catch (const PoleProximity& e) {
            throw PinchDetected(std::string("constant prefactor on a pole: ") + e.what());
        }
    }
    detail::pinchCheck(bi, ctx, s, t);
    auto crossesPole = [&](const std::vector<double>& rho) {
        for (const Factor& f : bi.factors) {
            double u0 = detail::factorU(ctx, f, s, t, center);
            double u1 = detail::factorU(ctx, f, s, t, rho);
            double lo = std::min(u0, u1), hi = std::max(u0, u1);
            for (double p = 0; p >= lo - 1; p -= 1)
                if (p > lo + 1e-9 && p < hi - 1e-9) return true;
        }
        return false;
    };
    const double deltas[] = {0.05, 0.1, 0.2, 0.025, 0.0125, 0.00625, 0.003125};
    double lq = std::log(std::abs(ctx.q));
    for (double delta : deltas)
        for (const auto& sides : sidePatterns) {
            std::vector<double> rho(dim);
            for (int d = 0; d < dim; ++d) rho[d] = center[d] + sides[d] * delta;
            if (detail::minClearance(ctx, bi, s, t, rho) >= guardband && !crossesPole(rho)) {
                ContourSpec c;
                c.logRadiiQ = rho;
                c.radii.resize(dim);
                for (int d = 0; d < dim; ++d) c.radii[d] = std::exp(rho[d] * lq);
                c.guardband = guardband;
                return c;
            }
        }
    throw PinchDetected("no contour clears the pole loci (pinched integrand)");
}

namespace detail {

inline std::vector<std::vector<int>> allSidePatterns(int dim) {
    std::vector<std::vector<int>> pats;
    pats.push_back(std::vector<int>(dim, 0));
    for (int mask = 0; mask < (1 << dim); ++mask) {
        std::vector<int> p(dim);
        for (int d = 0; d < dim; ++d) p[d] = (mask >> d) & 1 ? -1 : +1;
        pats.push_back(std::move(p));
    }
    return pats;
}

} // namespace detail

// Contour for a compiled integrand, centered at its reference log-radii.
inline ContourSpec defaultContour(const BalancedIntegrand& bi, const QContext& ctx, Cx s, Cx t) {
    return searchContour(bi, ctx, s, t, bi.refLogRadii, detail::allSidePatterns(bi.dim));
}

// Contour for a published reference form: center offset by the s,t powers
// baked into its coordinates, side of the unit torus pinned.
inline ContourSpec referenceContour(const BalancedIntegrand& bi, const QContext& ctx, Cx s, Cx t,
                                    const std::vector<int>& side, const std::vector<double>& ctrMu,
                                    const std::vector<double>& ctrLam) {
    std::vector<double> center(bi.dim);
    for (int d = 0; d < bi.dim; ++d)
        center[d] = -ctrMu[d] * detail::sigmaQ(ctx, s) - ctrLam[d] * detail::sigmaQ(ctx, t);
    return searchContour(bi, ctx, s, t, center, {side});
}

// Iterated trapezoid rule over the product torus; doubles points per
// dimension from 16 until the successive change is below tol.
inline IntegralResult evalIntegral(const BalancedIntegrand& bi, const QContext& ctx, Cx s, Cx t,
                                   const ContourSpec& contour, double tol = 1e-9,
                                   const std::vector<double>& eps = {}) {
    const int dim = bi.dim;
    int maxGrid = contour.maxGrid > 0 ? contour.maxGrid
                  : dim <= 1         ? 1024
                  : dim == 2         ? 512
                                     : 256;
    Cx pre = std::pow(cNumeric(ctx), bi.n);
    for (const Factor& f : bi.constFactors)
        pre *= gq(ctx, detail::factorBase(ctx, f, s, t, std::vector<double>(std::max(dim, 1), 1.0),
                                          eps));
    if (dim == 0) return {pre, 0.0, 1};
    Cx prev{0.0, 0.0};
    bool havePrev = false;
    for (int n = 16; n <= maxGrid; n *= 2) {
        // each factor takes only n distinct values on the grid
        std::vector<std::vector<Cx>> table(bi.factors.size(), std::vector<Cx>(n));
        for (size_t fi = 0; fi < bi.factors.size(); ++fi) {
            Cx base = detail::factorBase(ctx, bi.factors[fi], s, t, contour.radii, eps);
            for (int j = 0; j < n; ++j) {
                Cx w = std::polar(1.0, 2 * M_PI * j / n);
                table[fi][j] = gq(ctx, base * w);
            }
        }
        // mean over the grid of the factor product, phases via mono dot k
        Cx sum{0.0, 0.0};
        std::vector<int> k(dim, 0);
        for (;;) {
            Cx p{1.0, 0.0};
            for (size_t fi = 0; fi < bi.factors.size(); ++fi) {
                long long ph = 0;
                for (int d = 0; d < dim; ++d) ph += bi.factors[fi].mono[d] * k[d];
                ph %= n;
                if (ph < 0) ph += n;
                p *= table[fi][ph];
            }
            sum += p;
            int d = 0;
            while (d < dim && ++k[d] == n) k[d++] = 0;
            if (d == dim) break;
        }
        Cx val = pre * sum / std::pow(double(n), dim);
        if (havePrev) {
            double change = std::abs(val - prev);
            if (change <= tol * std::max(1.0, std::abs(val)))
                return {val, change, n};
        }
        prev = val;
        havePrev = true;
    }
    throw NoConvergence("evalIntegral: grid cap reached without convergence");
}

// psi^0 with its contour rotated into the convergence domain by a
// pre-angle structure (alpha, gamma), via the G_q product form.
inline Cx psi0ac(const QContext& ctx, double alpha, double gamma, Cx z, Cx w) {
    double beta = M_PI - alpha - gamma;
    return cNumeric(ctx) * gq(ctx, z * powNegQ(ctx, beta / M_PI)) *
           gq(ctx, powNegQ(ctx, alpha / M_PI) / w) *
           gq(ctx, w / z * powNegQ(ctx, gamma / M_PI));
}

// Non-constant beta pentagon identity: five compatible pre-angle
// structures, LHS a product, RHS a circle integral in z.
inline NumericReport verifyPentagonIntegral(const QContext& ctx,
                                            const std::array<std::pair<double, double>, 5>& ag,
                                            Cx x, Cx y, Cx u, Cx v, double tol = 1e-8) {
    auto [a0, g0] = ag[0];
    auto [a1, g1] = ag[1];
    auto [a2, g2] = ag[2];
    auto [a3, g3] = ag[3];
    auto [a4, g4] = ag[4];
    auto near = [](double p, double r) { return std::abs(p - r) < 1e-12; };
    if (!near(a1, a0 + a2) || !near(a3, a2 + a4) || !near(g1, g0 + a4) ||
        !near(g3, a0 + g4) || !near(g2, g1 + g3))
        throw MalformedInput("verifyPentagonIntegral: angles not compatible");
    for (auto [a, g] : ag)
        if (a <= 0 || g <= 0 || a + g >= M_PI)
            throw MalformedInput("verifyPentagonIntegral: need positive pre-angles");
    Cx lhs = psi0ac(ctx, a3, g3, x, y) * psi0ac(ctx, a1, g1, u, v);
    Cx rhs{0.0, 0.0};
    Cx prev{0.0, 0.0};
    bool done = false;
    for (int n = 16; n <= 4096 && !done; n *= 2) {
        Cx sum{0.0, 0.0};
        for (int j = 0; j < n; ++j) {
            Cx z = std::polar(1.0, 2 * M_PI * j / n);
            sum += psi0ac(ctx, a0, g0, u / y, v / z) * psi0ac(ctx, a2, g2, x * u * z / (y * v), z) *
                   psi0ac(ctx, a4, g4, x / v, y / z);
        }
        rhs = sum / double(n);
        if (n > 16 && std::abs(rhs - prev) <= 1e-12 * std::max(1.0, std::abs(rhs))) done = true;
        prev = rhs;
    }
    NumericReport rep;
    rep.checked = 1;
    rep.maxErr = std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
    rep.pass = rep.maxErr < tol;
    if (!rep.pass) rep.detail = "pentagon integral mismatch";
    return rep;
}

struct EpsFamilyResult {
    std::vector<Cx> values;
    double growthExponent = 0; // slope of log|I| vs log eps-scale
    bool divergent = false;
};

// Evaluate along a path of edge-imbalance values eps -> 0 and fit the
// growth; diagnostics only (no residue corrections applied).
inline EpsFamilyResult evalEpsilonFamily(const BalancedIntegrand& bi, const QContext& ctx, Cx s,
                                         Cx t, const std::vector<std::vector<double>>& epsPath,
                                         const ContourSpec& contour, double tol = 1e-9) {
    EpsFamilyResult r;
    std::vector<double> lx, ly;
    for (const auto& eps : epsPath) {
        IntegralResult ir = evalIntegral(bi, ctx, s, t, contour, tol, eps);
        r.values.push_back(ir.value);
        double scale = 0;
        for (double e : eps) scale = std::max(scale, std::abs(e));
        if (scale > 0 && std::abs(ir.value) > 0) {
            lx.push_back(std::log(scale));
            ly.push_back(std::log(std::abs(ir.value)));
        }
    }
    if (lx.size() >= 2) {
        double n = lx.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (size_t i = 0; i < lx.size(); ++i) {
            sx += lx[i];
            sy += ly[i];
            sxx += lx[i] * lx[i];
            sxy += lx[i] * ly[i];
        }
        r.growthExponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        r.divergent = r.growthExponent < -0.5;
    }
    return r;
}

} // namespace qindex

#endif
