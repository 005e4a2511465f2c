#ifndef QINDEX_SPECIALFN_HPP
#define QINDEX_SPECIALFN_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "qseries.hpp"

namespace qindex {

using Cplx = std::complex<double>;

// Shared numeric context: the nome, the branch of log(-q) used for
// non-integer powers of (-q), a product-truncation threshold, and the
// relative pole-proximity guard band.
struct QContext {
    Cplx q;
    Cplx h;                      // principal log(-q), Re h < 0
    double epsProduct = 1e-16;
    double guardband = 1e-8;

    explicit QContext(Cplx q_) : q(q_), h(std::log(-q_)) {
        if (!(std::abs(q) > 0.0) || !(std::abs(q) < 1.0))
            throw MalformedInput("QContext: need 0 < |q| < 1");
    }
};

// (-q)^z with the fixed branch exp(z log(-q)).
inline Cplx powNegQ(const QContext& ctx, Cplx z) { return std::exp(z * ctx.h); }

// (x; p)_infty truncated once the tail factors differ from 1 by less than
// epsProduct.  Entire in x; no pole handling needed.
inline Cplx pochhammerInf(const QContext& ctx, Cplx x, Cplx p) {
    double ap = std::abs(p);
    if (!(ap < 1.0)) throw MalformedInput("pochhammerInf: need |p| < 1");
    Cplx r = 1.0;
    Cplx xp = x;
    double ax = std::abs(x);
    for (int k = 0; k < 100000; ++k) {
        if (ax < ctx.epsProduct) break;
        r *= (1.0 - xp);
        xp *= p;
        ax *= ap;
    }
    return r;
}

inline Cplx pochhammerInf(const QContext& ctx, Cplx x) {
    return pochhammerInf(ctx, x, ctx.q);
}

// c(q) = (q;q)_infty^2 / (q^2;q^2)_infty evaluated numerically.
inline Cplx cNumeric(const QContext& ctx) {
    Cplx p1 = pochhammerInf(ctx, ctx.q, ctx.q);
    Cplx p2 = pochhammerInf(ctx, ctx.q * ctx.q, ctx.q * ctx.q);
    return p1 * p1 / p2;
}

namespace detail {

// Relative-distance guard against an enumerated pole locus.
inline void guardAgainst(const QContext& ctx, Cplx z, Cplx pole, const char* who) {
    double d = std::abs(z - pole);
    double s = std::abs(pole);
    if (d < ctx.guardband * (s > 0 ? s : 1.0))
        throw PoleProximity(std::string(who) + ": argument within guard band of a pole");
}

} // namespace detail

// G_q(z) = (-q/z; q)_infty / (z; q)_infty.
// Poles at z in q^{-N} (N = 0,1,2,...), zeros at z in -q^{1+N}.
inline Cplx gq(const QContext& ctx, Cplx z) {
    if (z == 0.0) throw MalformedInput("gq: z = 0 is an essential singularity");
    double az = std::abs(z);
    // enumerate the poles q^{-n} with modulus up to 2|z|
    Cplx pole = 1.0;
    for (;;) {
        detail::guardAgainst(ctx, z, pole, "gq");
        pole /= ctx.q;
        if (std::abs(pole) > 2.0 * az) break;
    }
    return pochhammerInf(ctx, -ctx.q / z) / pochhammerInf(ctx, z);
}

// theta_q(x) = sum_k q^{k^2} x^k  (triple product (q^2;q^2)(-qx;q^2)(-q/x;q^2)).
inline Cplx thetaQ(const QContext& ctx, Cplx x) {
    if (x == 0.0) throw MalformedInput("thetaQ: x = 0");
    double aq = std::abs(ctx.q);
    double ax = std::abs(x);
    Cplx s = 0.0;
    // symmetric truncation: |q^{k^2} x^{+-k}| <= eps
    double lax = std::log(ax);
    double laq = std::log(aq);
    int K = 4;
    while (K * K * laq + K * std::abs(lax) > std::log(ctx.epsProduct)) ++K;
    for (int k = -K; k <= K; ++k)
        s += std::pow(ctx.q, Cplx(double(k * k))) * std::pow(x, Cplx(double(k)));
    return s;
}

// psi(z,m) = (-q^{1-m}/z; q^2)_infty / (-q^{1-m} z; q^2)_infty.
// Poles lie on z in -q^{-1-|m|-2N}.
inline Cplx psi(const QContext& ctx, Cplx z, std::int64_t m) {
    if (z == 0.0) throw MalformedInput("psi: z = 0");
    Cplx q2 = ctx.q * ctx.q;
    Cplx qa = std::pow(ctx.q, Cplx(double(1 - m)));
    double az = std::abs(z);
    Cplx pole = -std::pow(ctx.q, Cplx(double(-1 - std::llabs(m))));
    for (;;) {
        detail::guardAgainst(ctx, z, pole, "psi");
        pole /= q2;
        if (std::abs(pole) > 2.0 * az) break;
    }
    return pochhammerInf(ctx, -qa / z, q2) / pochhammerInf(ctx, -qa * z, q2);
}

// psi0(z,w) = c(q) G_q(-qz) G_q(1/w) G_q(w/z).
inline Cplx psi0(const QContext& ctx, Cplx z, Cplx w) {
    return cNumeric(ctx) * gq(ctx, -ctx.q * z) * gq(ctx, 1.0 / w) * gq(ctx, w / z);
}

// phi_q(z,m) = mu(z,m)/mu(1/z,m) with mu(z,m) = (-q^{1-m} z; q^2)_infty.
inline Cplx phiQ(const QContext& ctx, Cplx z, std::int64_t m) {
    if (z == 0.0) throw MalformedInput("phiQ: z = 0");
    Cplx q2 = ctx.q * ctx.q;
    Cplx qa = std::pow(ctx.q, Cplx(double(1 - m)));
    return pochhammerInf(ctx, -qa * z, q2) / pochhammerInf(ctx, -qa / z, q2);
}

struct NumericReport {
    bool pass = true;
    int checked = 0;
    double maxErr = 0.0;
    std::string detail;
};

// Functional equations of G_q:
//   G_q(q z) = (1 - z)(1 + 1/z) G_q(z),  G_q(-q z) G_q(1/z) = 1.
inline NumericReport verifyGqFunctional(const QContext& ctx, int samples, unsigned seed,
                                        double tol = 1e-11) {
    NumericReport rep;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ang(0.0, 2 * 3.14159265358979323846);
    std::uniform_real_distribution<double> rad(0.3, 1.8);
    for (int i = 0; i < samples; ++i) {
        Cplx z = std::polar(rad(rng), ang(rng));
        try {
            double e1 = std::abs(gq(ctx, ctx.q * z) - (1.0 - z) * (1.0 + 1.0 / z) * gq(ctx, z));
            double e2 = std::abs(gq(ctx, -ctx.q * z) * gq(ctx, 1.0 / z) - 1.0);
            double scale = std::abs(gq(ctx, z)) + 1.0;
            double err = std::max(e1 / scale, e2);
            rep.maxErr = std::max(rep.maxErr, err);
            ++rep.checked;
            if (err > tol) {
                rep.pass = false;
                rep.detail = "G_q functional equation fails at z=(" +
                             std::to_string(z.real()) + "," + std::to_string(z.imag()) + ")";
                return rep;
            }
        } catch (const PoleProximity&) {
            continue; // sample landed in a guard band
        }
    }
    return rep;
}

// theta quasi-periodicity theta_q(q^{2l} x) = q^{-l^2} x^{-l} theta_q(x),
// and the triple-product form.
inline NumericReport verifyTheta(const QContext& ctx, int samples, unsigned seed,
                                 double tol = 1e-10) {
    NumericReport rep;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ang(0.0, 2 * 3.14159265358979323846);
    std::uniform_real_distribution<double> rad(0.5, 2.0);
    Cplx q2 = ctx.q * ctx.q;
    for (int i = 0; i < samples; ++i) {
        Cplx x = std::polar(rad(rng), ang(rng));
        Cplx th = thetaQ(ctx, x);
        for (int l : {-2, -1, 1, 2}) {
            Cplx lhs = thetaQ(ctx, std::pow(ctx.q, Cplx(double(2 * l))) * x);
            Cplx rhs = std::pow(ctx.q, Cplx(double(-l * l))) * std::pow(x, Cplx(double(-l))) * th;
            rep.maxErr = std::max(rep.maxErr, std::abs(lhs - rhs) / (std::abs(rhs) + 1.0));
        }
        Cplx tp = pochhammerInf(ctx, q2, q2) * pochhammerInf(ctx, -ctx.q * x, q2) *
                  pochhammerInf(ctx, -ctx.q / x, q2);
        rep.maxErr = std::max(rep.maxErr, std::abs(th - tp) / (std::abs(th) + 1.0));
        ++rep.checked;
        if (rep.maxErr > tol) {
            rep.pass = false;
            rep.detail = "theta check fails at sample " + std::to_string(i);
            return rep;
        }
    }
    return rep;
}

// Two-term theta identity: with p^2 = q (either square root),
//   theta_q(z w^{-2})/theta_q(z) + w theta_q(q w^2/z)/theta_q(q/z)
//     = ((q;q)/(q^2;q^2)^2) theta_p(p w/z) theta_p(w/p) / theta_p(z/p).
inline NumericReport verifyDopsum(const QContext& ctx, int samples, unsigned seed,
                                  double tol = 1e-10, int rootSign = +1) {
    NumericReport rep;
    Cplx p = std::sqrt(ctx.q) * double(rootSign);
    QContext ctxP(p);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ang(0.0, 2 * 3.14159265358979323846);
    std::uniform_real_distribution<double> rad(0.6, 1.6);
    Cplx q2 = ctx.q * ctx.q;
    Cplx pref = pochhammerInf(ctx, ctx.q, ctx.q) /
                std::pow(pochhammerInf(ctx, q2, q2), 2.0);
    for (int i = 0, attempts = 0; i < samples && attempts < 20 * samples; ++i, ++attempts) {
        Cplx z = std::polar(rad(rng), ang(rng));
        Cplx w = std::polar(rad(rng), ang(rng));
        // resample when a denominator theta gets small (both sides blow up
        // together there and the relative comparison loses meaning)
        if (std::abs(thetaQ(ctx, z)) < 5e-2 || std::abs(thetaQ(ctx, ctx.q / z)) < 5e-2 ||
            std::abs(thetaQ(ctxP, z / p)) < 5e-2) {
            --i;
            continue;
        }
        Cplx lhs = thetaQ(ctx, z / (w * w)) / thetaQ(ctx, z) +
                   w * thetaQ(ctx, ctx.q * w * w / z) / thetaQ(ctx, ctx.q / z);
        Cplx rhs = pref * thetaQ(ctxP, p * w / z) * thetaQ(ctxP, w / p) / thetaQ(ctxP, z / p);
        double err = std::abs(lhs - rhs) / (std::abs(rhs) + 1.0);
        rep.maxErr = std::max(rep.maxErr, err);
        ++rep.checked;
        if (err > tol) {
            rep.pass = false;
            rep.detail = "two-term theta identity fails at sample " + std::to_string(i);
            return rep;
        }
    }
    return rep;
}

// phi_q inversion: phi_q(z,m) phi_q(1/z,-m) = z^m on |z| = 1.
inline NumericReport verifyInversion(const QContext& ctx, int samples, unsigned seed,
                                     std::int64_t mmax = 5, double tol = 1e-11) {
    NumericReport rep;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ang(0.0, 2 * 3.14159265358979323846);
    for (int i = 0; i < samples; ++i) {
        Cplx z = std::polar(1.0, ang(rng));
        for (std::int64_t m = -mmax; m <= mmax; ++m) {
            Cplx lhs = phiQ(ctx, z, m) * phiQ(ctx, 1.0 / z, -m);
            Cplx rhs = std::pow(z, Cplx(double(m)));
            double err = std::abs(lhs - rhs) / (std::abs(rhs) + 1.0);
            rep.maxErr = std::max(rep.maxErr, err);
            ++rep.checked;
            if (err > tol) {
                rep.pass = false;
                rep.detail = "inversion fails at m=" + std::to_string(m);
                return rep;
            }
        }
    }
    return rep;
}

// Numeric evaluation of a half-exponent series at the context nome, using
// the principal square root of q for odd half-units.
inline Cplx evalHalfExp(const QContext& ctx, const HalfExpSeries& s) {
    Cplx sq = std::sqrt(ctx.q);
    Cplx acc = 0.0;
    for (const auto& [e, v] : s.coeffs())
        acc += double(v.convert_to<double>()) * std::pow(sq, Cplx(double(e)));
    return acc;
}

// psi0 as a double Laurent series: psi0(z,w) = sum_{m,e} I^tet(m,e) w^m z^e,
// valid in 1 < |w| < |z| < 1/|q|.  Verifies the numeric psi0 against series
// coefficients extracted by a double Fourier transform on circles in the
// annulus, and against the triple-J convolution
//   c(q) sum_{k1-k3=e, k3-k2=m} (-q)^{k1} J(k1) J(k2) J(k3).
inline NumericReport verifyPsi0(const QContext& ctx, int samples, unsigned seed,
                                double tol = 1e-8, std::int64_t coefWindow = 2,
                                std::int64_t orderHU = 68) {
    NumericReport rep;
    double aq = std::abs(ctx.q);
    double rz = std::pow(aq, -0.62);
    double rw = std::pow(aq, -0.3);
    const int G = 64;
    std::vector<std::vector<Cplx>> grid(G, std::vector<Cplx>(G));
    const double TWO_PI = 2 * 3.14159265358979323846;
    for (int a = 0; a < G; ++a)
        for (int b = 0; b < G; ++b) {
            Cplx z = std::polar(rz, TWO_PI * a / G);
            Cplx w = std::polar(rw, TWO_PI * b / G);
            grid[a][b] = psi0(ctx, z, w);
        }
    // triple-J convolution coefficients, exact
    std::map<std::int64_t, HalfExpSeries> jcache;
    auto jAt = [&](std::int64_t n) -> const HalfExpSeries& {
        auto it = jcache.find(n);
        if (it == jcache.end()) it = jcache.emplace(n, jSeries(n, orderHU)).first;
        return it->second;
    };
    HalfExpSeries cq = cSeries(orderHU);
    for (std::int64_t m = -coefWindow; m <= coefWindow; ++m)
        for (std::int64_t e = -coefWindow; e <= coefWindow; ++e) {
            // Fourier coefficient of w^m z^e
            Cplx acc = 0.0;
            for (int a = 0; a < G; ++a)
                for (int b = 0; b < G; ++b) {
                    Cplx ph = std::polar(1.0, -TWO_PI * (double(e) * a + double(m) * b) / G);
                    acc += grid[a][b] * ph;
                }
            acc /= double(G) * double(G) * std::pow(rz, double(e)) * std::pow(rw, double(m));
            HalfExpSeries hat = iDeltaHat(m, e, orderHU);
            Cplx exact = evalHalfExp(ctx, hat);
            double err = std::abs(acc - exact) / (std::abs(exact) + 1.0);
            rep.maxErr = std::max(rep.maxErr, err);
            ++rep.checked;
            if (err > tol) {
                rep.pass = false;
                rep.detail = "psi0 Fourier coefficient mismatch at m=" + std::to_string(m) +
                             " e=" + std::to_string(e);
                return rep;
            }
            // triple-J convolution: sum over k1 with k3 = k1-e, k2 = k3-m.
            // val_hu J(n) = k0(k0+1) at k0 = max(0,-n) (term degrees are
            // strictly increasing), so the summand valuation bound below is
            // exact and grows in both k1 directions.
            HalfExpSeries conv(orderHU);
            auto jlo = [](std::int64_t n) {
                std::int64_t k0 = std::max<std::int64_t>(0, -n);
                return k0 * (k0 + 1);
            };
            for (std::int64_t k1 = -3 * coefWindow - orderHU; k1 <= 3 * coefWindow + orderHU; ++k1) {
                std::int64_t k3 = k1 - e, k2 = k3 - m;
                if (2 * k1 + jlo(k1) + jlo(k2) + jlo(k3) >= orderHU) continue;
                HalfExpSeries t = jAt(k1) * jAt(k2) * jAt(k3);
                BigInt sgn = (((k1 % 2) + 2) % 2 == 0) ? 1 : -1;
                conv = conv + t.shifted(sgn, 2 * k1).truncated(orderHU);
            }
            conv = (cq * conv).truncated(orderHU);
            if (!agreeOnOverlap(conv, hat)) {
                rep.pass = false;
                rep.detail = "triple-J convolution mismatch at m=" + std::to_string(m) +
                             " e=" + std::to_string(e);
                return rep;
            }
        }
    // random annulus samples: numeric psi0 vs truncated double series.
    // The coefficient valuation vanishes along the rays (m,e) = (-t,0) and
    // (t,-t), so the tail decays only through |w|^{-1} resp. |w/z| there
    // (and through |qz| along (0,t)).  Radii near |q|^{-1/3}, |q|^{-2/3}
    // balance the three rates; the box below leaves ~9 decades of tail.
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ang(0.0, TWO_PI);
    std::uniform_real_distribution<double> uz(0.63, 0.69), uw(0.30, 0.36);
    const std::int64_t mLo = -40, mHi = 40, eLo = -40, eHi = 40;
    std::map<std::pair<std::int64_t, std::int64_t>, Cplx> coefVal;
    for (std::int64_t m = mLo; m <= mHi; ++m)
        for (std::int64_t e = eLo; e <= eHi; ++e)
            coefVal[{m, e}] = (iDeltaHatValuationHU(m, e) >= orderHU)
                                  ? Cplx(0.0)
                                  : evalHalfExp(ctx, iDeltaHat(m, e, orderHU));
    for (int i = 0; i < samples; ++i) {
        Cplx z = std::polar(std::pow(aq, -uz(rng)), ang(rng));
        Cplx w = std::polar(std::pow(aq, -uw(rng)), ang(rng));
        Cplx direct = psi0(ctx, z, w);
        Cplx sum = 0.0;
        for (std::int64_t m = mLo; m <= mHi; ++m)
            for (std::int64_t e = eLo; e <= eHi; ++e)
                sum += coefVal[{m, e}] *
                       std::pow(w, Cplx(double(m))) * std::pow(z, Cplx(double(e)));
        double err = std::abs(direct - sum) / (std::abs(direct) + 1.0);
        rep.maxErr = std::max(rep.maxErr, err);
        ++rep.checked;
        if (err > tol) {
            rep.pass = false;
            rep.detail = "psi0 series evaluation mismatch at sample " + std::to_string(i);
            return rep;
        }
    }
    return rep;
}

} // namespace qindex

#endif
