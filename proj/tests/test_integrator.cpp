#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <qindex/fixtures.hpp>
#include <qindex/integrator.hpp>

#include <random>

using namespace qindex;

static QContext mkCtx(Cx q) { return QContext(q); }

TEST_CASE("constant integrand integrates to one") {
    QContext ctx = mkCtx({0.1, 0.0});
    BalancedIntegrand bi;
    bi.n = 0;
    bi.dim = 1;
    ContourSpec c;
    c.radii = {1.0};
    IntegralResult r = evalIntegral(bi, ctx, 1.0, 1.0, c);
    CHECK(std::abs(r.value - Cx(1.0, 0.0)) < 1e-14);
}

TEST_CASE("pinched one-pair integrand diverges as eps -> 0") {
    QContext ctx = mkCtx({0.1, 0.0});
    BalancedIntegrand bi;
    bi.n = 0;
    bi.dim = 1;
    Factor f1;
    f1.mono = {1};
    Factor f2;
    f2.mono = {-1};
    f2.cEps = {1};
    bi.factors = {f1, f2};
    ContourSpec c;
    c.radii = {0.9};
    c.maxGrid = 4096;
    std::vector<std::vector<double>> path = {{0.6}, {0.4}, {0.3}, {0.2}};
    EpsFamilyResult r = evalEpsilonFamily(bi, ctx, 1.0, 1.0, path, c, 1e-8);
    CHECK(r.values.size() == 4);
    CHECK(r.divergent);
    CHECK(r.growthExponent < -0.5);
    // path of length one matches direct evaluation
    EpsFamilyResult one = evalEpsilonFamily(bi, ctx, 1.0, 1.0, {{0.3}}, c, 1e-8);
    IntegralResult direct = evalIntegral(bi, ctx, 1.0, 1.0, c, 1e-8, {0.3});
    CHECK(std::abs(one.values[0] - direct.value) == 0.0);
}

TEST_CASE("compiled fig8 contour valid and conjugation symmetric") {
    QContext ctx = mkCtx({0.1, 0.0});
    const GluingData& g = builtinGluing("fig8");
    BalancedIntegrand bi = compileIntegrand(g, selectQuad(g));
    Cx s = std::polar(1.0, 0.7), t = std::polar(1.0, -0.4);
    ContourSpec c = defaultContour(bi, ctx, s, t);
    IntegralResult r = evalIntegral(bi, ctx, s, t, c, 1e-10);
    ContourSpec cc = defaultContour(bi, ctx, std::conj(s), std::conj(t));
    IntegralResult rc = evalIntegral(bi, ctx, std::conj(s), std::conj(t), cc, 1e-10);
    CHECK(std::abs(rc.value - std::conj(r.value)) <
          1e-10 * std::max(1.0, std::abs(r.value)));
}

TEST_CASE("contour radius independence within clearance band") {
    QContext ctx = mkCtx({0.1, 0.0});
    const GluingData& g = builtinGluing("fig8");
    BalancedIntegrand bi = compileIntegrand(g, selectQuad(g));
    Cx s = std::polar(1.0, 0.3), t = std::polar(1.0, 1.1);
    ContourSpec c = defaultContour(bi, ctx, s, t);
    IntegralResult r0 = evalIntegral(bi, ctx, s, t, c, 1e-11);
    ContourSpec c2 = c;
    c2.radii[0] *= 1.02;
    c2.logRadiiQ[0] = std::log(c2.radii[0]) / std::log(0.1);
    IntegralResult r1 = evalIntegral(bi, ctx, s, t, c2, 1e-11);
    CHECK(std::abs(r1.value - r0.value) < 1e-9 * std::max(1.0, std::abs(r0.value)));
}

TEST_CASE("compiled fig8 matches published reduced form") {
    QContext ctx = mkCtx({0.1, 0.0});
    const GluingData& g = builtinGluing("fig8");
    BalancedIntegrand bi = compileIntegrand(g, selectQuad(g));
    const ReferenceIntegrand& ri = referenceIntegrands().at("fig8");
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(-M_PI, M_PI);
    for (int k = 0; k < 3; ++k) {
        Cx s = std::polar(1.0, U(rng)), t = std::polar(1.0, U(rng));
        CAPTURE(k);
        ContourSpec cc = defaultContour(bi, ctx, s, t);
        IntegralResult rc = evalIntegral(bi, ctx, s, t, cc, 1e-11);
        ContourSpec cr = referenceContour(ri.bi, ctx, s, t, ri.side, ri.ctrMu, ri.ctrLam);
        IntegralResult rr = evalIntegral(ri.bi, ctx, s, t, cr, 1e-11);
        CAPTURE(rc.value);
        CAPTURE(rr.value);
        CHECK(std::abs(rc.value - rr.value) < 1e-9 * std::max(1.0, std::abs(rr.value)));
    }
}

TEST_CASE("unknot integral vanishes") {
    QContext ctx = mkCtx({0.2, 0.0});
    const GluingData& g = builtinGluing("unknot-cMcabbgds");
    BalancedIntegrand bi = compileIntegrand(g, selectQuad(g));
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(-M_PI, M_PI);
    for (int k = 0; k < 10; ++k) {
        Cx s = std::polar(1.0, U(rng)), t = std::polar(1.0, U(rng));
        CAPTURE(k);
        ContourSpec c = defaultContour(bi, ctx, s, t);
        IntegralResult r = evalIntegral(bi, ctx, s, t, c, 1e-10);
        CHECK(std::abs(r.value) < 1e-8);
    }
}

TEST_CASE("pinch detected on a singular ray of cPcbbbdei") {
    QContext ctx = mkCtx({0.1, 0.0});
    const BalancedIntegrand& bi = referenceIntegrands().at("cPcbbbdei").bi;
    // t = -q lies on the ray -q Sigma_{0,1}
    CHECK_THROWS_AS(
        (void)searchContour(bi, ctx, 1.0, -ctx.q, {0.0}, detail::allSidePatterns(1)),
        PinchDetected);
}

TEST_CASE("pentagon integral identity") {
    QContext ctx = mkCtx({0.1, 0.0});
    double a = M_PI / 10;
    auto compat = [](double a0, double a2, double a4, double g0, double g4) {
        std::array<std::pair<double, double>, 5> ag;
        ag[0] = {a0, g0};
        ag[1] = {a0 + a2, g0 + a4};
        ag[2] = {a2, g0 + a4 + a0 + g4};
        ag[3] = {a2 + a4, a0 + g4};
        ag[4] = {a4, g4};
        return ag;
    };
    auto ag = compat(a, a, a, a, a);
    NumericReport r1 = verifyPentagonIntegral(ctx, ag, 1.0, 1.0, 1.0, 1.0);
    CHECK(r1.pass);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> U(-M_PI, M_PI);
    std::uniform_real_distribution<double> A(0.15, 0.4);
    for (int k = 0; k < 5; ++k) {
        CAPTURE(k);
        Cx x = std::polar(1.0, U(rng)), y = std::polar(1.0, U(rng));
        Cx u = std::polar(1.0, U(rng)), v = std::polar(1.0, U(rng));
        auto agr = compat(A(rng), A(rng), A(rng), A(rng), A(rng));
        NumericReport r = verifyPentagonIntegral(ctx, agr, x, y, u, v);
        CAPTURE(r.maxErr);
        CHECK(r.pass);
    }
    // incompatible angles rejected
    auto bad = compat(a, a, a, a, a);
    bad[1].first += 0.01;
    CHECK_THROWS_AS(verifyPentagonIntegral(ctx, bad, 1.0, 1.0, 1.0, 1.0), MalformedInput);
}
