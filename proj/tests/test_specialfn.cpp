#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <qindex/specialfn.hpp>

using namespace qindex;
using doctest::Approx;

TEST_CASE("QContext branch: Re log(-q) < 0 and powNegQ at integers") {
    for (Cplx q : {Cplx(0.1), Cplx(0.25), Cplx(0.1, 0.05)}) {
        QContext ctx(q);
        CHECK(ctx.h.real() < 0);
        CHECK(std::abs(powNegQ(ctx, 1.0) - (-q)) < 1e-15);
        CHECK(std::abs(powNegQ(ctx, 2.0) - q * q) < 1e-14);
        CHECK(std::abs(powNegQ(ctx, -1.0) + 1.0 / q) < 1e-14);
    }
    CHECK_THROWS_AS(QContext(Cplx(1.5)), MalformedInput);
    CHECK_THROWS_AS(QContext(Cplx(0.0)), MalformedInput);
}

TEST_CASE("pochhammerInf against exact series evaluation") {
    QContext ctx(Cplx(0.1));
    // (q;q)_infty at q=0.1 from the exact truncated series
    HalfExpSeries s = pochhammerSeries(2, 1, 2, 100);
    Cplx exact = evalHalfExp(ctx, s);
    CHECK(std::abs(pochhammerInf(ctx, ctx.q) - exact) < 1e-14);
    // c(q)
    CHECK(std::abs(cNumeric(ctx) - evalHalfExp(ctx, cSeries(100))) < 1e-14);
}

TEST_CASE("gq functional equations and pole guard") {
    for (Cplx q : {Cplx(0.1), Cplx(0.2), Cplx(0.15, 0.1)}) {
        QContext ctx(q);
        auto rep = verifyGqFunctional(ctx, 200, 42);
        INFO(rep.detail);
        CHECK(rep.pass);
        CHECK(rep.checked > 150);
        CHECK(rep.maxErr < 1e-11);
    }
    QContext ctx(Cplx(0.1));
    CHECK_THROWS_AS(gq(ctx, Cplx(1.0 + 1e-12)), PoleProximity);
    CHECK_THROWS_AS(gq(ctx, Cplx(10.0 * (1 + 1e-12))), PoleProximity);
    CHECK_NOTHROW(gq(ctx, Cplx(0.5)));
}

TEST_CASE("gq zeros sit at -q^{1+N}") {
    QContext ctx(Cplx(0.17));
    CHECK(std::abs(gq(ctx, -ctx.q)) < 1e-13);
    CHECK(std::abs(gq(ctx, -ctx.q * ctx.q)) < 1e-13);
    CHECK(std::abs(gq(ctx, Cplx(0.9))) > 1e-3);
}

TEST_CASE("theta: quasi-periodicity and triple product") {
    for (Cplx q : {Cplx(0.1), Cplx(0.2), Cplx(0.1, 0.05)}) {
        QContext ctx(q);
        auto rep = verifyTheta(ctx, 100, 7);
        INFO(rep.detail);
        CHECK(rep.pass);
        CHECK(rep.maxErr < 1e-10);
    }
}

TEST_CASE("two-term theta identity, both square roots") {
    for (Cplx q : {Cplx(0.1), Cplx(0.2), Cplx(0.1, 0.05)}) {
        QContext ctx(q);
        for (int sign : {+1, -1}) {
            auto rep = verifyDopsum(ctx, 100, 11, 1e-10, sign);
            INFO(rep.detail);
            CHECK(rep.pass);
            CHECK(rep.checked == 100);
        }
    }
}

TEST_CASE("psi matches its product definition and guards its poles") {
    QContext ctx(Cplx(0.15));
    Cplx q2 = ctx.q * ctx.q;
    Cplx z(0.7, 0.3);
    for (std::int64_t m : {-2, 0, 1, 3}) {
        Cplx qa = std::pow(ctx.q, Cplx(double(1 - m)));
        Cplx expect = pochhammerInf(ctx, -qa / z, q2) / pochhammerInf(ctx, -qa * z, q2);
        CHECK(std::abs(psi(ctx, z, m) - expect) == 0.0);
    }
    // pole of psi(.,m) at z = -q^{-1-|m|}
    CHECK_THROWS_AS(psi(ctx, -std::pow(Cplx(0.15), Cplx(-2.0)) * (1.0 + 1e-12), 1),
                    PoleProximity);
}

TEST_CASE("psi0 triality: numeric, Fourier coefficients, triple-J") {
    QContext ctx(Cplx(0.1));
    auto rep = verifyPsi0(ctx, 50, 2024, 1e-8);
    INFO(rep.detail);
    CHECK(rep.pass);
    CHECK(rep.maxErr < 1e-8);
}

TEST_CASE("phi inversion on the unit circle") {
    for (Cplx q : {Cplx(0.1), Cplx(0.2, 0.1)}) {
        QContext ctx(q);
        auto rep = verifyInversion(ctx, 50, 5, 5, 1e-11);
        INFO(rep.detail);
        CHECK(rep.pass);
        CHECK(rep.maxErr < 1e-11);
    }
}

TEST_CASE("psi0 triality at a second nome") {
    QContext ctx(Cplx(0.15));
    auto rep = verifyPsi0(ctx, 5, 31, 1e-8);
    INFO(rep.detail);
    CHECK(rep.pass);
}
