// Command-line front end: q-series computations, state-integral evaluation,
// Fourier/lattice index cross-checks, verification suites, builtin examples.
// Exit codes: 0 ok, 2 usage, 3 malformed input, 4 numeric divergence,
// 5 verification failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <qindex/fixtures.hpp>
#include <qindex/index3d.hpp>

using nlohmann::json;
using namespace qindex;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct VerifyFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Cx parseComplex(const std::string& s) {
    // accepted forms: "0.1", "0.1+0.05i", "0.1-0.05i", "0.05i"
    std::string t;
    for (char c : s)
        if (!isspace((unsigned char)c)) t += c;
    if (t.empty()) throw UsageError("empty complex literal");
    if (t.back() == 'i' || t.back() == 'j') {
        t.pop_back();
        size_t split = t.find_last_of("+-");
        if (split == std::string::npos || split == 0)
            return {0.0, std::stod(t.empty() || t == "+" || t == "-" ? t + "1" : t)};
        // avoid splitting inside an exponent like 1e-3
        while (split != std::string::npos && split > 0 &&
               (t[split - 1] == 'e' || t[split - 1] == 'E'))
            split = t.find_last_of("+-", split - 1);
        if (split == std::string::npos || split == 0) return {0.0, std::stod(t)};
        std::string im = t.substr(split);
        if (im == "+" || im == "-") im += "1";
        return {std::stod(t.substr(0, split)), std::stod(im)};
    }
    return {std::stod(t), 0.0};
}

json cxJson(Cx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

json seriesJson(const HalfExpSeries& s) {
    json terms = json::array();
    for (const auto& [e, c] : s.coeffs()) terms.push_back(json::array({e, c.str()}));
    return json{{"trunc", s.trunc()}, {"terms", terms}};
}

GluingData loadGluing(const std::string& nameOrPath) {
    const auto& reg = builtinGluings();
    auto it = reg.find(nameOrPath);
    if (it != reg.end()) return it->second;
    std::ifstream in(nameOrPath);
    if (!in) throw MalformedInput("no builtin fixture or readable file named " + nameOrPath);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parseGluing(text);
}

void guardQ(Cx q, bool unsafeQ) {
    if (std::abs(q) > 0.3 && !unsafeQ)
        throw UsageError("|q| > 0.3; pass --unsafe-q to proceed");
    if (std::abs(q) >= 1.0) throw MalformedInput("|q| must be < 1");
}

void guardOrder(int order, bool unsafeOrder) {
    if (order > 64 && !unsafeOrder)
        throw UsageError("order > 64 half-units; pass --unsafe-order to proceed");
    if (order < 0) throw UsageError("order must be nonnegative");
}

int threadCount(int flagValue) {
    if (flagValue > 0) return flagValue;
    if (const char* env = std::getenv("QINDEX_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

json reportJson(const VerifyReport& r) {
    return json{{"pass", r.pass}, {"checked", r.checked}, {"detail", r.detail}};
}

json reportJson(const NumericReport& r) {
    return json{{"pass", r.pass}, {"checked", r.checked}, {"maxErr", r.maxErr},
                {"detail", r.detail}};
}

int runVerify(const std::string& suite, Cx q, int order, int bound, int samples, double tol,
              unsigned seed, int threads) {
    json out;
    out["suite"] = suite;
    bool pass = false;
    if (suite == "pentagon-series") {
        auto r = verifyPentagonSeries(bound, order > 0 ? order : 20);
        out["report"] = reportJson(r);
        pass = r.pass;
    } else if (suite == "symmetries") {
        auto r = verifySymmetries(bound, order > 0 ? order : 20);
        out["report"] = reportJson(r);
        pass = r.pass;
    } else if (suite == "dopsum") {
        QContext ctx(q);
        auto r = verifyDopsum(ctx, samples, seed, tol > 0 ? tol : 1e-10);
        out["report"] = reportJson(r);
        pass = r.pass;
    } else if (suite == "psi0") {
        QContext ctx(q);
        auto r = verifyPsi0(ctx, samples, seed, tol > 0 ? tol : 1e-8);
        out["report"] = reportJson(r);
        pass = r.pass;
    } else if (suite == "inversion") {
        QContext ctx(q);
        auto r = verifyInversion(ctx, samples, seed, bound, tol > 0 ? tol : 1e-11);
        out["report"] = reportJson(r);
        pass = r.pass;
    } else if (suite == "pentagon-integral") {
        QContext ctx(q);
        double a = M_PI / 10;
        std::array<std::pair<double, double>, 5> ag = {
            {{a, a}, {2 * a, 2 * a}, {a, 4 * a}, {2 * a, 2 * a}, {a, a}}};
        auto r = verifyPentagonIntegral(ctx, ag, 1, 1, 1, 1, tol > 0 ? tol : 1e-8);
        out["report"] = reportJson(r);
        pass = r.pass;
    } else if (suite == "thm2") {
        QContext ctx(q);
        double worst = 0;
        for (const char* name : {"fig8", "m003"}) {
            GluingData g = builtinGluing(name);
            auto fou = fourierIndex(g, ctx, 2, 2, 32, 1e-10, threads);
            for (int m = -2; m <= 2; ++m)
                for (int e = -2; e <= 2; ++e) {
                    Cx lat = evalHalfExp(ctx, latticeIndex(g, m, e, order > 0 ? order : 36));
                    Cx ref = fou[m + 2][e + 2];
                    worst = std::max(worst,
                                     std::abs(lat - ref) / std::max(1.0, std::abs(ref)));
                }
        }
        pass = worst < (tol > 0 ? tol : 1e-6);
        out["report"] = json{{"pass", pass}, {"maxErr", worst}, {"checked", 50}};
    } else {
        throw UsageError("unknown verify suite: " + suite);
    }
    out["pass"] = pass;
    std::cout << out.dump(2) << "\n";
    if (!pass) throw VerifyFailure("verification suite failed: " + suite);
    return 0;
}

int runExample(const std::string& name, Cx q, double tol, int threads) {
    (void)threads;
    QContext ctx(q);
    json out;
    out["example"] = name;
    out["q"] = cxJson(q);
    std::mt19937 rng(20260826);
    std::uniform_real_distribution<double> ang(0.0, 2 * M_PI);
    if (name == "unknot-cMcabbgds" || name == "unknot") {
        GluingData g = builtinGluing("unknot-cMcabbgds");
        BalancedIntegrand bi = compileIntegrand(g, selectQuad(g));
        double worst = 0;
        for (int i = 0; i < 10; ++i) {
            Cx s = std::polar(1.0, ang(rng)), t = std::polar(1.0, ang(rng));
            Cx v = evalIntegral(bi, ctx, s, t, defaultContour(bi, ctx, s, t), tol).value;
            worst = std::max(worst, std::abs(v));
        }
        out["maxAbs"] = worst;
        out["pass"] = worst < 1e-8;
    } else if (referenceIntegrands().count(name)) {
        GluingData g = builtinGluing(name);
        BalancedIntegrand bi = compileIntegrand(g, selectQuad(g));
        const ReferenceIntegrand& ref = referenceIntegrands().at(name);
        NumericReport r = verifyReferenceMatch(bi, ref, ctx, 20, 20260826,
                                               name == "k6_1" ? 1e-6 : 1e-9);
        out["checked"] = r.checked;
        out["maxErrVsReference"] = r.maxErr;
        out["pass"] = r.pass;
        if (!r.detail.empty()) out["detail"] = r.detail;
        Cx s = std::polar(1.0, ang(rng)), t = std::polar(1.0, ang(rng));
        try {
            Cx value = evalIntegral(bi, ctx, s, t, defaultContour(bi, ctx, s, t), tol).value;
            out["s"] = cxJson(s);
            out["t"] = cxJson(t);
            out["value"] = cxJson(value);
        } catch (const NumericDivergence&) {
            // sample point pinched; the pointwise check above is the verdict
        }
        if (name == "cPcbbbdei") {
            json rays = json::array();
            for (const QRay& r2 : singularityRays(bi)) rays.push_back(r2.str());
            out["singularityRays"] = rays;
        }
    } else {
        throw MalformedInput("no runnable example named " + name);
    }
    std::cout << out.dump(2) << "\n";
    if (!out["pass"].get<bool>()) throw VerifyFailure("example check failed: " + name);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"3D-index state integrals and lattice q-series"};
    app.require_subcommand(1);
    bool unsafeQ = false, unsafeOrder = false;
    int threadsFlag = 0;
    app.add_flag("--unsafe-q", unsafeQ, "allow |q| > 0.3");
    app.add_flag("--unsafe-order", unsafeOrder, "allow order > 64 half-units");
    app.add_option("--threads", threadsFlag, "worker threads (default QINDEX_THREADS or 1)");
    app.fallthrough();

    // tetindex
    auto* cTet = app.add_subcommand("tetindex", "tetrahedron index I(m,e) as a q-series");
    std::int64_t tm = 0, te = 0;
    int tetOrder = 24;
    bool tetHat = false;
    cTet->add_option("m", tm)->required();
    cTet->add_option("e", te)->required();
    cTet->add_option("--order", tetOrder, "truncation in half-units of q");
    cTet->add_flag("--hat", tetHat, "return (-q)^e I(m,e)(q^2) instead");

    // index3d
    auto* cIdx = app.add_subcommand("index3d", "3D-index coefficient by lattice sum");
    std::string idxFixture;
    std::int64_t im = 0, ie = 0;
    int idxOrder = 24, shellCap = 40;
    cIdx->add_option("fixture", idxFixture, "builtin fixture name or gluing JSON path")
        ->required();
    cIdx->add_option("m", im)->required();
    cIdx->add_option("e", ie)->required();
    cIdx->add_option("--order", idxOrder, "truncation in half-units of q");
    cIdx->add_option("--shell-cap", shellCap);

    // integral
    auto* cInt = app.add_subcommand("integral", "evaluate the balanced state integral");
    std::string intFixture, qStr = "0.1", sStr = "1", tStr = "1";
    double intTol = 1e-9;
    cInt->add_option("fixture", intFixture)->required();
    cInt->add_option("--q", qStr);
    cInt->add_option("--s", sStr);
    cInt->add_option("--t", tStr);
    cInt->add_option("--tol", intTol);

    // fourier
    auto* cFou = app.add_subcommand("fourier", "Laurent coefficients of the state integral");
    std::string fouFixture, fqStr = "0.1";
    int mmax = 1, emax = 1, grid = 32;
    double fouTol = 1e-9;
    cFou->add_option("fixture", fouFixture)->required();
    cFou->add_option("--q", fqStr);
    cFou->add_option("--mmax", mmax);
    cFou->add_option("--emax", emax);
    cFou->add_option("--grid", grid);
    cFou->add_option("--tol", fouTol);

    // verify
    auto* cVer = app.add_subcommand("verify", "run a verification suite");
    std::string suite, vqStr = "0.1";
    int vOrder = 0, vBound = 2, vSamples = 100;
    double vTol = 0;
    unsigned vSeed = 20260826;
    cVer->add_option("suite", suite,
                     "pentagon-series | symmetries | dopsum | psi0 | inversion | "
                     "pentagon-integral | thm2")
        ->required();
    cVer->add_option("--q", vqStr);
    cVer->add_option("--order", vOrder, "half-units");
    cVer->add_option("--bound", vBound);
    cVer->add_option("--samples", vSamples);
    cVer->add_option("--tol", vTol);
    cVer->add_option("--seed", vSeed);

    // examples
    auto* cEx = app.add_subcommand("examples", "builtin fixture corpus");
    auto* cExList = cEx->add_subcommand("list", "list builtin fixtures");
    auto* cExRun = cEx->add_subcommand("run", "run a fixture's documented check");
    std::string exName, eqStr = "0.1";
    double exTol = 1e-9;
    cExRun->add_option("name", exName)->required();
    cExRun->add_option("--q", eqStr);
    cExRun->add_option("--tol", exTol);
    cEx->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        int threads = threadCount(threadsFlag);
        if (cTet->parsed()) {
            guardOrder(tetOrder, unsafeOrder);
            HalfExpSeries s = tetHat ? iDeltaHat(tm, te, tetOrder)
                                     : tetIndexSeries(tm, te, tetOrder);
            json out{{"m", tm}, {"e", te}, {"hat", tetHat}, {"series", seriesJson(s)}};
            std::cout << out.dump(2) << "\n";
        } else if (cIdx->parsed()) {
            guardOrder(idxOrder, unsafeOrder);
            GluingData g = loadGluing(idxFixture);
            int shells = 0;
            HalfExpSeries s = latticeIndex(g, im, ie, idxOrder, shellCap, &shells);
            json out{{"m", im},
                     {"e", ie},
                     {"series", seriesJson(s)},
                     {"convention", "angle-weighted"},
                     {"shells", shells}};
            std::cout << out.dump(2) << "\n";
        } else if (cInt->parsed()) {
            Cx q = parseComplex(qStr);
            guardQ(q, unsafeQ);
            QContext ctx(q);
            GluingData g = loadGluing(intFixture);
            BalancedIntegrand bi = compileIntegrand(g, selectQuad(g));
            Cx s = parseComplex(sStr), t = parseComplex(tStr);
            ContourSpec contour = defaultContour(bi, ctx, s, t);
            IntegralResult r = evalIntegral(bi, ctx, s, t, contour, intTol);
            json out{{"value", cxJson(r.value)},
                     {"estErr", r.estErr},
                     {"gridUsed", r.gridUsed},
                     {"contour", json{{"logRadiiQ", contour.logRadiiQ}}},
                     {"warnings", json::array()}};
            std::cout << out.dump(2) << "\n";
        } else if (cFou->parsed()) {
            Cx q = parseComplex(fqStr);
            guardQ(q, unsafeQ);
            QContext ctx(q);
            GluingData g = loadGluing(fouFixture);
            auto tab = fourierIndex(g, ctx, mmax, emax, grid, fouTol, threads);
            json rows = json::array();
            for (int m = -mmax; m <= mmax; ++m) {
                json row = json::array();
                for (int e = -emax; e <= emax; ++e) row.push_back(cxJson(tab[m + mmax][e + emax]));
                rows.push_back(row);
            }
            json out{{"mmax", mmax}, {"emax", emax}, {"grid", grid}, {"coefficients", rows}};
            std::cout << out.dump(2) << "\n";
        } else if (cVer->parsed()) {
            Cx q = parseComplex(vqStr);
            guardQ(q, unsafeQ);
            if (vOrder > 0) guardOrder(vOrder, unsafeOrder);
            return runVerify(suite, q, vOrder, vBound, vSamples, vTol, vSeed, threads);
        } else if (cExList->parsed()) {
            json names = json::array();
            for (const auto& [n, g] : builtinGluings()) names.push_back(n);
            std::cout << json{{"fixtures", names}}.dump(2) << "\n";
        } else if (cExRun->parsed()) {
            Cx q = parseComplex(eqStr);
            guardQ(q, unsafeQ);
            return runExample(exName, q, exTol, threads);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const MalformedInput& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 3;
    } catch (const InconsistentData& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 3;
    } catch (const NumericDivergence& e) {
        std::cerr << "numeric divergence: " << e.what() << "\n";
        return 4;
    } catch (const VerifyFailure& e) {
        std::cerr << e.what() << "\n";
        return 5;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
