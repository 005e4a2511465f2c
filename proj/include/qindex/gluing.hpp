#ifndef QINDEX_GLUING_HPP
#define QINDEX_GLUING_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "rational_la.hpp"
#include "simplex.hpp"

namespace qindex {

// Gluing-equation exponents of an ideal triangulation with one cusp.
// rows: n edge rows, then meridian, then longitude; each row has 3n
// entries grouped per tetrahedron as (z, z', z'') exponents.
struct GluingData {
    int n = 0;
    std::vector<std::vector<std::int64_t>> rows; // (n+2) x 3n
    std::string name;

    std::int64_t aBar(int r, int i) const { return rows[r][3 * i]; }
    std::int64_t bBar(int r, int i) const { return rows[r][3 * i + 1]; }
    std::int64_t cBar(int r, int i) const { return rows[r][3 * i + 2]; }
    const std::vector<std::int64_t>& meridian() const { return rows[n]; }
    const std::vector<std::int64_t>& longitude() const { return rows[n + 1]; }
};

inline void validateGluing(const GluingData& g) {
    if (g.n <= 0) throw MalformedInput("gluing: need n >= 1");
    if ((int)g.rows.size() != g.n + 2)
        throw MalformedInput("gluing: need n edge rows plus meridian and longitude");
    for (const auto& r : g.rows)
        if ((int)r.size() != 3 * g.n)
            throw MalformedInput("gluing: row length must be 3n");
    // each tetrahedron has six edge incidences
    for (int i = 0; i < g.n; ++i) {
        std::int64_t s = 0;
        for (int r = 0; r < g.n; ++r) s += g.aBar(r, i) + g.bBar(r, i) + g.cBar(r, i);
        if (s != 6)
            throw InconsistentData("gluing: edge-incidence column sum != 6 at tet " +
                                   std::to_string(i));
    }
}

inline GluingData parseGluing(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw MalformedInput(std::string("gluing: bad JSON: ") + e.what());
    }
    GluingData g;
    if (!j.contains("n") || !j.contains("rows"))
        throw MalformedInput("gluing: need fields n, rows");
    g.n = j["n"].get<int>();
    if (j.contains("name")) g.name = j["name"].get<std::string>();
    for (const auto& row : j["rows"]) {
        std::vector<std::int64_t> r;
        for (const auto& v : row) r.push_back(v.get<std::int64_t>());
        g.rows.push_back(std::move(r));
    }
    validateGluing(g);
    return g;
}

struct ReducedAB {
    IntMat a, b;                  // (n+2) x n: edges, then meridian, longitude
    std::vector<std::int64_t> nu; // parity exponents from eliminating z'
};

// Eliminate z' via z z' z'' = -1: A = Abar - Bbar, B = Cbar - Bbar, with a
// sign (-1)^{sum Bbar row} absorbed into nu.
inline ReducedAB reducedAB(const GluingData& g) {
    validateGluing(g);
    ReducedAB r;
    int rows = g.n + 2;
    r.a.assign(rows, IntVec(g.n, 0));
    r.b.assign(rows, IntVec(g.n, 0));
    r.nu.assign(rows, 0);
    for (int row = 0; row < rows; ++row) {
        std::int64_t parity = 0;
        for (int i = 0; i < g.n; ++i) {
            r.a[row][i] = g.aBar(row, i) - g.bBar(row, i);
            r.b[row][i] = g.cBar(row, i) - g.bBar(row, i);
            parity += g.bBar(row, i);
        }
        r.nu[row] = parity;
    }
    return r;
}

// Per-tetrahedron quad selector: 0,1,2 picks which of (alpha,beta,gamma)
// is the free quad parameter (cyclic rotation of the (z,z',z'') roles).
struct QuadSystem {
    std::vector<int> choice;
    int droppedRow = 0;     // edge row replaced by the meridian
    RatMat aPrime, bPrime;  // (n+1) x n: NZ square block rows + half-longitude
    Rat det;                // determinant of the full 3n x 3n angle system
};

struct AngleStructure {
    std::vector<double> alpha, beta, gamma, eps;
    double mu = 0, lambda = 0;
    bool strict = false;
    double margin = 0;
};

namespace detail {

// Symbol basis for exact angle solves:
// [pi, mu, lambda, eps_0..eps_{n-1}, a_0..a_{n-1}].
struct SymBasis {
    int n;
    int size() const { return 3 + 2 * n; }
    int pi() const { return 0; }
    int mu() const { return 1; }
    int lam() const { return 2; }
    int eps(int r) const { return 3 + r; }
    int quad(int k) const { return 3 + n + k; }
};

// Build and solve the exact 3n x 3n system expressing all angles as linear
// forms over the symbol basis.  Rows: n tet sums, n-1 edge equations
// (dropped row excluded), meridian, longitude, n-1 quad pins (pin n-1
// dropped).  Angles ordered theta[3i + c], c in {alpha,beta,gamma}.
inline RatMat solveAngleForms(const GluingData& g, const std::vector<int>& choice,
                              int droppedRow) {
    const int n = g.n;
    SymBasis sb{n};
    RatMat m(3 * n, RatVec(3 * n, 0));
    RatMat rhs(3 * n, RatVec(sb.size(), 0));
    int row = 0;
    for (int i = 0; i < n; ++i, ++row) {
        m[row][3 * i] = m[row][3 * i + 1] = m[row][3 * i + 2] = 1;
        rhs[row][sb.pi()] = 1;
    }
    for (int r = 0; r < n; ++r) {
        if (r == droppedRow) continue;
        for (int i = 0; i < n; ++i) {
            m[row][3 * i] = g.aBar(r, i);
            m[row][3 * i + 1] = g.bBar(r, i);
            m[row][3 * i + 2] = g.cBar(r, i);
        }
        rhs[row][sb.pi()] = 2;
        rhs[row][sb.eps(r)] = 1;
        ++row;
    }
    for (int which = 0; which < 2; ++which, ++row) {
        const auto& per = which == 0 ? g.meridian() : g.longitude();
        for (int i = 0; i < n; ++i) {
            m[row][3 * i] = per[3 * i];
            m[row][3 * i + 1] = per[3 * i + 1];
            m[row][3 * i + 2] = per[3 * i + 2];
        }
        rhs[row][which == 0 ? sb.mu() : sb.lam()] = 1;
    }
    for (int k = 0; k + 1 < n; ++k, ++row) {
        m[row][3 * k + choice[k]] = 1;
        rhs[row][sb.quad(k)] = 1;
    }
    return solveLinearForms(m, rhs); // throws SingularSystem when singular
}

inline Rat angleSystemDet(const GluingData& g, const std::vector<int>& choice,
                          int droppedRow) {
    const int n = g.n;
    RatMat m(3 * n, RatVec(3 * n, 0));
    int row = 0;
    for (int i = 0; i < n; ++i, ++row)
        m[row][3 * i] = m[row][3 * i + 1] = m[row][3 * i + 2] = 1;
    for (int r = 0; r < n; ++r) {
        if (r == droppedRow) continue;
        for (int i = 0; i < n; ++i) {
            m[row][3 * i] = g.aBar(r, i);
            m[row][3 * i + 1] = g.bBar(r, i);
            m[row][3 * i + 2] = g.cBar(r, i);
        }
        ++row;
    }
    for (int which = 0; which < 2; ++which, ++row) {
        const auto& per = which == 0 ? g.meridian() : g.longitude();
        for (int i = 0; i < 3 * n; ++i) m[row][i] = per[i];
    }
    for (int k = 0; k + 1 < n; ++k, ++row) m[row][3 * k + choice[k]] = 1;
    return determinant(m);
}

// NZ block for a quad choice: per tet, the rotated (z,z',z'') roles give
// columns A_i = col(c) - col(c+1), B_i = col(c+2) - col(c+1).
inline void quadAB(const GluingData& g, const std::vector<int>& choice, int droppedRow,
                   RatMat& aPrime, RatMat& bPrime) {
    const int n = g.n;
    auto colExp = [&](const std::vector<std::int64_t>& row, int i, int c) {
        return row[3 * i + (c % 3)];
    };
    aPrime.assign(n + 1, RatVec(n, 0));
    bPrime.assign(n + 1, RatVec(n, 0));
    int out = 0;
    for (int r = 0; r < n; ++r, ++out) {
        const auto& src = (r == droppedRow) ? g.meridian() : g.rows[r];
        for (int i = 0; i < n; ++i) {
            int c = choice[i];
            aPrime[out][i] = colExp(src, i, c) - colExp(src, i, c + 1);
            bPrime[out][i] = colExp(src, i, c + 2) - colExp(src, i, c + 1);
        }
    }
    for (int i = 0; i < n; ++i) {
        int c = choice[i];
        aPrime[n][i] = Rat(colExp(g.longitude(), i, c) - colExp(g.longitude(), i, c + 1), 2);
        bPrime[n][i] = Rat(colExp(g.longitude(), i, c + 2) - colExp(g.longitude(), i, c + 1), 2);
    }
}

} // namespace detail

// First (lexicographic quad choice, ascending dropped row) making the full
// angle system invertible.
inline QuadSystem selectQuad(const GluingData& g) {
    validateGluing(g);
    const int n = g.n;
    std::vector<int> choice(n, 0);
    for (;;) {
        for (int dropped = 0; dropped < n; ++dropped) {
            Rat det = detail::angleSystemDet(g, choice, dropped);
            if (det != 0) {
                QuadSystem q;
                q.choice = choice;
                q.droppedRow = dropped;
                q.det = det;
                detail::quadAB(g, choice, dropped, q.aPrime, q.bPrime);
                return q;
            }
        }
        int i = n - 1;
        while (i >= 0 && choice[i] == 2) choice[i--] = 0;
        if (i < 0) throw InconsistentData("selectQuad: no invertible quad system found");
        ++choice[i];
    }
}

// Evaluate the exact angle forms at concrete parameter values (radians).
// quadAngles supplies the n-1 free quad parameters (default pi/3 each).
inline AngleStructure solveAngles(const GluingData& g, const QuadSystem& quad, double mu,
                                  double lambda, const std::vector<double>& eps,
                                  const std::vector<double>& quadAngles = {}) {
    const int n = g.n;
    if ((int)eps.size() != n)
        throw MalformedInput("solveAngles: eps must have one entry per edge");
    detail::SymBasis sb{n};
    RatMat forms = detail::solveAngleForms(g, quad.choice, quad.droppedRow);
    const double PI = 3.14159265358979323846;
    std::vector<double> vals(sb.size(), 0);
    vals[sb.pi()] = PI;
    vals[sb.mu()] = mu;
    vals[sb.lam()] = lambda;
    for (int r = 0; r < n; ++r) vals[sb.eps(r)] = eps[r];
    for (int k = 0; k + 1 < n; ++k)
        vals[sb.quad(k)] = quadAngles.empty() ? PI / 3 : quadAngles[k];
    AngleStructure st;
    st.mu = mu;
    st.lambda = lambda;
    st.alpha.resize(n);
    st.beta.resize(n);
    st.gamma.resize(n);
    for (int i = 0; i < n; ++i) {
        double a[3] = {0, 0, 0};
        for (int c = 0; c < 3; ++c)
            for (int s = 0; s < sb.size(); ++s)
                a[c] += forms[3 * i + c][s].convert_to<double>() * vals[s];
        st.alpha[i] = a[0];
        st.beta[i] = a[1];
        st.gamma[i] = a[2];
    }
    // edge imbalance from the definition
    st.eps.assign(n, 0);
    for (int r = 0; r < n; ++r) {
        double s = -2 * PI;
        for (int i = 0; i < n; ++i)
            s += g.aBar(r, i) * st.alpha[i] + g.bBar(r, i) * st.beta[i] +
                 g.cBar(r, i) * st.gamma[i];
        st.eps[r] = s;
    }
    double mn = st.alpha[0];
    for (int i = 0; i < n; ++i)
        mn = std::min({mn, st.alpha[i], st.beta[i], st.gamma[i]});
    st.margin = mn;
    st.strict = mn > 0;
    return st;
}

// Chebyshev-style feasibility: maximize the minimum angle subject to the
// balanced (eps = 0) equations with the given peripheral holonomies, as an
// exact LP.  Returns nullopt when no strict structure exists.
inline std::optional<AngleStructure> findStrictAngles(const GluingData& g, const Rat& muOverPi,
                                                      const Rat& lambdaOverPi) {
    validateGluing(g);
    const int n = g.n;
    // variables (all >= 0): theta_0..theta_{3n-1}, delta, slack u_i (3n)
    const int vTheta = 0, vDelta = 3 * n, vSlack = 3 * n + 1;
    const int nv = 6 * n + 1;
    RatMat a;
    RatVec b;
    auto addRow = [&](RatVec row, Rat rhs) {
        a.push_back(std::move(row));
        b.push_back(std::move(rhs));
    };
    // working in units of pi
    for (int i = 0; i < n; ++i) {
        RatVec row(nv, 0);
        row[vTheta + 3 * i] = row[vTheta + 3 * i + 1] = row[vTheta + 3 * i + 2] = 1;
        addRow(std::move(row), 1);
    }
    for (int r = 0; r + 1 < n; ++r) { // last edge row implied (sum eps = 0)
        RatVec row(nv, 0);
        for (int i = 0; i < n; ++i) {
            row[vTheta + 3 * i] = g.aBar(r, i);
            row[vTheta + 3 * i + 1] = g.bBar(r, i);
            row[vTheta + 3 * i + 2] = g.cBar(r, i);
        }
        addRow(std::move(row), 2);
    }
    for (int which = 0; which < 2; ++which) {
        const auto& per = which == 0 ? g.meridian() : g.longitude();
        RatVec row(nv, 0);
        for (int i = 0; i < 3 * n; ++i) row[vTheta + i] = per[i];
        addRow(std::move(row), which == 0 ? muOverPi : lambdaOverPi);
    }
    for (int i = 0; i < 3 * n; ++i) { // theta_i - delta - u_i = 0
        RatVec row(nv, 0);
        row[vTheta + i] = 1;
        row[vDelta] = -1;
        row[vSlack + i] = -1;
        addRow(std::move(row), 0);
    }
    RatVec cost(nv, 0);
    cost[vDelta] = -1; // maximize delta
    LpResult lp = solveLp(a, b, cost);
    if (lp.status != LpResult::Optimal || lp.x[vDelta] <= 0) return std::nullopt;
    AngleStructure st;
    const double PI = 3.14159265358979323846;
    st.alpha.resize(n);
    st.beta.resize(n);
    st.gamma.resize(n);
    for (int i = 0; i < n; ++i) {
        st.alpha[i] = lp.x[vTheta + 3 * i].convert_to<double>() * PI;
        st.beta[i] = lp.x[vTheta + 3 * i + 1].convert_to<double>() * PI;
        st.gamma[i] = lp.x[vTheta + 3 * i + 2].convert_to<double>() * PI;
    }
    st.eps.assign(n, 0.0);
    st.mu = muOverPi.convert_to<double>() * PI;
    st.lambda = lambdaOverPi.convert_to<double>() * PI;
    st.margin = lp.x[vDelta].convert_to<double>() * PI;
    st.strict = true;
    return st;
}

// One G_q factor of the balanced integrand: argument
//   (-q)^{c0 + cMu*mu/pi + cLam*lambda/(2 pi) + cEps.eps/pi} * s^{cMu} t^{cLam} * y^mono
// (s = (-q)^{mu/pi}, t = (-q)^{lambda/(2pi)} are substituted by the caller).
struct Factor {
    Rat c0, cMu, cLam;
    RatVec cEps;                     // per-edge epsilon coefficients (units eps/pi)
    std::vector<std::int64_t> mono;  // length dim; empty monomial = all zero
    int tet = 0;

    bool isConst() const {
        return std::all_of(mono.begin(), mono.end(), [](std::int64_t v) { return v == 0; });
    }
};

struct BalancedIntegrand {
    int n = 0;     // tetrahedron count = power of c(q)
    int dim = 0;   // integration variables
    std::vector<Factor> factors;       // non-constant monomials, 3n - #const
    std::vector<Factor> constFactors;  // zero monomial
    std::vector<double> refLogRadii;   // contour reference: log|y_i| / log|q|
    std::string name;
};

// Compile the reduced balanced integrand: x_N := 1, then x = (-q)^eta y
// with eta chosen (exactly) to cancel all quad-parameter dependence from
// the prefactor exponents.
inline BalancedIntegrand compileIntegrand(const GluingData& g, const QuadSystem& quad) {
    validateGluing(g);
    const int n = g.n;
    detail::SymBasis sb{n};
    RatMat forms = detail::solveAngleForms(g, quad.choice, quad.droppedRow);
    // column sums of A and B over edge rows must vanish (scaling invariance
    // of the integrand; prerequisite for reducing by x_{n-1})
    for (int i = 0; i < n; ++i) {
        std::int64_t sa = 0, sc = 0, sbb = 0;
        for (int r = 0; r < n; ++r) {
            sa += g.aBar(r, i);
            sbb += g.bBar(r, i);
            sc += g.cBar(r, i);
        }
        if (sa != 2 || sbb != 2 || sc != 2)
            throw InconsistentData("compileIntegrand: column sums of Abar/Bbar/Cbar != 2");
    }
    const int dim = n - 1;
    // unreduced monomials over edges: alpha -> (Cbar-Bbar)_i, beta ->
    // (Abar-Cbar)_i, gamma -> (Bbar-Abar)_i  (columns i)
    auto mono = [&](int i, int c) {
        std::vector<std::int64_t> v(n);
        for (int r = 0; r < n; ++r) {
            std::int64_t ab = g.aBar(r, i), bb = g.bBar(r, i), cb = g.cBar(r, i);
            v[r] = c == 0 ? cb - bb : c == 1 ? ab - cb : bb - ab;
        }
        v.resize(dim); // x_{n-1} := 1
        return v;
    };
    // eta: for each quad symbol a_k solve  V c_k = -(coeff of a_k in theta/pi)
    RatMat v(3 * n, RatVec(dim, 0));
    RatMat rhsEta(3 * n, RatVec(std::max(n - 1, 1), 0));
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < 3; ++c) {
            auto mv = mono(i, c);
            for (int d = 0; d < dim; ++d) v[3 * i + c][d] = mv[d];
            for (int k = 0; k + 1 < n; ++k)
                rhsEta[3 * i + c][k] = -forms[3 * i + c][sb.quad(k)];
        }
    RatMat etaCoef(dim, RatVec(std::max(n - 1, 1), 0)); // eta_d = sum_k etaCoef[d][k] a_k/pi
    for (int k = 0; k + 1 < n; ++k) {
        RatVec col(3 * n);
        for (int f = 0; f < 3 * n; ++f) col[f] = rhsEta[f][k];
        RatVec sol = solveConsistent(v, col);
        for (int d = 0; d < dim; ++d) etaCoef[d][k] = sol[d];
    }
    BalancedIntegrand bi;
    bi.n = n;
    bi.dim = dim;
    bi.name = g.name;
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < 3; ++c) {
            const RatVec& th = forms[3 * i + c];
            Factor f;
            f.tet = i;
            f.mono = mono(i, c);
            f.c0 = th[sb.pi()];
            f.cMu = th[sb.mu()];
            f.cLam = 2 * th[sb.lam()];
            f.cEps.assign(n, 0);
            for (int r = 0; r < n; ++r) f.cEps[r] = th[sb.eps(r)];
            // after x = (-q)^eta y the quad coefficients must cancel exactly
            for (int k = 0; k + 1 < n; ++k) {
                Rat resid = th[sb.quad(k)];
                for (int d = 0; d < dim; ++d) resid += Rat(f.mono[d]) * etaCoef[d][k];
                if (resid != 0)
                    throw SingularSystem("compileIntegrand: eta fails to balance factor");
            }
            (f.isConst() ? bi.constFactors : bi.factors).push_back(std::move(f));
        }
    if ((int)(bi.factors.size() + bi.constFactors.size()) != 3 * n)
        throw InconsistentData("compileIntegrand: factor count != 3n");
    // reference contour: all quad parameters at pi/3
    bi.refLogRadii.assign(dim, 0.0);
    for (int d = 0; d < dim; ++d) {
        Rat eta = 0;
        for (int k = 0; k + 1 < n; ++k) eta += etaCoef[d][k] / 3;
        bi.refLogRadii[d] = -eta.convert_to<double>();
    }
    // invariants: per-tet prefactor triples sum to (1,0,0), monomials to 0
    for (int i = 0; i < n; ++i) {
        Rat s0 = 0, sm = 0, sl = 0;
        std::vector<std::int64_t> sv(dim, 0);
        auto acc = [&](const Factor& f) {
            if (f.tet != i) return;
            s0 += f.c0;
            sm += f.cMu;
            sl += f.cLam;
            for (int d = 0; d < dim; ++d) sv[d] += f.mono[d];
        };
        for (const Factor& f : bi.factors) acc(f);
        for (const Factor& f : bi.constFactors) acc(f);
        bool zero = std::all_of(sv.begin(), sv.end(), [](std::int64_t z) { return z == 0; });
        if (s0 != 1 || sm != 0 || sl != 0 || !zero)
            throw InconsistentData("compileIntegrand: per-tet prefactor sums violated");
    }
    return bi;
}

// A shifted q-ray: the locus  e_mu^r e_lam^s  in  eps * q^{t + N}.
struct QRay {
    Rat r, s, t;
    int eps = +1;

    bool operator==(const QRay& o) const {
        return r == o.r && s == o.s && t == o.t && eps == o.eps;
    }
    std::string str() const {
        auto rs = [](const Rat& x) {
            std::ostringstream os;
            os << x;
            return os.str();
        };
        std::string shift;
        if (eps == -1 || t != 0)
            shift = std::string(eps == -1 ? "-" : "") + "q^" + rs(t) + " ";
        return shift + "Sigma_{" + rs(r) + "," + rs(s) + "}";
    }
};

// Potential singularities of the state integral as shifted q-rays:
// constant prefactors contribute their own pole rays; antiparallel factor
// pairs contribute pinch rays per the one-variable contour lemma.
inline std::vector<QRay> singularityRays(const BalancedIntegrand& bi) {
    std::vector<QRay> rays;
    auto emit = [&](Rat c0, Rat cMu, Rat cLam, std::int64_t g) {
        // condition  (-q)^{c0} s^{cMu} t^{cLam} in q^{-g N}  normalized to
        // e_mu^r e_lam^s in eps q^{t+N}
        QRay qr;
        qr.r = -cMu / g;
        qr.s = -cLam / g;
        Rat u = c0 / g; // tight condition: e_mu^r e_lam^s in (-q)^u q^N
        qr.eps = (boost::multiprecision::denominator(u) == 1 &&
                  boost::multiprecision::numerator(u) % 2 != 0)
                     ? -1
                     : +1;
        // report in scaled-ray form eps q^t Sigma_{r,s}: the shift scales
        // the e_lam coordinate (e_mu when the lam exponent vanishes)
        Rat w = qr.s != 0 ? qr.s : qr.r;
        qr.t = w != 0 ? u / w : u;
        if (std::find(rays.begin(), rays.end(), qr) == rays.end()) rays.push_back(qr);
    };
    for (const Factor& f : bi.constFactors) emit(f.c0, f.cMu, f.cLam, 1);
    auto content = [](const std::vector<std::int64_t>& v) {
        std::int64_t c = 0;
        for (auto x : v) c = std::gcd(c, std::llabs(x));
        return c;
    };
    for (size_t i = 0; i < bi.factors.size(); ++i)
        for (size_t j = 0; j < bi.factors.size(); ++j) {
            const Factor& fp = bi.factors[i]; // positive direction z^{a u}
            const Factor& fn = bi.factors[j]; // negative direction z^{-b u}
            std::int64_t a = content(fp.mono), b = content(fn.mono);
            if (a == 0 || b == 0) continue;
            bool anti = true;
            for (size_t d = 0; d < fp.mono.size(); ++d)
                if (fp.mono[d] * b != -fn.mono[d] * a) anti = false;
            if (!anti) continue;
            // direction sign canonicalization: count each unordered pair once
            if (i > j) continue;
            std::int64_t g = std::gcd(a, b);
            emit(Rat(b) * fp.c0 + Rat(a) * fn.c0, Rat(b) * fp.cMu + Rat(a) * fn.cMu,
                 Rat(b) * fp.cLam + Rat(a) * fn.cLam, g);
        }
    return rays;
}

} // namespace qindex

#endif
