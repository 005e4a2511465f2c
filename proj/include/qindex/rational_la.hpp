#ifndef QINDEX_RATIONAL_LA_HPP
#define QINDEX_RATIONAL_LA_HPP

#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "errors.hpp"

namespace qindex {

using Rat = boost::multiprecision::cpp_rational;
using RatVec = std::vector<Rat>;
using RatMat = std::vector<RatVec>;
using IntVec = std::vector<boost::multiprecision::cpp_int>;
using IntMat = std::vector<IntVec>;

// Solve A x = b exactly, where each rhs entry is itself a vector over some
// symbol basis (a linear form).  A is square; throws SingularSystem.
// rhs is rows x width; returns solution rows x width.
inline RatMat solveLinearForms(RatMat a, RatMat rhs) {
    const size_t n = a.size();
    for (auto& row : a)
        if (row.size() != n) throw SingularSystem("solveLinearForms: not square");
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        while (piv < n && a[piv][col] == 0) ++piv;
        if (piv == n) throw SingularSystem("solveLinearForms: singular matrix");
        std::swap(a[piv], a[col]);
        std::swap(rhs[piv], rhs[col]);
        Rat d = a[col][col];
        for (size_t j = col; j < n; ++j) a[col][j] /= d;
        for (auto& v : rhs[col]) v /= d;
        for (size_t r = 0; r < n; ++r) {
            if (r == col || a[r][col] == 0) continue;
            Rat f = a[r][col];
            for (size_t j = col; j < n; ++j) a[r][j] -= f * a[col][j];
            for (size_t j = 0; j < rhs[r].size(); ++j) rhs[r][j] -= f * rhs[col][j];
        }
    }
    return rhs;
}

inline size_t rank(RatMat a) {
    size_t rows = a.size();
    if (rows == 0) return 0;
    size_t cols = a[0].size(), r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t piv = r;
        while (piv < rows && a[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(a[piv], a[r]);
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rat f = a[i][c] / a[r][c];
            for (size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
        }
        ++r;
    }
    return r;
}

inline Rat determinant(RatMat a) {
    const size_t n = a.size();
    Rat det = 1;
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        while (piv < n && a[piv][col] == 0) ++piv;
        if (piv == n) return 0;
        if (piv != col) {
            std::swap(a[piv], a[col]);
            det = -det;
        }
        det *= a[col][col];
        for (size_t r = col + 1; r < n; ++r) {
            if (a[r][col] == 0) continue;
            Rat f = a[r][col] / a[col][col];
            for (size_t j = col; j < n; ++j) a[r][j] -= f * a[col][j];
        }
    }
    return det;
}

// Solve the (possibly overdetermined, assumed consistent) system A x = b
// exactly.  Throws SingularSystem if inconsistent or rank-deficient in x.
inline RatVec solveConsistent(RatMat a, RatVec b) {
    size_t rows = a.size();
    size_t cols = rows ? a[0].size() : 0;
    size_t r = 0;
    std::vector<size_t> pivCol;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t piv = r;
        while (piv < rows && a[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(a[piv], a[r]);
        std::swap(b[piv], b[r]);
        Rat d = a[r][c];
        for (size_t j = c; j < cols; ++j) a[r][j] /= d;
        b[r] /= d;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rat f = a[i][c];
            for (size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
            b[i] -= f * b[r];
        }
        pivCol.push_back(c);
        ++r;
    }
    if (r < cols) throw SingularSystem("solveConsistent: rank-deficient system");
    for (size_t i = r; i < rows; ++i)
        if (b[i] != 0) throw SingularSystem("solveConsistent: inconsistent system");
    RatVec x(cols, 0);
    for (size_t i = 0; i < r; ++i) x[pivCol[i]] = b[i];
    return x;
}

// Integer-lattice tools via column reduction with a tracked unimodular
// transform (a column-style Hermite reduction).
struct IntLattice {
    IntMat kernel;       // basis vectors (columns) of {x : M x = 0}
    IntMat reduced;      // H = M U, column echelon
    IntMat u;            // unimodular, M * u = reduced
    std::vector<std::pair<size_t, size_t>> pivots; // (row, col) in reduced
};

inline IntLattice integerLattice(const IntMat& m) {
    using boost::multiprecision::cpp_int;
    size_t rows = m.size();
    size_t cols = rows ? m[0].size() : 0;
    IntMat h = m;
    IntMat u(cols, IntVec(cols, 0));
    for (size_t i = 0; i < cols; ++i) u[i][i] = 1;
    size_t lead = 0;
    IntLattice out;
    for (size_t row = 0; row < rows && lead < cols; ++row) {
        // gcd-eliminate entries h[row][lead..] down to a single pivot
        for (;;) {
            size_t best = cols;
            for (size_t c = lead; c < cols; ++c)
                if (h[row][c] != 0 &&
                    (best == cols || abs(h[row][c]) < abs(h[row][best])))
                    best = c;
            if (best == cols) break; // all zero, no pivot in this row
            if (best != lead) {
                for (size_t r = 0; r < rows; ++r) std::swap(h[r][best], h[r][lead]);
                for (size_t r = 0; r < cols; ++r) std::swap(u[r][best], u[r][lead]);
            }
            bool clean = true;
            for (size_t c = lead + 1; c < cols; ++c) {
                if (h[row][c] == 0) continue;
                cpp_int f = h[row][c] / h[row][lead];
                if (f != 0) {
                    for (size_t r = 0; r < rows; ++r) h[r][c] -= f * h[r][lead];
                    for (size_t r = 0; r < cols; ++r) u[r][c] -= f * u[r][lead];
                }
                if (h[row][c] != 0) clean = false;
            }
            if (clean) break;
        }
        if (h[row][lead] != 0) {
            if (h[row][lead] < 0) {
                for (size_t r = 0; r < rows; ++r) h[r][lead] = -h[r][lead];
                for (size_t r = 0; r < cols; ++r) u[r][lead] = -u[r][lead];
            }
            out.pivots.emplace_back(row, lead);
            ++lead;
        }
    }
    for (size_t c = lead; c < cols; ++c) {
        IntVec v(cols);
        for (size_t r = 0; r < cols; ++r) v[r] = u[r][c];
        out.kernel.push_back(v);
    }
    out.reduced = std::move(h);
    out.u = std::move(u);
    return out;
}

// Particular integer solution of M x = b using a precomputed reduction.
// Returns false if no integer solution exists.
inline bool particularSolution(const IntLattice& lat, const IntMat& m, const IntVec& b,
                               IntVec& x) {
    using boost::multiprecision::cpp_int;
    size_t rows = m.size();
    size_t cols = rows ? m[0].size() : 0;
    IntVec residual = b;
    IntVec y(cols, 0); // coefficients in the reduced basis
    size_t k = 0;
    for (auto [prow, pcol] : lat.pivots) {
        (void)k;
        cpp_int piv = lat.reduced[prow][pcol];
        if (residual[prow] % piv != 0) return false;
        cpp_int f = residual[prow] / piv;
        y[pcol] = f;
        for (size_t r = 0; r < rows; ++r) residual[r] -= f * lat.reduced[r][pcol];
    }
    for (size_t r = 0; r < rows; ++r)
        if (residual[r] != 0) return false;
    x.assign(cols, 0);
    for (size_t c = 0; c < cols; ++c)
        if (y[c] != 0)
            for (size_t r = 0; r < cols; ++r) x[r] += lat.u[r][c] * y[c];
    return true;
}

} // namespace qindex

#endif
