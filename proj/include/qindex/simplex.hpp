#ifndef QINDEX_SIMPLEX_HPP
#define QINDEX_SIMPLEX_HPP

#include <cstddef>
#include <vector>

#include "rational_la.hpp"

namespace qindex {

// Exact rational simplex, two-phase, Bland's rule (deterministic and
// cycle-free).  Solves min c.x subject to A x = b, x >= 0.
struct LpResult {
    enum Status { Optimal, Infeasible, Unbounded } status;
    RatVec x;
    Rat objective;
};

namespace detail {

struct Tableau {
    RatMat a;             // rows x cols
    RatVec b;             // rows
    RatVec cost;          // cols
    Rat shift = 0;        // constant part of the objective
    std::vector<size_t> basis;

    void priceOut() {
        for (size_t r = 0; r < a.size(); ++r) {
            Rat f = cost[basis[r]];
            if (f == 0) continue;
            for (size_t j = 0; j < cost.size(); ++j) cost[j] -= f * a[r][j];
            shift -= f * b[r];
        }
    }

    // returns true when optimal, false when unbounded
    bool iterate() {
        const size_t rows = a.size(), cols = cost.size();
        for (;;) {
            size_t enter = cols;
            for (size_t j = 0; j < cols; ++j)
                if (cost[j] < 0) { enter = j; break; } // Bland: lowest index
            if (enter == cols) return true;
            size_t leave = rows;
            for (size_t r = 0; r < rows; ++r) {
                if (a[r][enter] <= 0) continue;
                if (leave == rows) { leave = r; continue; }
                Rat lhs = b[r] * a[leave][enter];
                Rat rhs = b[leave] * a[r][enter];
                if (lhs < rhs || (lhs == rhs && basis[r] < basis[leave])) leave = r;
            }
            if (leave == rows) return false;
            pivot(leave, enter);
        }
    }

    void pivot(size_t r, size_t c) {
        Rat d = a[r][c];
        for (auto& v : a[r]) v /= d;
        b[r] /= d;
        for (size_t i = 0; i < a.size(); ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rat f = a[i][c];
            for (size_t j = 0; j < a[i].size(); ++j) a[i][j] -= f * a[r][j];
            b[i] -= f * b[r];
        }
        Rat f = cost[c];
        if (f != 0) {
            for (size_t j = 0; j < cost.size(); ++j) cost[j] -= f * a[r][j];
            shift -= f * b[r];
        }
        basis[r] = c;
    }
};

} // namespace detail

inline LpResult solveLp(RatMat a, RatVec b, RatVec c) {
    const size_t rows = a.size();
    const size_t cols = rows ? a[0].size() : c.size();
    for (size_t r = 0; r < rows; ++r)
        if (b[r] < 0) {
            for (auto& v : a[r]) v = -v;
            b[r] = -b[r];
        }
    // phase 1: artificial basis
    detail::Tableau t;
    t.a = a;
    t.b = b;
    t.cost.assign(cols + rows, 0);
    for (size_t r = 0; r < rows; ++r) {
        t.a[r].resize(cols + rows, 0);
        t.a[r][cols + r] = 1;
        t.cost[cols + r] = 1;
        t.basis.push_back(cols + r);
    }
    t.priceOut();
    if (!t.iterate()) throw SingularSystem("solveLp: phase-1 unbounded");
    if (-t.shift != 0) return {LpResult::Infeasible, {}, 0};
    // drive artificials out of the basis where possible
    for (size_t r = 0; r < rows; ++r) {
        if (t.basis[r] < cols) continue;
        size_t enter = cols;
        for (size_t j = 0; j < cols; ++j)
            if (t.a[r][j] != 0) { enter = j; break; }
        if (enter < cols) t.pivot(r, enter);
        // else the row is redundant; keep the zero artificial basic
    }
    // phase 2
    t.cost.assign(cols + rows, 0);
    for (size_t j = 0; j < cols; ++j) t.cost[j] = c[j];
    // forbid artificials from re-entering
    for (size_t r = 0; r < rows; ++r)
        for (size_t j = cols; j < cols + rows; ++j)
            if (t.basis[r] != j) t.a[r][j] = 0; // harmless scrub
    t.shift = 0;
    t.priceOut();
    // artificial columns must not be chosen; give them prohibitive cost 0
    // and zero coefficients (scrubbed above), so Bland never picks them.
    for (size_t j = cols; j < cols + rows; ++j) t.cost[j] = 0;
    if (!t.iterate()) return {LpResult::Unbounded, {}, 0};
    LpResult res;
    res.status = LpResult::Optimal;
    res.x.assign(cols, 0);
    for (size_t r = 0; r < rows; ++r)
        if (t.basis[r] < cols) res.x[t.basis[r]] = t.b[r];
    res.objective = -t.shift;
    // recompute objective directly for safety
    res.objective = 0;
    for (size_t j = 0; j < cols; ++j) res.objective += c[j] * res.x[j];
    return res;
}

} // namespace qindex

#endif
