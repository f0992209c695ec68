#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "lnum/errors.hpp"

namespace lnum {

// Small dense linear programs: maximize c.x subject to sparse rows with
// relation '<' (<=), '=' or '>' (>=), and x >= 0. Sized for the capacity
// polytopes here (tens of variables), not for anything big.
struct LinProg {
  struct Row {
    std::vector<std::pair<int, double>> coef;
    char rel = '<';
    double rhs = 0.0;
  };
  int nvars = 0;
  std::vector<double> objective;  // empty = feasibility only
  std::vector<Row> rows;

  int add_var(double obj = 0.0) {
    objective.resize(static_cast<std::size_t>(nvars), 0.0);
    objective.push_back(obj);
    return nvars++;
  }
  void add_row(std::vector<std::pair<int, double>> coef, char rel, double rhs) {
    rows.push_back(Row{std::move(coef), rel, rhs});
  }
};

struct LpResult {
  enum class Status { Optimal, Infeasible, Unbounded };
  Status status = Status::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
};

// Two-phase primal simplex, dense tableau, Dantzig pricing with a Bland
// fallback for anti-cycling.
inline LpResult lp_solve(const LinProg& lp) {
  const double tol = 1e-9;
  const int m = static_cast<int>(lp.rows.size());
  const int n = lp.nvars;

  // column layout: [structural | slack/surplus | artificial]
  int nslack = 0, nart = 0;
  for (const auto& r : lp.rows) {
    bool flip = r.rhs < 0.0;
    char rel = r.rel;
    if (flip) rel = (rel == '<') ? '>' : (rel == '>') ? '<' : '=';
    if (rel != '=') ++nslack;
    if (rel != '<') ++nart;
  }
  const int cols = n + nslack + nart;

  std::vector<std::vector<double>> a(static_cast<std::size_t>(m),
                                     std::vector<double>(static_cast<std::size_t>(cols), 0.0));
  std::vector<double> b(static_cast<std::size_t>(m), 0.0);
  std::vector<int> basis(static_cast<std::size_t>(m), -1);
  std::vector<char> artificial(static_cast<std::size_t>(cols), 0);
  std::vector<char> active(static_cast<std::size_t>(m), 1);

  int slack_at = n, art_at = n + nslack;
  for (int i = 0; i < m; ++i) {
    const auto& r = lp.rows[static_cast<std::size_t>(i)];
    double sgn = r.rhs < 0.0 ? -1.0 : 1.0;
    char rel = r.rel;
    if (sgn < 0.0) rel = (rel == '<') ? '>' : (rel == '>') ? '<' : '=';
    for (auto [j, v] : r.coef) {
      if (j < 0 || j >= n) throw InternalError("lp row references unknown variable");
      a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += sgn * v;
    }
    b[static_cast<std::size_t>(i)] = sgn * r.rhs;
    if (rel == '<') {
      a[static_cast<std::size_t>(i)][static_cast<std::size_t>(slack_at)] = 1.0;
      basis[static_cast<std::size_t>(i)] = slack_at++;
    } else if (rel == '>') {
      a[static_cast<std::size_t>(i)][static_cast<std::size_t>(slack_at)] = -1.0;
      ++slack_at;
      artificial[static_cast<std::size_t>(art_at)] = 1;
      a[static_cast<std::size_t>(i)][static_cast<std::size_t>(art_at)] = 1.0;
      basis[static_cast<std::size_t>(i)] = art_at++;
    } else {
      artificial[static_cast<std::size_t>(art_at)] = 1;
      a[static_cast<std::size_t>(i)][static_cast<std::size_t>(art_at)] = 1.0;
      basis[static_cast<std::size_t>(i)] = art_at++;
    }
  }

  std::vector<double> zrow(static_cast<std::size_t>(cols), 0.0);
  double zval = 0.0;

  auto pivot = [&](int pr, int pc) {
    auto& prow = a[static_cast<std::size_t>(pr)];
    double pv = prow[static_cast<std::size_t>(pc)];
    for (double& v : prow) v /= pv;
    b[static_cast<std::size_t>(pr)] /= pv;
    for (int i = 0; i < m; ++i) {
      if (i == pr || !active[static_cast<std::size_t>(i)]) continue;
      double f = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(pc)];
      if (std::abs(f) < 1e-14) continue;
      auto& row = a[static_cast<std::size_t>(i)];
      for (int j = 0; j < cols; ++j) row[static_cast<std::size_t>(j)] -= f * prow[static_cast<std::size_t>(j)];
      b[static_cast<std::size_t>(i)] -= f * b[static_cast<std::size_t>(pr)];
      if (b[static_cast<std::size_t>(i)] < 0.0 && b[static_cast<std::size_t>(i)] > -1e-11)
        b[static_cast<std::size_t>(i)] = 0.0;
    }
    double f = zrow[static_cast<std::size_t>(pc)];
    if (std::abs(f) > 1e-14) {
      for (int j = 0; j < cols; ++j) zrow[static_cast<std::size_t>(j)] -= f * prow[static_cast<std::size_t>(j)];
      zval -= f * b[static_cast<std::size_t>(pr)];
    }
    basis[static_cast<std::size_t>(pr)] = pc;
  };

  // iterate to optimality for the objective currently loaded in zrow;
  // `blocked` columns may never enter. Returns false on unbounded.
  auto run = [&](const std::vector<char>& blocked) -> bool {
    long iters = 0;
    const long bland_after = 2000;
    while (true) {
      ++iters;
      if (iters > 200000) throw InternalError("simplex iteration limit");
      int enter = -1;
      if (iters <= bland_after) {
        double best = -tol;
        for (int j = 0; j < cols; ++j)
          if (!blocked[static_cast<std::size_t>(j)] && zrow[static_cast<std::size_t>(j)] < best) {
            best = zrow[static_cast<std::size_t>(j)];
            enter = j;
          }
      } else {
        for (int j = 0; j < cols; ++j)
          if (!blocked[static_cast<std::size_t>(j)] && zrow[static_cast<std::size_t>(j)] < -tol) {
            enter = j;
            break;
          }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        if (!active[static_cast<std::size_t>(i)]) continue;
        double aij = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(enter)];
        if (aij > tol) {
          double ratio = b[static_cast<std::size_t>(i)] / aij;
          if (ratio < best_ratio - 1e-12 ||
              (ratio < best_ratio + 1e-12 &&
               (leave < 0 || basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)]))) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  };

  // Phase 1: maximize -(sum of artificials)
  std::vector<char> none(static_cast<std::size_t>(cols), 0);
  for (int j = 0; j < cols; ++j)
    zrow[static_cast<std::size_t>(j)] = artificial[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
  zval = 0.0;
  for (int i = 0; i < m; ++i) {
    if (!artificial[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])]) continue;
    const auto& row = a[static_cast<std::size_t>(i)];
    for (int j = 0; j < cols; ++j) zrow[static_cast<std::size_t>(j)] -= row[static_cast<std::size_t>(j)];
    zval -= b[static_cast<std::size_t>(i)];
  }
  if (!run(none)) throw InternalError("phase-1 simplex unbounded");

  LpResult result;
  if (zval < -1e-7) {
    result.status = LpResult::Status::Infeasible;
    return result;
  }

  // pivot remaining artificials out of the basis, drop redundant rows
  for (int i = 0; i < m; ++i) {
    if (!active[static_cast<std::size_t>(i)]) continue;
    if (!artificial[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])]) continue;
    int col = -1;
    for (int j = 0; j < n + nslack; ++j)
      if (std::abs(a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) > 1e-7) {
        col = j;
        break;
      }
    if (col >= 0)
      pivot(i, col);
    else
      active[static_cast<std::size_t>(i)] = 0;
  }

  // Phase 2
  std::vector<double> c2(static_cast<std::size_t>(cols), 0.0);
  for (int j = 0; j < n && j < static_cast<int>(lp.objective.size()); ++j)
    c2[static_cast<std::size_t>(j)] = lp.objective[static_cast<std::size_t>(j)];
  for (int j = 0; j < cols; ++j) zrow[static_cast<std::size_t>(j)] = -c2[static_cast<std::size_t>(j)];
  zval = 0.0;
  for (int i = 0; i < m; ++i) {
    if (!active[static_cast<std::size_t>(i)]) continue;
    double cb = c2[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])];
    if (cb == 0.0) continue;
    const auto& row = a[static_cast<std::size_t>(i)];
    for (int j = 0; j < cols; ++j)
      zrow[static_cast<std::size_t>(j)] += cb * row[static_cast<std::size_t>(j)];
    zval += cb * b[static_cast<std::size_t>(i)];
  }
  if (!run(artificial)) {
    result.status = LpResult::Status::Unbounded;
    return result;
  }

  result.status = LpResult::Status::Optimal;
  result.x.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < m; ++i) {
    if (!active[static_cast<std::size_t>(i)]) continue;
    int bv = basis[static_cast<std::size_t>(i)];
    if (bv < n) result.x[static_cast<std::size_t>(bv)] = std::max(0.0, b[static_cast<std::size_t>(i)]);
  }
  result.objective = zval;
  return result;
}

inline bool lp_feasible(LinProg lp, std::vector<double>* point = nullptr) {
  lp.objective.assign(static_cast<std::size_t>(lp.nvars), 0.0);
  LpResult r = lp_solve(lp);
  if (r.status != LpResult::Status::Optimal) return false;
  if (point) *point = r.x;
  return true;
}

}  // namespace lnum
