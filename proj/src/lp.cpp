#include "progeq/lp.hpp"

#include <cassert>

namespace progeq {
namespace {

// Dense tableau with an explicit basis.  Columns 0..n-1 are structural,
// n..n+m-1 artificial; the last column is the right-hand side.
struct Tableau {
  std::size_t m, n;                     // rows, structural columns
  std::vector<std::vector<Rat>> row;    // m rows of n+m+1 entries
  std::vector<std::size_t> basis;       // basis[i] = column basic in row i

  void pivot(std::size_t r, std::size_t col) {
    Rat p = row[r][col];
    for (auto& v : row[r]) v /= p;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i == r) continue;
      Rat f = row[i][col];
      if (f == 0) continue;
      for (std::size_t j = 0; j < row[i].size(); ++j)
        row[i][j] -= f * row[r][j];
    }
    basis[r] = col;
  }

  // Minimizes cost over the columns in [0, limit) with Bland's rule.
  // cost must already be in reduced form w.r.t. the current basis.
  // Returns false on unboundedness.
  bool optimize(std::vector<Rat>& cost, std::size_t limit) {
    for (;;) {
      std::size_t enter = limit;
      for (std::size_t j = 0; j < limit; ++j)
        if (cost[j] < 0) { enter = j; break; }
      if (enter == limit) return true;
      std::size_t leave = m;
      for (std::size_t i = 0; i < m; ++i) {
        if (row[i][enter] <= 0) continue;
        if (leave == m) { leave = i; continue; }
        Rat cur = row[i].back() / row[i][enter];
        Rat best = row[leave].back() / row[leave][enter];
        if (cur < best || (cur == best && basis[i] < basis[leave])) leave = i;
      }
      if (leave == m) return false;
      pivot(leave, enter);
      // Keep the cost row reduced.
      Rat f = cost[enter];
      for (std::size_t j = 0; j < cost.size(); ++j)
        cost[j] -= f * row[leave][j];
    }
  }
};

}  // namespace

LpResult lp_minimize(const std::vector<Rat>& c,
                     const std::vector<std::vector<Rat>>& A,
                     const std::vector<Rat>& b) {
  std::size_t m = A.size(), n = c.size();
  Tableau t;
  t.m = m;
  t.n = n;
  t.row.assign(m, std::vector<Rat>(n + m + 1, Rat(0)));
  t.basis.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    assert(A[i].size() == n);
    Rat sign = b[i] < 0 ? Rat(-1) : Rat(1);
    for (std::size_t j = 0; j < n; ++j) t.row[i][j] = sign * A[i][j];
    t.row[i][n + i] = 1;
    t.row[i].back() = sign * b[i];
    t.basis[i] = n + i;
  }

  // Phase 1: minimize the sum of artificials.
  std::vector<Rat> cost(n + m + 1, Rat(0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= n + m; ++j) cost[j] -= t.row[i][j];
  for (std::size_t j = n; j < n + m; ++j) cost[j] += 1;
  bool ok = t.optimize(cost, n + m);
  assert(ok);
  (void)ok;
  if (-cost.back() != 0) return {LpResult::Status::Infeasible, {}, 0};

  // Drive any zero-valued artificials out of the basis; delete redundant rows.
  for (std::size_t i = 0; i < t.m;) {
    if (t.basis[i] < n) { ++i; continue; }
    std::size_t col = n;
    for (std::size_t j = 0; j < n; ++j)
      if (t.row[i][j] != 0) { col = j; break; }
    if (col < n) {
      t.pivot(i, col);
      ++i;
    } else {
      t.row.erase(t.row.begin() + i);
      t.basis.erase(t.basis.begin() + i);
      --t.m;
    }
  }
  std::size_t rows = t.m;

  // Phase 2.  Rows keep their original width (n + m + 1 columns).
  std::vector<Rat> cost2(n + m + 1, Rat(0));
  for (std::size_t j = 0; j < n; ++j) cost2[j] = c[j];
  for (std::size_t i = 0; i < rows; ++i) {
    Rat f = cost2[t.basis[i]];
    if (f == 0) continue;
    for (std::size_t j = 0; j < cost2.size(); ++j) cost2[j] -= f * t.row[i][j];
  }
  // Artificial columns stay out of phase 2.
  if (!t.optimize(cost2, n))
    return {LpResult::Status::Unbounded, {}, 0};

  LpResult res{LpResult::Status::Optimal, std::vector<Rat>(n, Rat(0)), 0};
  for (std::size_t i = 0; i < rows; ++i)
    if (t.basis[i] < n) res.x[t.basis[i]] = t.row[i].back();
  for (std::size_t j = 0; j < n; ++j) res.value += c[j] * res.x[j];
  return res;
}

LpResult lp_feasible(const std::vector<std::vector<Rat>>& A,
                     const std::vector<Rat>& b) {
  return lp_minimize(std::vector<Rat>(A.empty() ? 0 : A[0].size(), Rat(0)), A,
                     b);
}

}  // namespace progeq
