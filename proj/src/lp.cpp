#include "rr/lp.hpp"

#include <cmath>
#include <limits>

#include "rr/errors.hpp"

namespace rr {

namespace {

constexpr double kEps = 1e-10;

struct Tableau {
  std::size_t m, n;  // rows, columns (excluding rhs)
  std::vector<double> t;  // (m + 1) x (n + 1); last row is the objective
  std::vector<std::size_t> basis;

  double& at(std::size_t r, std::size_t c) { return t[r * (n + 1) + c]; }

  void pivot(std::size_t r, std::size_t c) {
    double p = at(r, c);
    for (std::size_t j = 0; j <= n; ++j) at(r, j) /= p;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == r) continue;
      double f = at(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n; ++j) at(i, j) -= f * at(r, j);
    }
    basis[r] = c;
  }

  // Minimizes the objective row over columns allowed[j]; false if unbounded.
  bool run(const std::vector<char>& allowed) {
    for (std::size_t iter = 0; iter < 100000; ++iter) {
      std::size_t enter = n;
      for (std::size_t j = 0; j < n; ++j)
        if (allowed[j] && at(m, j) < -kEps) {
          enter = j;
          break;
        }
      if (enter == n) return true;
      std::size_t leave = m;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        double a = at(i, enter);
        if (a > kEps) {
          double ratio = at(i, n) / a;
          if (ratio < best - kEps || (std::abs(ratio - best) <= kEps && leave < m && basis[i] < basis[leave])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave == m) return false;
      pivot(leave, enter);
    }
    throw Error("simplex iteration limit reached");
  }
};

}  // namespace

LpResult solve_lp(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                  const std::vector<double>& c, const std::vector<double>& upper) {
  const std::size_t rows = A.size(), nv = c.size();
  std::vector<std::size_t> bounded;
  for (std::size_t j = 0; j < nv; ++j)
    if (std::isfinite(upper[j])) bounded.push_back(j);
  // columns: x (nv), bound slacks (nb), artificials (m)
  const std::size_t nb = bounded.size(), m = rows + nb, n = nv + nb + m;
  Tableau T{m, n, std::vector<double>((m + 1) * (n + 1), 0.0), std::vector<std::size_t>(m)};
  for (std::size_t i = 0; i < rows; ++i) {
    double sign = b[i] < 0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < nv; ++j) T.at(i, j) = sign * A[i][j];
    T.at(i, n) = sign * b[i];
  }
  for (std::size_t k = 0; k < nb; ++k) {
    std::size_t i = rows + k;
    T.at(i, bounded[k]) = 1.0;
    T.at(i, nv + k) = 1.0;
    T.at(i, n) = upper[bounded[k]];
  }
  for (std::size_t i = 0; i < m; ++i) {
    T.at(i, nv + nb + i) = 1.0;
    T.basis[i] = nv + nb + i;
  }
  // phase one: minimize the sum of artificials
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= n; ++j)
      if (j < nv + nb || j == n) T.at(m, j) -= T.at(i, j);
  std::vector<char> allowed(n, 1);
  T.run(allowed);
  LpResult res;
  if (-T.at(m, n) > 1e-7 * (1.0 + std::abs(T.at(m, n)))) return res;
  // drive remaining artificials out of the basis where possible
  for (std::size_t i = 0; i < m; ++i) {
    if (T.basis[i] < nv + nb) continue;
    for (std::size_t j = 0; j < nv + nb; ++j)
      if (std::abs(T.at(i, j)) > 1e-9) {
        T.pivot(i, j);
        break;
      }
  }
  for (std::size_t j = nv + nb; j < n; ++j) allowed[j] = 0;
  // phase two objective in terms of the current basis
  for (std::size_t j = 0; j <= n; ++j) T.at(m, j) = 0.0;
  for (std::size_t j = 0; j < nv; ++j) T.at(m, j) = c[j];
  for (std::size_t i = 0; i < m; ++i) {
    double f = T.at(m, T.basis[i]);
    if (f == 0.0) continue;
    for (std::size_t j = 0; j <= n; ++j) T.at(m, j) -= f * T.at(i, j);
  }
  if (!T.run(allowed)) return res;
  res.feasible = true;
  res.x.assign(nv, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (T.basis[i] < nv) res.x[T.basis[i]] = T.at(i, n);
  res.objective = 0.0;
  for (std::size_t j = 0; j < nv; ++j) res.objective += c[j] * res.x[j];
  return res;
}

}  // namespace rr
