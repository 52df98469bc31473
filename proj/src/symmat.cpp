#include "uncoded/symmat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace uncoded {

SymMatrix SymMatrix::from_rows(const Mat& rows) {
  const std::size_t n = rows.size();
  SymMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw std::invalid_argument("from_rows: not square");
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = 0.5 * (rows[i][j] + rows[j][i]);
      if (std::abs(rows[i][j] - rows[j][i]) > 1e-12 * std::max(1.0, std::abs(v)))
        throw std::invalid_argument("from_rows: not symmetric");
      m.set(i, j, v);
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!std::isfinite(rows[i][j]))
        throw std::invalid_argument("from_rows: non-finite entry");
  return m;
}

SymMatrix SymMatrix::identity(std::size_t n) {
  SymMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1.0);
  return m;
}

double SymMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& row : a_)
    for (double v : row) m = std::max(m, std::abs(v));
  return m;
}

SymMatrix SymMatrix::leading(std::size_t k) const {
  SymMatrix m(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j <= i; ++j) m.set(i, j, a_[i][j]);
  return m;
}

Vec SymMatrix::mul(const Vec& x) const {
  if (x.size() != n_) throw std::invalid_argument("mul: dimension mismatch");
  Vec y(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) y[i] += a_[i][j] * x[j];
  return y;
}

double default_tol(const SymMatrix& a) {
  return 1e-10 * std::max(1.0, a.max_abs());
}

LdlTrace ldl_psd_test(const SymMatrix& a, double tol) {
  const std::size_t n = a.dim();
  if (tol < 0.0) throw std::invalid_argument("ldl_psd_test: negative tol");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!std::isfinite(a(i, j)))
        throw std::invalid_argument("ldl_psd_test: non-finite entry");

  Mat w = a.rows();
  LdlTrace trace;
  // Eliminate from the last index down, the order the threshold recursion
  // walks the receivers.
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t k = n - 1 - step;
    const double pivot = w[k][k];
    trace.diag.push_back(pivot);
    double row_max = 0.0;
    for (std::size_t j = 0; j < k; ++j) row_max = std::max(row_max, std::abs(w[k][j]));
    if (pivot > tol) {
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
          const double v = w[i][j] - w[i][k] * w[j][k] / pivot;
          w[i][j] = v;
          w[j][i] = v;
        }
    } else if (pivot >= -tol) {
      if (row_max > tol) {
        // Zero pivot with a live row: indefinite, no finite elimination.
        trace.failed_index = k;
        return trace;
      }
      trace.skipped.insert(k);
    } else {
      trace.failed_index = k;
      return trace;
    }
  }
  return trace;
}

LdlTrace ldl_psd_test(const SymMatrix& a) { return ldl_psd_test(a, default_tol(a)); }

EigenReport eig_sym(const SymMatrix& a) {
  const std::size_t n = a.dim();
  Mat w = a.rows();
  Mat v(n, Vec(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

  const double scale = std::max(1.0, a.max_abs());
  const int max_sweeps = 100;
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(w[p][q]));
    if (off <= 1e-15 * scale) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = w[p][q];
        if (std::abs(apq) <= 1e-18 * scale) continue;
        const double theta = (w[q][q] - w[p][p]) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double wip = w[i][p], wiq = w[i][q];
          w[i][p] = c * wip - s * wiq;
          w[i][q] = s * wip + c * wiq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double wpi = w[p][i], wqi = w[q][i];
          w[p][i] = c * wpi - s * wqi;
          w[q][i] = s * wpi + c * wqi;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = v[i][p], viq = v[i][q];
          v[i][p] = c * vip - s * viq;
          v[i][q] = s * vip + c * viq;
        }
      }
    }
  }
  if (sweep == max_sweeps)
    throw std::runtime_error("eig_sym: Jacobi did not converge in 100 sweeps");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return w[i][i] > w[j][j]; });
  EigenReport rep;
  rep.eigenvalues.resize(n);
  rep.vectors.assign(n, Vec(n));
  for (std::size_t r = 0; r < n; ++r) {
    rep.eigenvalues[r] = w[order[r]][order[r]];
    for (std::size_t i = 0; i < n; ++i) rep.vectors[r][i] = v[i][order[r]];
  }
  return rep;
}

bool in_row_space(const Vec& v, const Mat& a, double tol) {
  if (!a.empty() && a[0].size() != v.size())
    throw std::invalid_argument("in_row_space: dimension mismatch");
  for (const auto& row : a)
    if (row.size() != v.size())
      throw std::invalid_argument("in_row_space: ragged matrix");

  // Modified Gram-Schmidt on the rows; project v onto the surviving basis.
  const std::size_t c = v.size();
  std::vector<Vec> basis;
  double row_scale = 0.0;
  for (const auto& row : a)
    for (double x : row) row_scale = std::max(row_scale, std::abs(x));
  for (const auto& row : a) {
    Vec r = row;
    for (const auto& b : basis) {
      const double p = dot(r, b);
      for (std::size_t j = 0; j < c; ++j) r[j] -= p * b[j];
    }
    const double nrm = std::sqrt(dot(r, r));
    if (nrm > 1e-12 * std::max(1.0, row_scale)) {
      for (double& x : r) x /= nrm;
      basis.push_back(std::move(r));
    }
  }
  Vec res = v;
  for (const auto& b : basis) {
    const double p = dot(res, b);
    for (std::size_t j = 0; j < c; ++j) res[j] -= p * b[j];
  }
  const double vnorm = std::sqrt(dot(v, v));
  return std::sqrt(dot(res, res)) <= tol * std::max(1.0, vnorm);
}

double quad_form(const Vec& x, const SymMatrix& a) {
  if (x.size() != a.dim()) throw std::invalid_argument("quad_form: dimension mismatch");
  double diag = 0.0, off = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    diag += a(i, i) * x[i] * x[i];
    for (std::size_t j = 0; j < i; ++j) off += a(i, j) * x[i] * x[j];
  }
  return diag + 2.0 * off;
}

double det(const SymMatrix& a) {
  const std::size_t n = a.dim();
  Mat w = a.rows();
  double d = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(w[i][k]) > std::abs(w[p][k])) p = i;
    if (p != k) {
      std::swap(w[p], w[k]);
      d = -d;
    }
    if (w[k][k] == 0.0) return 0.0;
    d *= w[k][k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = w[i][k] / w[k][k];
      for (std::size_t j = k; j < n; ++j) w[i][j] -= f * w[k][j];
    }
  }
  return d;
}

Vec solve(const SymMatrix& a, const Vec& b) {
  const std::size_t n = a.dim();
  if (b.size() != n) throw std::invalid_argument("solve: dimension mismatch");
  Mat w = a.rows();
  Vec rhs = b;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(w[i][k]) > std::abs(w[p][k])) p = i;
    if (std::abs(w[p][k]) <= 1e-14 * std::max(1.0, a.max_abs()))
      throw std::runtime_error("solve: singular matrix");
    std::swap(w[p], w[k]);
    std::swap(rhs[p], rhs[k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = w[i][k] / w[k][k];
      for (std::size_t j = k; j < n; ++j) w[i][j] -= f * w[k][j];
      rhs[i] -= f * rhs[k];
    }
  }
  Vec x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = rhs[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= w[ii][j] * x[j];
    x[ii] = s / w[ii][ii];
  }
  return x;
}

Vec mat_vec(const Mat& a, const Vec& x) {
  Vec y(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != x.size()) throw std::invalid_argument("mat_vec: dimension mismatch");
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
  }
  return y;
}

Vec vec_mat(const Vec& x, const Mat& a) {
  if (a.size() != x.size()) throw std::invalid_argument("vec_mat: dimension mismatch");
  if (a.empty()) return {};
  Vec y(a[0].size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) y[j] += x[i] * a[i][j];
  return y;
}

double dot(const Vec& x, const Vec& y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

}  // namespace uncoded
