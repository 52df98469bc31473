#pragma once

// Small dense symmetric-matrix kernel: symmetric elimination (LDL) with
// degenerate-pivot skipping, Jacobi eigendecomposition, row-space tests and
// quadratic forms. Everything here targets the tiny-matrix regime (n <= 64).

#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

namespace uncoded {

using Vec = std::vector<double>;
using Mat = std::vector<std::vector<double>>;  // rectangular, row-major

// Dense symmetric matrix. Storage keeps entries[i][j] == entries[j][i]
// exactly; set() writes both triangles.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n) : n_(n), a_(n, Vec(n, 0.0)) {}
  static SymMatrix from_rows(const Mat& rows);
  static SymMatrix identity(std::size_t n);

  std::size_t dim() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i][j]; }
  void set(std::size_t i, std::size_t j, double v) {
    a_[i][j] = v;
    a_[j][i] = v;
  }

  double max_abs() const;
  const Mat& rows() const { return a_; }

  // Leading principal submatrix of order k.
  SymMatrix leading(std::size_t k) const;

  Vec mul(const Vec& x) const;

 private:
  std::size_t n_ = 0;
  Mat a_;
};

// Record of a symmetric-elimination pass, pivoting from the last index down
// to the first. PSD (within tolerance) iff failed_index is absent.
struct LdlTrace {
  Vec diag;                   // pivot values in elimination order (last..first)
  std::set<std::size_t> skipped;  // zero pivot with zero row, step skipped
  std::optional<std::size_t> failed_index;

  bool psd() const { return !failed_index.has_value(); }
};

struct EigenReport {
  Vec eigenvalues;  // descending
  Mat vectors;      // vectors[i] is the eigenvector for eigenvalues[i]
};

// Default relative pivot tolerance for a given matrix.
double default_tol(const SymMatrix& a);

// Symmetric elimination from index n-1 down to 0. A zero pivot with a zero
// row is skipped; a zero pivot with a nonzero row entry, or a negative pivot
// below -tol, sets failed_index.
LdlTrace ldl_psd_test(const SymMatrix& a, double tol);
LdlTrace ldl_psd_test(const SymMatrix& a);

// Cyclic Jacobi. Throws std::runtime_error on non-convergence (100 sweeps).
EigenReport eig_sym(const SymMatrix& a);

// True iff min_x ||v - x^t a|| <= tol * max(1, ||v||). Rows of `a` span the
// candidate subspace.
bool in_row_space(const Vec& v, const Mat& a, double tol);

// x^t a x with symmetrized accumulation.
double quad_form(const Vec& x, const SymMatrix& a);

// Determinant via elimination (no symmetry assumption needed beyond storage).
double det(const SymMatrix& a);

// Solve a x = b for symmetric full-rank a (partial-pivoted elimination).
Vec solve(const SymMatrix& a, const Vec& b);

// Dense helpers for the rectangular matrices used by the MAC module.
Vec mat_vec(const Mat& a, const Vec& x);     // a (r x c) * x (c)
Vec vec_mat(const Vec& x, const Mat& a);     // x (r) * a (r x c)
double dot(const Vec& x, const Vec& y);

}  // namespace uncoded
