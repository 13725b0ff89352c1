#pragma once

// Dense complex matrix algebra and the norm / spectral primitives the rest of
// the library is built on. Matrices are Eigen::MatrixXcd; every function here
// is pure and validates shapes itself (Eigen only asserts).

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <iterator>
#include <numbers>
#include <string>
#include <vector>

#include "normlab/errors.hpp"

namespace normlab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kDefaultTol = 1e-9;
inline constexpr double kClassifyTol = 1e-8;

/// tol * max(1, scale): the relative tolerance used for every comparison.
inline double scaled_tol(double tol, double scale) { return tol * std::max(1.0, std::abs(scale)); }

namespace detail {

inline std::string shape_of(const ComplexMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace detail

inline void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw ShapeError(std::string(what) + ": expected a square matrix, got " + detail::shape_of(m));
  }
}

inline void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(what) + ": shape mismatch " + detail::shape_of(a) + " vs " +
                     detail::shape_of(b));
  }
}

inline bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    if (!std::isfinite(m.data()[k].real()) || !std::isfinite(m.data()[k].imag())) return false;
  }
  return true;
}

inline void require_finite(const ComplexMatrix& m, const char* what) {
  if (!all_finite(m)) throw NumericError(std::string(what) + ": matrix has non-finite entries");
}

// ---------------------------------------------------------------------------
// Elementary algebra

enum class AlgebraOp { add, subtract, multiply };

inline ComplexMatrix apply(AlgebraOp kind, const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
  switch (kind) {
    case AlgebraOp::add:
      require_same_shape(lhs, rhs, "add");
      return lhs + rhs;
    case AlgebraOp::subtract:
      require_same_shape(lhs, rhs, "subtract");
      return lhs - rhs;
    case AlgebraOp::multiply:
      if (lhs.cols() != rhs.rows()) {
        throw ShapeError("multiply: inner dimensions differ, " + detail::shape_of(lhs) + " * " +
                         detail::shape_of(rhs));
      }
      return lhs * rhs;
  }
  throw InputError("unknown algebra operation");
}

inline ComplexMatrix add(const ComplexMatrix& a, const ComplexMatrix& b) { return apply(AlgebraOp::add, a, b); }
inline ComplexMatrix subtract(const ComplexMatrix& a, const ComplexMatrix& b) {
  return apply(AlgebraOp::subtract, a, b);
}
inline ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
  return apply(AlgebraOp::multiply, a, b);
}
inline ComplexMatrix scale(const ComplexMatrix& a, Complex factor) { return factor * a; }
inline ComplexMatrix adjoint(const ComplexMatrix& a) { return a.adjoint(); }

inline ComplexMatrix identity(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

/// ST - TS.
inline ComplexMatrix commutator(const ComplexMatrix& s, const ComplexMatrix& t) {
  require_square(s, "commutator");
  require_same_shape(s, t, "commutator");
  return s * t - t * s;
}

/// Block-diagonal x ⊕ y.
inline ComplexMatrix direct_sum(const ComplexMatrix& x, const ComplexMatrix& y) {
  ComplexMatrix out = ComplexMatrix::Zero(x.rows() + y.rows(), x.cols() + y.cols());
  out.topLeftCorner(x.rows(), x.cols()) = x;
  out.bottomRightCorner(y.rows(), y.cols()) = y;
  return out;
}

// ---------------------------------------------------------------------------
// Norms and singular values

/// Singular values in descending order; `at(j)` is 1-based and returns 0 past the end.
struct SingularValueList {
  std::vector<double> values;

  [[nodiscard]] double at(std::size_t j) const {
    return (j >= 1 && j <= values.size()) ? values[j - 1] : 0.0;
  }
  [[nodiscard]] std::size_t size() const { return values.size(); }
};

inline SingularValueList singular_values(const ComplexMatrix& m) {
  SingularValueList out;
  if (m.size() == 0) return out;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  const auto& sv = svd.singularValues();
  out.values.assign(sv.data(), sv.data() + sv.size());
  return out;
}

inline double op_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  return singular_values(m).values.front();
}

inline double hs_norm(const ComplexMatrix& m) { return m.norm(); }

// ---------------------------------------------------------------------------
// Hermitian spectra

/// Eigenvalues in descending order with matching orthonormal eigenvector columns.
struct SpectralDecomposition {
  std::vector<double> eigenvalues;
  ComplexMatrix eigenvectors;
};

namespace detail {

// Cheap pre-check: the HS norm bounds the operator norm from above.
inline double hermitian_defect(const ComplexMatrix& m) {
  const double hs = hs_norm(m - m.adjoint());
  if (hs == 0.0) return 0.0;
  return op_norm(m - m.adjoint());
}

inline Eigen::SelfAdjointEigenSolver<ComplexMatrix> solve_hermitian(const ComplexMatrix& h, bool vectors) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, vectors ? Eigen::ComputeEigenvectors
                                                                  : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    const auto limit = static_cast<long>(h.rows()) *
                       Eigen::SelfAdjointEigenSolver<ComplexMatrix>::m_maxIterations;
    throw NumericError("hermitian eigensolver did not converge within " + std::to_string(limit) +
                       " iterations");
  }
  return solver;
}

}  // namespace detail

inline SpectralDecomposition hermitian_eig(const ComplexMatrix& m) {
  require_square(m, "hermitian_eig");
  require_finite(m, "hermitian_eig");
  if (m.size() == 0) return {};
  const double defect = detail::hermitian_defect(m);
  if (defect > 0.0 && defect > 1e-10 * std::max(1.0, op_norm(m))) {
    throw HypothesisError("hermitian_eig: matrix is not Hermitian (residual " + std::to_string(defect) + ")");
  }
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  const auto solver = detail::solve_hermitian(h, true);
  const Eigen::Index n = h.rows();
  SpectralDecomposition out;
  out.eigenvalues.resize(static_cast<std::size_t>(n));
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues[static_cast<std::size_t>(k)] = solver.eigenvalues()(n - 1 - k);
    out.eigenvectors.col(k) = solver.eigenvectors().col(n - 1 - k);
  }
  return out;
}

/// Eigenvalues only, descending. Same preconditions as hermitian_eig.
inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m) {
  require_square(m, "hermitian_eigenvalues");
  if (m.size() == 0) return {};
  const double defect = detail::hermitian_defect(m);
  if (defect > 0.0 && defect > 1e-10 * std::max(1.0, op_norm(m))) {
    throw HypothesisError("hermitian_eigenvalues: matrix is not Hermitian");
  }
  const auto solver = detail::solve_hermitian(0.5 * (m + m.adjoint()), false);
  const auto& ev = solver.eigenvalues();
  return {std::make_reverse_iterator(ev.data() + ev.size()), std::make_reverse_iterator(ev.data())};
}

inline double max_hermitian_eigenvalue(const ComplexMatrix& h) {
  const auto solver = detail::solve_hermitian(h, false);
  return solver.eigenvalues()(h.rows() - 1);
}

// ---------------------------------------------------------------------------
// Cartesian decomposition S = A + iC

struct CartesianParts {
  ComplexMatrix real;  // A = (S + S*) / 2
  ComplexMatrix imag;  // C = (S - S*) / (2i)
};

inline CartesianParts cartesian_decomposition(const ComplexMatrix& s) {
  require_square(s, "cartesian_decomposition");
  const ComplexMatrix sa = s.adjoint();
  return {0.5 * (s + sa), Complex(0.0, -0.5) * (s - sa)};
}

// ---------------------------------------------------------------------------
// Numerical radius: w(M) = max over θ of λ_max(Re(e^{iθ} M)).

namespace detail {

inline double support_value(const ComplexMatrix& m, double theta) {
  const ComplexMatrix r = std::polar(1.0, theta) * m;
  return max_hermitian_eigenvalue(0.5 * (r + r.adjoint()));
}

inline double golden_section_max(const ComplexMatrix& m, double lo, double hi, double width) {
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = support_value(m, x1);
  double f2 = support_value(m, x2);
  double best = std::max(f1, f2);
  while (hi - lo > width) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = support_value(m, x2);
      best = std::max(best, f2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = support_value(m, x1);
      best = std::max(best, f1);
    }
  }
  return best;
}

}  // namespace detail

inline double numerical_radius(const ComplexMatrix& m) {
  require_square(m, "numerical_radius");
  require_finite(m, "numerical_radius");
  if (m.size() == 0 || hs_norm(m) == 0.0) return 0.0;

  constexpr int kGrid = 64;
  constexpr int kRefined = 3;
  constexpr double kWidth = 1e-8;
  const double step = 2.0 * std::numbers::pi / kGrid;

  std::array<double, kGrid> values{};
  for (int k = 0; k < kGrid; ++k) values[k] = detail::support_value(m, k * step);

  std::array<int, kGrid> order{};
  for (int k = 0; k < kGrid; ++k) order[k] = k;
  std::partial_sort(order.begin(), order.begin() + kRefined, order.end(),
                    [&](int a, int b) { return values[a] > values[b] || (values[a] == values[b] && a < b); });

  double best = values[order[0]];
  for (int r = 0; r < kRefined; ++r) {
    const double centre = order[r] * step;
    best = std::max(best, detail::golden_section_max(m, centre - step, centre + step, kWidth));
  }
  return std::clamp(best, 0.0, op_norm(m));
}

// ---------------------------------------------------------------------------

/// |M|^{1/2} = (M*M)^{1/4}.
inline ComplexMatrix matrix_abs_sqrt(const ComplexMatrix& m) {
  const ComplexMatrix gram = m.adjoint() * m;
  if (gram.size() == 0) return gram;
  const auto solver = detail::solve_hermitian(0.5 * (gram + gram.adjoint()), true);
  Eigen::VectorXd root = solver.eigenvalues().cwiseMax(0.0).array().sqrt().sqrt();
  const ComplexMatrix& v = solver.eigenvectors();
  ComplexMatrix out = v * root.cast<Complex>().asDiagonal() * v.adjoint();
  return 0.5 * (out + out.adjoint());
}

// ---------------------------------------------------------------------------
// Structural classification

struct Classification {
  bool hermitian = false;
  bool normal = false;
  bool positive_semidefinite = false;
  bool unitary = false;
  double hermitian_residual = 0.0;
  double normal_residual = 0.0;
  double min_eigenvalue = 0.0;  // of the Hermitian part
  double unitary_residual = 0.0;
};

inline double normal_residual(const ComplexMatrix& m) {
  require_square(m, "normal_residual");
  return op_norm(m * m.adjoint() - m.adjoint() * m);
}

inline double hermitian_residual(const ComplexMatrix& m) {
  require_square(m, "hermitian_residual");
  return op_norm(m - m.adjoint());
}

inline bool is_normal(const ComplexMatrix& m, double tol = kClassifyTol) {
  const double nrm = op_norm(m);
  return normal_residual(m) <= tol * std::max(1.0, nrm * nrm);
}

inline bool is_hermitian(const ComplexMatrix& m, double tol = kClassifyTol) {
  const double nrm = op_norm(m);
  return hermitian_residual(m) <= tol * std::max(1.0, nrm * nrm);
}

inline double min_hermitian_eigenvalue(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  const auto solver = detail::solve_hermitian(0.5 * (m + m.adjoint()), false);
  return solver.eigenvalues()(0);
}

inline bool is_positive_semidefinite(const ComplexMatrix& m, double tol = kClassifyTol) {
  if (!is_hermitian(m, tol)) return false;
  return min_hermitian_eigenvalue(m) >= -tol * std::max(1.0, op_norm(m));
}

inline Classification classify(const ComplexMatrix& m, double tol = kClassifyTol) {
  require_square(m, "classify");
  Classification c;
  const double nrm = op_norm(m);
  const double limit = tol * std::max(1.0, nrm * nrm);
  c.hermitian_residual = hermitian_residual(m);
  c.normal_residual = normal_residual(m);
  c.unitary_residual = op_norm(m.adjoint() * m - identity(m.rows()));
  c.min_eigenvalue = min_hermitian_eigenvalue(m);
  c.hermitian = c.hermitian_residual <= limit;
  c.normal = c.normal_residual <= limit;
  c.unitary = c.unitary_residual <= limit;
  c.positive_semidefinite = c.hermitian && c.min_eigenvalue >= -tol * std::max(1.0, nrm);
  return c;
}

}  // namespace normlab
