#pragma once

// Generalised derivations X -> SX - XT as lifted n^2 x n^2 matrices acting on
// column-stacked vec(X): lifted = I ⊗ S - T^T ⊗ I.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "normlab/errors.hpp"
#include "normlab/instance.hpp"
#include "normlab/spectral.hpp"

namespace normlab {

inline ComplexVector vec(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());  // Eigen storage is column-major
}

inline ComplexMatrix unvec(const ComplexVector& v, Eigen::Index n) {
  if (v.size() != n * n) throw ShapeError("unvec: length is not n^2");
  return Eigen::Map<const ComplexMatrix>(v.data(), n, n);
}

inline ComplexMatrix derivation_apply(const ComplexMatrix& s, const ComplexMatrix& t, const ComplexMatrix& x) {
  return s * x - x * t;
}

struct SylvesterOperator {
  ComplexMatrix S;
  ComplexMatrix T;
  ComplexMatrix lifted;
};

/// Largest ||lifted vec(X) - vec(SX - XT)|| / (max(1, ||S||+||T||) ||X||_HS) over `samples` random X.
inline double lift_consistency(const SylvesterOperator& op, std::size_t samples, std::uint64_t seed) {
  const auto n = op.S.rows();
  const double scale = std::max(1.0, op_norm(op.S) + op_norm(op.T));
  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const ComplexMatrix x = gaussian_matrix(n, n, rng);
    const double err = (op.lifted * vec(x) - vec(derivation_apply(op.S, op.T, x))).norm();
    worst = std::max(worst, err / (scale * x.norm()));
  }
  return worst;
}

inline SylvesterOperator lift_derivation(const ComplexMatrix& s, const ComplexMatrix& t) {
  require_square(s, "lift_derivation");
  require_same_shape(s, t, "lift_derivation");
  const auto n = s.rows();
  SylvesterOperator op{s, t, ComplexMatrix::Zero(n * n, n * n)};
  // vec(SX) = (I ⊗ S) vec(X), vec(XT) = (T^T ⊗ I) vec(X)
  for (Eigen::Index blk = 0; blk < n; ++blk) {
    op.lifted.block(blk * n, blk * n, n, n) += s;
  }
  for (Eigen::Index bi = 0; bi < n; ++bi) {
    for (Eigen::Index bj = 0; bj < n; ++bj) {
      const Complex tji = t(bj, bi);
      if (tji == Complex(0.0, 0.0)) continue;
      for (Eigen::Index k = 0; k < n; ++k) op.lifted(bi * n + k, bj * n + k) -= tji;
    }
  }
  if (n > 0 && lift_consistency(op, 20, 0x1f7b3a5cULL) > 1e-10) {
    throw NumericError("lift_derivation: lifted operator disagrees with SX - XT");
  }
  return op;
}

struct KernelElement {
  ComplexMatrix C;
  double residual = 0.0;  // ||SC - CT||_HS
};

/// Relative singular-value cut-off for the numerical kernel.
inline constexpr double kKernelThreshold = 1e-8;

namespace detail {

struct LiftedSvd {
  Eigen::VectorXd sigma;
  ComplexMatrix U;
  ComplexMatrix V;
  double cutoff = 0.0;  // sigma <= cutoff counts as zero
};

inline LiftedSvd lifted_svd(const SylvesterOperator& op) {
  Eigen::JacobiSVD<ComplexMatrix> svd(op.lifted, Eigen::ComputeFullU | Eigen::ComputeFullV);
  LiftedSvd out{svd.singularValues(), svd.matrixU(), svd.matrixV(), 0.0};
  const double smax = out.sigma.size() ? out.sigma(0) : 0.0;
  out.cutoff = kKernelThreshold * smax;
  return out;
}

}  // namespace detail

/// HS-orthonormal basis of the numerical kernel of X -> SX - XT.
inline std::vector<KernelElement> kernel_basis(const SylvesterOperator& op) {
  const auto n = op.S.rows();
  std::vector<KernelElement> out;
  if (n == 0) return out;
  const auto svd = detail::lifted_svd(op);
  for (Eigen::Index k = 0; k < svd.sigma.size(); ++k) {
    if (svd.sigma(k) > svd.cutoff) continue;
    KernelElement el;
    el.C = unvec(svd.V.col(k), n);
    el.residual = hs_norm(derivation_apply(op.S, op.T, el.C));
    out.push_back(std::move(el));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fuglede-Putnam property

struct FPReport {
  bool holds = true;
  std::size_t kernel_dimension = 0;
  std::vector<double> adjoint_residuals;  // ||S*C - CT*||_HS per basis element
  double worst_residual = 0.0;
  double threshold = 0.0;
};

/// SC = CT implies S*C = CT*, checked on a basis of the kernel.
inline FPReport check_fp_pair(const ComplexMatrix& s, const ComplexMatrix& t) {
  const auto op = lift_derivation(s, t);
  FPReport r;
  r.threshold = 1e-7 * std::max(1.0, op_norm(s) + op_norm(t));
  const ComplexMatrix sa = s.adjoint();
  const ComplexMatrix ta = t.adjoint();
  for (const auto& el : kernel_basis(op)) {
    const double res = hs_norm(sa * el.C - el.C * ta);
    r.adjoint_residuals.push_back(res);
    r.worst_residual = std::max(r.worst_residual, res);
  }
  r.kernel_dimension = r.adjoint_residuals.size();
  r.holds = r.worst_residual <= r.threshold;
  return r;
}

// ---------------------------------------------------------------------------
// Reducing subspaces

struct ReductionReport {
  bool range_reduces = true;
  bool restriction_normal = true;
  std::size_t range_dimension = 0;
  double lower_residual = 0.0;   // ||(I - QQ*) S Q||
  double upper_residual = 0.0;   // ||QQ* S (I - QQ*)||
  double normal_residual = 0.0;  // of Q* S Q
};

/// Orthonormal basis of range(C): left singular vectors with sigma > 1e-10 sigma_max.
inline ComplexMatrix range_basis(const ComplexMatrix& c) {
  Eigen::JacobiSVD<ComplexMatrix> svd(c, Eigen::ComputeFullU);
  const auto& sigma = svd.singularValues();
  const double smax = sigma.size() ? sigma(0) : 0.0;
  Eigen::Index rank = 0;
  if (smax > 0.0) {
    while (rank < sigma.size() && sigma(rank) > 1e-10 * smax) ++rank;
  }
  return svd.matrixU().leftCols(rank);
}

/// Does range(C) reduce S, and is S restricted to it normal?
inline ReductionReport check_reduction(const ComplexMatrix& s, const ComplexMatrix& c) {
  require_square(s, "check_reduction");
  require_same_shape(s, c, "check_reduction");
  ReductionReport r;
  const ComplexMatrix q = range_basis(c);
  r.range_dimension = static_cast<std::size_t>(q.cols());
  if (q.cols() == 0) return r;
  const auto n = s.rows();
  const ComplexMatrix proj = q * q.adjoint();
  const ComplexMatrix comp = identity(n) - proj;
  const double tol = 1e-8 * std::max(1.0, op_norm(s));
  r.lower_residual = op_norm(comp * s * q);
  r.upper_residual = op_norm(proj * s * comp);
  r.range_reduces = r.lower_residual <= tol && r.upper_residual <= tol;
  const ComplexMatrix restricted = q.adjoint() * s * q;
  const auto cls = classify(restricted);
  r.normal_residual = cls.normal_residual;
  r.restriction_normal = cls.normal;
  return r;
}

// ---------------------------------------------------------------------------
// Range-kernel orthogonality

/// min over X of ||SX - XT + C||_HS: the residual of vec(C) after projecting
/// out the (numerical) range of the lifted operator.
inline double min_distance_hs(const ComplexMatrix& s, const ComplexMatrix& t, const ComplexMatrix& c) {
  require_same_shape(s, c, "min_distance_hs");
  const auto op = lift_derivation(s, t);
  if (s.rows() == 0) return 0.0;
  const auto svd = detail::lifted_svd(op);
  const ComplexVector target = vec(c);
  ComplexVector residual = target;
  for (Eigen::Index k = 0; k < svd.sigma.size(); ++k) {
    if (svd.sigma(k) <= svd.cutoff) continue;
    const auto u = svd.U.col(k);
    residual -= u * u.dot(target);
  }
  return std::min(residual.norm(), c.norm());
}

struct ProbeResult {
  double min_found = 0.0;
  double c_norm = 0.0;  // ||C||_op
  bool consistent = true;
  std::size_t evaluations = 0;
};

namespace detail {

// Real coordinates of an n x n complex matrix: 2 n^2 of them.
inline void nudge(ComplexMatrix& x, Eigen::Index coord, double delta) {
  const Eigen::Index entry = coord / 2;
  if (coord % 2 == 0) {
    x.data()[entry] += Complex(delta, 0.0);
  } else {
    x.data()[entry] += Complex(0.0, delta);
  }
}

}  // namespace detail

/// Searches for X with ||SX - XT + C||_op < ||C||_op. Multi-start random
/// sampling (X = 0 always included) followed by coordinate descent with step
/// halving from the five best samples. A falsifier, not a certified minimiser.
inline ProbeResult orthogonality_probe_opnorm(const ComplexMatrix& s, const ComplexMatrix& t,
                                              const ComplexMatrix& c, std::size_t trials, std::uint64_t seed) {
  const auto op = lift_derivation(s, t);
  require_same_shape(s, c, "orthogonality_probe_opnorm");
  const auto n = s.rows();
  const double sigma_max = n ? op_norm(op.lifted) : 0.0;
  const double residual = hs_norm(derivation_apply(s, t, c));
  if (residual > kKernelThreshold * sigma_max * std::max(1.0, hs_norm(c))) {
    throw HypothesisError("orthogonality_probe_opnorm: C is not in the kernel (residual " +
                          std::to_string(residual) + ")");
  }

  ProbeResult out;
  out.c_norm = op_norm(c);
  auto objective = [&](const ComplexMatrix& x) {
    ++out.evaluations;
    return op_norm(derivation_apply(s, t, x) + c);
  };

  struct Sample {
    double value;
    ComplexMatrix x;
  };
  std::vector<Sample> samples;
  samples.push_back({objective(ComplexMatrix::Zero(n, n)), ComplexMatrix::Zero(n, n)});

  Rng rng(seed);
  const double reach = std::max(out.c_norm, 1e-12) / std::max(sigma_max, 1e-12);
  std::uniform_real_distribution<double> log_scale(-3.0, 0.0);
  for (std::size_t k = 0; k < trials; ++k) {
    ComplexMatrix x = gaussian_matrix(n, n, rng);
    x *= reach * std::pow(10.0, log_scale(rng)) / std::max(x.norm(), 1e-300);
    samples.push_back({objective(x), std::move(x)});
  }
  std::stable_sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) { return a.value < b.value; });

  double best = samples.front().value;
  const std::size_t starts = std::min<std::size_t>(5, samples.size());
  const Eigen::Index coords = 2 * n * n;
  for (std::size_t k = 0; k < starts && coords > 0; ++k) {
    ComplexMatrix x = samples[k].x;
    double value = samples[k].value;
    double step = 0.1 * reach;
    bool improved_in_cycle = false;
    for (int it = 0; it < 200; ++it) {
      const Eigen::Index coord = it % coords;
      bool moved = false;
      for (const double dir : {1.0, -1.0}) {
        detail::nudge(x, coord, dir * step);
        const double v = objective(x);
        if (v < value) {
          value = v;
          moved = true;
          break;
        }
        detail::nudge(x, coord, -dir * step);
      }
      improved_in_cycle = improved_in_cycle || moved;
      if (coord == coords - 1) {
        if (!improved_in_cycle) step *= 0.5;
        improved_in_cycle = false;
      }
    }
    best = std::min(best, value);
  }
  out.min_found = best;
  out.consistent = out.min_found >= out.c_norm - 1e-6;
  return out;
}

// ---------------------------------------------------------------------------
// Block embedding on H ⊕ H

struct BlockEmbedding {
  ComplexMatrix N;  // diag(S, T)
  ComplexMatrix M;  // [[0, C], [0, 0]]
  ComplexMatrix Y;  // [[0, X], [0, 0]]
};

inline ComplexMatrix upper_block(const ComplexMatrix& z) {
  const auto n = z.rows();
  ComplexMatrix out = ComplexMatrix::Zero(2 * n, 2 * n);
  out.topRightCorner(n, n) = z;
  return out;
}

inline BlockEmbedding block_embedding(const ComplexMatrix& s, const ComplexMatrix& t, const ComplexMatrix& c,
                                      const ComplexMatrix& x) {
  require_square(s, "block_embedding");
  require_same_shape(s, t, "block_embedding");
  require_same_shape(s, c, "block_embedding");
  require_same_shape(s, x, "block_embedding");
  return {direct_sum(s, t), upper_block(c), upper_block(x)};
}

// ---------------------------------------------------------------------------

/// Attaches a random unit-HS element of ker(X -> SX - XT) as inst.C (zero if the kernel is trivial).
inline void attach_kernel_element(Instance& inst, std::uint64_t seed) {
  const auto basis = kernel_basis(lift_derivation(inst.S, inst.T));
  const auto n = inst.S.rows();
  ComplexMatrix c = ComplexMatrix::Zero(n, n);
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (const auto& el : basis) {
    const double re = normal(rng);
    const double im = normal(rng);
    c += Complex(re, im) * el.C;
  }
  const double nrm = c.norm();
  if (nrm > 0.0) c /= nrm;
  inst.C = c;
}

}  // namespace normlab
