#pragma once

// Every commutator / derivation norm inequality as a named, evaluable entry.
// An evaluation yields lhs, rhs and a margin whose sign is normalised so that
// "satisfied" always means margin >= -tol * max(1, |rhs|).

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "normlab/errors.hpp"
#include "normlab/instance.hpp"
#include "normlab/spectral.hpp"

namespace normlab {

enum class EntryId {
  THM_MAIN,
  STEP_CENTERED,
  STEP_CARTESIAN,
  STEP_HALF_BAND,
  COR_NORMBOUND,
  REMARK_POSITIVE,
  COR_SELF_COMMUTATOR,
  SJ_GENERAL,
  SJ_MAX,
  SJ_SINGLE,
  HS_PRODUCT,
  SQRT_PRODUCT,
  NUMRAD_CLAIM,
  THREE_TERM,
  COMMUTATOR_HS,
  SCHWARZ_REVERSE,
  FALSE_TEST,
  THREE_TERM_STATED,  // variant, not part of the listed catalog
};

enum class Status { proven, suspect_step, synthetic_false };

/// Which way the inequality points; `equality` entries assert lhs == rhs.
enum class Direction { upper, lower, equality };

enum class Hypothesis {
  s_normal,
  t_normal,
  s_bands,             // A in [a1,a2], C in [c1,c2]
  t_bands,             // B in [b1,b2], D in [d1,d2]
  s_hermitian,
  t_hermitian,
  s_positive,          // S Hermitian PSD
  t_positive,
  s_real_positive,     // A PSD
  s_imag_positive,     // C PSD
  t_imag_positive,     // D PSD
  product_normal,      // ST normal
  has_xy,
  x_positive_definite,
  unit_vector,
  commutator_bounded,  // n > 0 and n >= ||ST - TS||
  commutator_positive, // ST - TS PSD
};

struct CatalogEntry {
  EntryId id;
  std::string_view name;
  std::string_view description;
  std::span<const Hypothesis> hypotheses;
  Status status;
  Direction direction;
  std::string_view source;          // where the statement lives, in words
  std::string_view default_recipe;  // recipe whose instances satisfy the hypotheses
};

namespace detail {

using H = Hypothesis;
inline constexpr H kNormalBanded[] = {H::s_normal, H::t_normal, H::s_bands, H::t_bands};
inline constexpr H kCorNorm[] = {H::s_normal, H::t_normal, H::s_imag_positive, H::t_imag_positive};
inline constexpr H kRemark[] = {H::s_positive, H::t_positive};
inline constexpr H kSelfCommutator[] = {H::s_real_positive, H::s_imag_positive};
inline constexpr H kSjTwo[] = {H::s_normal, H::t_normal, H::s_bands, H::t_bands, H::has_xy};
inline constexpr H kSjSingle[] = {H::s_normal, H::s_bands, H::has_xy};
inline constexpr H kProduct[] = {H::s_normal, H::t_normal, H::product_normal};
inline constexpr H kNumrad[] = {H::s_normal, H::t_normal};
inline constexpr H kThreeTerm[] = {H::s_hermitian, H::t_hermitian, H::x_positive_definite};
inline constexpr H kCommutatorHs[] = {H::s_positive, H::t_positive, H::has_xy};
inline constexpr H kSchwarz[] = {H::s_hermitian, H::t_hermitian, H::commutator_positive, H::unit_vector,
                                 H::commutator_bounded};

// clang-format off
inline constexpr CatalogEntry kEntries[] = {
  {EntryId::THM_MAIN, "THM_MAIN",
   "||ST-TS|| <= 1/2 sqrt((a2-a1)^2+(c2-c1)^2) sqrt((b2-b1)^2+(d2-d1)^2)",
   kNormalBanded, Status::proven, Direction::upper,
   "main commutator bound for normal operators with banded cartesian parts", "positive-normal"},
  {EntryId::STEP_CENTERED, "STEP_CENTERED",
   "||ST-TS|| <= 2 ||S-z|| ||T-w||",
   kNormalBanded, Status::proven, Direction::upper,
   "commutator bound after shifting by the band centres z, w", "normal"},
  {EntryId::STEP_CARTESIAN, "STEP_CARTESIAN",
   "||S-z||^2 <= ||A-a||^2 + ||C-c||^2 (and likewise for T)",
   kNormalBanded, Status::proven, Direction::upper,
   "shifted norm split over the cartesian parts", "normal"},
  {EntryId::STEP_HALF_BAND, "STEP_HALF_BAND",
   "||S-z|| <= 1/2 sqrt((a2-a1)^2+(c2-c1)^2) (and likewise for T)",
   kNormalBanded, Status::proven, Direction::upper,
   "shifted norm bounded by the half diagonal of the band rectangle", "normal"},
  {EntryId::COR_NORMBOUND, "COR_NORMBOUND",
   "||ST-TS|| <= 1/2 sqrt(4||A||^2+||C||^2) sqrt(4||B||^2+||D||^2), C, D >= 0",
   kCorNorm, Status::proven, Direction::upper,
   "commutator bound through part norms, positive imaginary parts", "positive-normal"},
  {EntryId::REMARK_POSITIVE, "REMARK_POSITIVE",
   "||ST-TS|| <= 1/2 sqrt(||A||^2+4||C||^2) sqrt(||B||^2+4||D||^2), S, T >= 0",
   kRemark, Status::proven, Direction::upper,
   "commutator bound through part norms, positive operators", "positive"},
  {EntryId::COR_SELF_COMMUTATOR, "COR_SELF_COMMUTATOR",
   "||S*S-SS*|| <= 1/2 (||A||^2+||C||^2), A, C >= 0",
   kSelfCommutator, Status::proven, Direction::upper,
   "self-commutator bound via the arithmetic-geometric mean inequality", "positive-parts"},
  {EntryId::SJ_GENERAL, "SJ_GENERAL",
   "s_j(SX-YT) <= (max(b2-a1,a2-b1) + max(d2-c1,c2-d1)) s_j(X (+) Y)",
   kSjTwo, Status::suspect_step, Direction::upper,
   "singular-value bound, general band form", "normal+xy"},
  {EntryId::SJ_MAX, "SJ_MAX",
   "s_j(SX-YT) <= max(||A||,||B||) s_j(X (+) Y)",
   kSjTwo, Status::suspect_step, Direction::upper,
   "singular-value bound, stated special form", "normal+xy"},
  {EntryId::SJ_SINGLE, "SJ_SINGLE",
   "s_j(SX-YS) <= sqrt((a2-a1)^2+(c2-c1)^2) s_j(X (+) Y)",
   kSjSingle, Status::suspect_step, Direction::upper,
   "singular-value bound for a single normal operator", "normal+xy"},
  {EntryId::HS_PRODUCT, "HS_PRODUCT",
   "||ST||_2 <= ||TS||_2 for normal S, T with ST normal",
   kProduct, Status::proven, Direction::upper,
   "Hilbert-Schmidt norm of a normal product", "normal+shared"},
  {EntryId::SQRT_PRODUCT, "SQRT_PRODUCT",
   "|| |ST|^(1/2) || <= || |TS|^(1/2) || for normal S, T with ST normal",
   kProduct, Status::suspect_step, Direction::upper,
   "square-root modulus of a normal product", "normal+shared"},
  {EntryId::NUMRAD_CLAIM, "NUMRAD_CLAIM",
   "w(ST) = ||TS|| for normal S, T",
   kNumrad, Status::suspect_step, Direction::equality,
   "numerical radius of a product of normal operators", "normal"},
  {EntryId::THREE_TERM, "THREE_TERM",
   "||S-T||_2^2 <= ||SX-XT||_2 ||X^-1 S - T X^-1||_2, X > 0, S, T Hermitian",
   kThreeTerm, Status::proven, Direction::upper,
   "three-term Hilbert-Schmidt bound, single-power form", "hermitian+pdx"},
  {EntryId::COMMUTATOR_HS, "COMMUTATOR_HS",
   "||SX-XT||_2 <= ||X||_2 (||S||_2^2 + ||T||_2^2)^(1/2), S, T >= 0",
   kCommutatorHs, Status::suspect_step, Direction::upper,
   "generalised commutator in Hilbert-Schmidt norm", "positive+xy"},
  {EntryId::SCHWARZ_REVERSE, "SCHWARZ_REVERSE",
   "||STx||^2 >= (1/n^2)(||STx||^4 - |<(ST)^2 x, x>|^2), ||x|| = 1, ||ST-TS|| <= n",
   kSchwarz, Status::proven, Direction::lower,
   "reverse quadratic Schwarz bound for products", "hermitian+shared+vec"},
  {EntryId::FALSE_TEST, "FALSE_TEST",
   "||ST-TS|| <= 0 (deliberately false)",
   {}, Status::synthetic_false, Direction::upper,
   "synthetic entry exercising violation reports", "generic"},
  {EntryId::THREE_TERM_STATED, "THREE_TERM_STATED",
   "||S-T||_2^2 <= ||SX-XT||_2^2 ||X^-1 S - T X^-1||_2^2, X > 0, S, T Hermitian",
   kThreeTerm, Status::suspect_step, Direction::upper,
   "three-term Hilbert-Schmidt bound, squared-factor form", "hermitian+pdx"},
};
// clang-format on

}  // namespace detail

/// The listed catalog (17 entries).
inline std::span<const CatalogEntry> catalog() { return {detail::kEntries, 17}; }

/// Evaluable variants kept out of the listed catalog.
inline std::span<const CatalogEntry> catalog_variants() { return {detail::kEntries + 17, 1}; }

inline const CatalogEntry& entry(EntryId id) {
  for (const auto& e : detail::kEntries) {
    if (e.id == id) return e;
  }
  throw InputError("unknown catalog entry");
}

inline const CatalogEntry& find_entry(std::string_view name) {
  for (const auto& e : detail::kEntries) {
    if (e.name == name) return e;
  }
  throw InputError("unknown catalog entry '" + std::string(name) + "'");
}

inline std::string_view status_name(Status s) {
  switch (s) {
    case Status::proven: return "proven";
    case Status::suspect_step: return "suspect-step";
    case Status::synthetic_false: return "synthetic-false";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Reports

enum class Verdict { satisfied, violated, not_applicable };

inline std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::satisfied: return "satisfied";
    case Verdict::violated: return "violated";
    case Verdict::not_applicable: return "not-applicable";
  }
  return "unknown";
}

/// One index j of a singular-value entry.
struct IndexDetail {
  std::size_t j = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
};

struct InequalityReport {
  EntryId entry = EntryId::FALSE_TEST;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool satisfied = false;
  Verdict verdict = Verdict::not_applicable;
  std::vector<std::string> hypothesis_violations;
  Fingerprint fingerprint;
  std::vector<IndexDetail> per_index;
  std::vector<std::pair<std::string, double>> extras;  // named side quantities
  double tol = kDefaultTol;
};

// ---------------------------------------------------------------------------
// Hypothesis validation

namespace detail {

inline bool within(const std::vector<double>& spectrum, Band band, double tol) {
  return spectrum.back() >= band.lo - tol && spectrum.front() <= band.hi + tol;
}

inline void check_bands(const ComplexMatrix& m, Band re, Band im, const char* re_name, const char* im_name,
                        const char* re_band, const char* im_band, double tol, std::vector<std::string>& out) {
  const auto parts = cartesian_decomposition(m);
  if (!within(hermitian_eigenvalues(parts.real), re, tol)) {
    out.push_back(std::string(re_name) + " outside " + re_band);
  }
  if (!within(hermitian_eigenvalues(parts.imag), im, tol)) {
    out.push_back(std::string(im_name) + " outside " + im_band);
  }
}

}  // namespace detail

/// Empty iff every structural hypothesis of the entry holds at `tol`.
inline std::vector<std::string> validate_hypotheses(const CatalogEntry& e, const Instance& inst,
                                                    double tol = kClassifyTol) {
  std::vector<std::string> out;
  const auto& S = inst.S;
  const auto& T = inst.T;
  if (S.rows() != S.cols() || T.rows() != T.cols() || S.rows() != T.rows()) {
    out.emplace_back("S and T must be square of equal size");
    return out;
  }
  for (const Hypothesis h : e.hypotheses) {
    switch (h) {
      case Hypothesis::s_normal:
        if (!is_normal(S, tol)) out.emplace_back("S not normal");
        break;
      case Hypothesis::t_normal:
        if (!is_normal(T, tol)) out.emplace_back("T not normal");
        break;
      case Hypothesis::s_bands:
        if (!inst.bounds.ordered()) out.emplace_back("bounds not ordered");
        detail::check_bands(S, inst.bounds.a(), inst.bounds.c(), "A", "C", "[a1,a2]", "[c1,c2]", tol, out);
        break;
      case Hypothesis::t_bands:
        detail::check_bands(T, inst.bounds.b(), inst.bounds.d(), "B", "D", "[b1,b2]", "[d1,d2]", tol, out);
        break;
      case Hypothesis::s_hermitian:
        if (!is_hermitian(S, tol)) out.emplace_back("S not Hermitian");
        break;
      case Hypothesis::t_hermitian:
        if (!is_hermitian(T, tol)) out.emplace_back("T not Hermitian");
        break;
      case Hypothesis::s_positive:
        if (!is_positive_semidefinite(S, tol)) out.emplace_back("S not PSD");
        break;
      case Hypothesis::t_positive:
        if (!is_positive_semidefinite(T, tol)) out.emplace_back("T not PSD");
        break;
      case Hypothesis::s_real_positive:
        if (!is_positive_semidefinite(cartesian_decomposition(S).real, tol)) out.emplace_back("A not PSD");
        break;
      case Hypothesis::s_imag_positive:
        if (!is_positive_semidefinite(cartesian_decomposition(S).imag, tol)) out.emplace_back("C not PSD");
        break;
      case Hypothesis::t_imag_positive:
        if (!is_positive_semidefinite(cartesian_decomposition(T).imag, tol)) out.emplace_back("D not PSD");
        break;
      case Hypothesis::product_normal:
        if (!is_normal(S * T, tol)) out.emplace_back("ST not normal");
        break;
      case Hypothesis::has_xy:
        if (!inst.X) out.emplace_back("X missing");
        if (!inst.Y) out.emplace_back("Y missing");
        if (inst.X && (inst.X->rows() != S.rows() || inst.X->cols() != S.cols())) out.emplace_back("X shape");
        if (inst.Y && (inst.Y->rows() != S.rows() || inst.Y->cols() != S.cols())) out.emplace_back("Y shape");
        break;
      case Hypothesis::x_positive_definite:
        if (!inst.X) {
          out.emplace_back("X missing");
        } else if (inst.X->rows() != S.rows() || inst.X->cols() != S.cols()) {
          out.emplace_back("X shape");
        } else if (!is_hermitian(*inst.X, tol) || min_hermitian_eigenvalue(*inst.X) <= 0.0) {
          out.emplace_back("X not positive definite");
        }
        break;
      case Hypothesis::unit_vector:
        if (!inst.x) {
          out.emplace_back("x missing");
        } else if (inst.x->size() != S.rows()) {
          out.emplace_back("x shape");
        } else if (std::abs(inst.x->norm() - 1.0) > 1e-12) {
          out.emplace_back("x not unit");
        }
        break;
      case Hypothesis::commutator_bounded:
        if (!inst.n) {
          out.emplace_back("n missing");
        } else if (!(*inst.n > 0.0)) {
          out.emplace_back("n not positive");
        } else if (*inst.n < op_norm(commutator(S, T)) - 1e-9) {
          out.emplace_back("n below ||ST-TS||");
        }
        break;
      case Hypothesis::commutator_positive:
        if (!is_positive_semidefinite(commutator(S, T), tol)) out.emplace_back("ST-TS not PSD");
        break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

/// lhs = ||STx||^2, rhs = coefficient * (||STx||^4 - |<(ST)^2 x, x>|^2).
struct SchwarzTerms {
  double lhs = 0.0;
  double rhs = 0.0;
  double inner = 0.0;  // |<(ST)^2 x, x>|
};

inline SchwarzTerms schwarz_terms(const ComplexMatrix& s, const ComplexMatrix& t, const ComplexVector& x,
                                  double coefficient) {
  const ComplexMatrix st = multiply(s, t);
  const ComplexVector stx = st * x;
  const double sq = stx.squaredNorm();
  const Complex q = x.dot(st * stx);  // <(ST)^2 x, x> = x* (ST)^2 x
  SchwarzTerms out;
  out.lhs = sq;
  out.inner = std::abs(q);
  out.rhs = coefficient * (sq * sq - out.inner * out.inner);
  return out;
}

namespace detail {

inline const ComplexMatrix& require(const std::optional<ComplexMatrix>& m, const char* name, std::string_view entry) {
  if (!m) throw InputError(std::string(entry) + " needs matrix " + name);
  return *m;
}

inline double hypot_width(Band x, Band y) { return std::hypot(x.width(), y.width()); }

inline void finish_singular(InequalityReport& r, const SingularValueList& lhs, const SingularValueList& sum,
                            double coefficient) {
  bool any = false;
  for (std::size_t j = 1; j <= sum.size(); ++j) {
    const double sj = sum.at(j);
    if (!(sj > 1e-12)) continue;
    IndexDetail d{j, lhs.at(j), coefficient * sj, coefficient * sj - lhs.at(j)};
    if (!any || d.margin < r.margin) {
      r.lhs = d.lhs;
      r.rhs = d.rhs;
      r.margin = d.margin;
      any = true;
    }
    r.per_index.push_back(d);
  }
  if (!any) r.lhs = r.rhs = r.margin = 0.0;
}

inline void side(InequalityReport& r, double lhs, double rhs) {
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
}

// The worse of two sides (S-side and T-side of the same inequality).
inline void worse_side(InequalityReport& r, std::pair<double, double> s_side, std::pair<double, double> t_side) {
  const auto& pick = (s_side.second - s_side.first) <= (t_side.second - t_side.first) ? s_side : t_side;
  side(r, pick.first, pick.second);
  r.extras.emplace_back("margin_S", s_side.second - s_side.first);
  r.extras.emplace_back("margin_T", t_side.second - t_side.first);
}

}  // namespace detail

/// Evaluates the entry's two sides on `inst`. Hypothesis failures are recorded
/// in the report (verdict not-applicable); missing matrices throw InputError.
inline InequalityReport evaluate(const CatalogEntry& e, const Instance& inst, double tol = kDefaultTol) {
  InequalityReport r;
  r.entry = e.id;
  r.fingerprint = inst.fingerprint();
  r.tol = tol;
  require_square(inst.S, e.name.data());
  require_same_shape(inst.S, inst.T, e.name.data());
  r.hypothesis_violations = validate_hypotheses(e, inst);

  const ComplexMatrix& S = inst.S;
  const ComplexMatrix& T = inst.T;
  const auto& b = inst.bounds;
  const auto I = identity(S.rows());

  switch (e.id) {
    case EntryId::THM_MAIN:
      detail::side(r, op_norm(commutator(S, T)), 0.5 * detail::hypot_width(b.a(), b.c()) * detail::hypot_width(b.b(), b.d()));
      break;
    case EntryId::STEP_CENTERED: {
      const double sz = op_norm(S - b.z() * I);
      const double tw = op_norm(T - b.w() * I);
      detail::side(r, op_norm(commutator(S, T)), 2.0 * sz * tw);
      r.extras.emplace_back("norm_S_minus_z", sz);
      r.extras.emplace_back("norm_T_minus_w", tw);
      break;
    }
    case EntryId::STEP_CARTESIAN: {
      auto one = [&](const ComplexMatrix& m, Complex centre) {
        const auto parts = cartesian_decomposition(m);
        const double shifted = op_norm(m - centre * I);
        const double re = op_norm(parts.real - centre.real() * I);
        const double im = op_norm(parts.imag - centre.imag() * I);
        return std::pair{shifted * shifted, re * re + im * im};
      };
      detail::worse_side(r, one(S, b.z()), one(T, b.w()));
      break;
    }
    case EntryId::STEP_HALF_BAND:
      detail::worse_side(r, {op_norm(S - b.z() * I), 0.5 * detail::hypot_width(b.a(), b.c())},
                         {op_norm(T - b.w() * I), 0.5 * detail::hypot_width(b.b(), b.d())});
      break;
    case EntryId::COR_NORMBOUND:
    case EntryId::REMARK_POSITIVE: {
      const auto ps = cartesian_decomposition(S);
      const auto pt = cartesian_decomposition(T);
      const double A = op_norm(ps.real), C = op_norm(ps.imag), B = op_norm(pt.real), D = op_norm(pt.imag);
      const double rhs = e.id == EntryId::COR_NORMBOUND
                             ? 0.5 * std::sqrt(4 * A * A + C * C) * std::sqrt(4 * B * B + D * D)
                             : 0.5 * std::sqrt(A * A + 4 * C * C) * std::sqrt(B * B + 4 * D * D);
      detail::side(r, op_norm(commutator(S, T)), rhs);
      break;
    }
    case EntryId::COR_SELF_COMMUTATOR: {
      const auto ps = cartesian_decomposition(S);
      const double A = op_norm(ps.real), C = op_norm(ps.imag);
      detail::side(r, op_norm(S.adjoint() * S - S * S.adjoint()), 0.5 * (A * A + C * C));
      break;
    }
    case EntryId::SJ_GENERAL:
    case EntryId::SJ_MAX:
    case EntryId::SJ_SINGLE: {
      const auto& X = detail::require(inst.X, "X", e.name);
      const auto& Y = detail::require(inst.Y, "Y", e.name);
      require_same_shape(S, X, e.name.data());
      require_same_shape(S, Y, e.name.data());
      double coefficient = 0.0;
      ComplexMatrix diff;
      if (e.id == EntryId::SJ_SINGLE) {
        diff = S * X - Y * S;
        coefficient = detail::hypot_width(b.a(), b.c());
      } else {
        diff = S * X - Y * T;
        if (e.id == EntryId::SJ_GENERAL) {
          coefficient = std::max(b.b2 - b.a1, b.a2 - b.b1) + std::max(b.d2 - b.c1, b.c2 - b.d1);
        } else {
          coefficient = std::max(op_norm(cartesian_decomposition(S).real), op_norm(cartesian_decomposition(T).real));
        }
      }
      r.extras.emplace_back("coefficient", coefficient);
      detail::finish_singular(r, singular_values(diff), singular_values(direct_sum(X, Y)), coefficient);
      break;
    }
    case EntryId::HS_PRODUCT: {
      const double st = hs_norm(S * T), ts = hs_norm(T * S);
      detail::side(r, st, ts);
      r.extras.emplace_back("equality_gap", std::abs(st - ts));
      break;
    }
    case EntryId::SQRT_PRODUCT:
      detail::side(r, op_norm(matrix_abs_sqrt(S * T)), op_norm(matrix_abs_sqrt(T * S)));
      break;
    case EntryId::NUMRAD_CLAIM: {
      r.lhs = numerical_radius(S * T);
      r.rhs = op_norm(T * S);
      r.margin = -std::abs(r.lhs - r.rhs);
      break;
    }
    case EntryId::THREE_TERM:
    case EntryId::THREE_TERM_STATED: {
      const auto& X = detail::require(inst.X, "X", e.name);
      require_same_shape(S, X, e.name.data());
      const auto sv = singular_values(X);
      if (sv.values.back() <= 0.0 || sv.values.front() / sv.values.back() > 1e12) {
        throw HypothesisError(std::string(e.name) + ": X is numerically singular");
      }
      const ComplexMatrix Xinv = X.partialPivLu().inverse();
      const double d = hs_norm(S - T);
      const double left = hs_norm(S * X - X * T);
      const double right = hs_norm(Xinv * S - T * Xinv);
      const double rhs = e.id == EntryId::THREE_TERM ? left * right : left * left * right * right;
      detail::side(r, d * d, rhs);
      break;
    }
    case EntryId::COMMUTATOR_HS: {
      const auto& X = detail::require(inst.X, "X", e.name);
      require_same_shape(S, X, e.name.data());
      const double s2 = hs_norm(S), t2 = hs_norm(T);
      detail::side(r, hs_norm(S * X - X * T), hs_norm(X) * std::sqrt(s2 * s2 + t2 * t2));
      break;
    }
    case EntryId::SCHWARZ_REVERSE: {
      if (!inst.x) throw InputError("SCHWARZ_REVERSE needs vector x");
      if (!inst.n) throw InputError("SCHWARZ_REVERSE needs n");
      if (inst.x->size() != S.rows()) throw ShapeError("SCHWARZ_REVERSE: x has the wrong length");
      const double n = *inst.n;
      const auto terms = schwarz_terms(S, T, *inst.x, n > 0.0 ? 1.0 / (n * n) : 0.0);
      r.lhs = terms.lhs;
      r.rhs = terms.rhs;
      r.margin = terms.lhs - terms.rhs;
      r.extras.emplace_back("inner_product_modulus", terms.inner);
      break;
    }
    case EntryId::FALSE_TEST:
      detail::side(r, op_norm(commutator(S, T)), 0.0);
      break;
  }

  const bool ok = r.margin >= -scaled_tol(tol, r.rhs);
  if (!r.hypothesis_violations.empty()) {
    r.verdict = Verdict::not_applicable;
    r.satisfied = false;
  } else {
    r.verdict = ok ? Verdict::satisfied : Verdict::violated;
    r.satisfied = ok;
  }
  return r;
}

inline InequalityReport evaluate(EntryId id, const Instance& inst, double tol = kDefaultTol) {
  return evaluate(entry(id), inst, tol);
}

}  // namespace normlab
