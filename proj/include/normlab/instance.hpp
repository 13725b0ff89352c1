#pragma once

// Seeded construction of operators that satisfy the structural hypotheses of
// the catalog entries. Everything is a pure function of (recipe, dim, seed).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "normlab/errors.hpp"
#include "normlab/spectral.hpp"

namespace normlab {

// ---------------------------------------------------------------------------
// Seeds

/// splitmix64 finaliser.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Per-trial seed derived from (master, index); independent of evaluation order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master ^ mix64(index + 0x632be59bd9b4e019ULL));
}

using Rng = std::mt19937_64;

inline ComplexMatrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

inline ComplexVector random_unit_vector(Eigen::Index dim, Rng& rng) {
  ComplexVector v = gaussian_matrix(dim, 1, rng);
  return v / v.norm();
}

// ---------------------------------------------------------------------------
// Spectral bounds

struct Band {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] double width() const { return hi - lo; }
  [[nodiscard]] double centre() const { return 0.5 * (lo + hi); }
  bool operator==(const Band&) const = default;
};

/// a1 <= A <= a2, c1 <= C <= c2 for S = A + iC; b, d likewise for T = B + iD.
struct SpectralBounds {
  double a1 = 0, a2 = 0, b1 = 0, b2 = 0, c1 = 0, c2 = 0, d1 = 0, d2 = 0;

  [[nodiscard]] Band a() const { return {a1, a2}; }
  [[nodiscard]] Band b() const { return {b1, b2}; }
  [[nodiscard]] Band c() const { return {c1, c2}; }
  [[nodiscard]] Band d() const { return {d1, d2}; }
  [[nodiscard]] Complex z() const { return {0.5 * (a1 + a2), 0.5 * (c1 + c2)}; }
  [[nodiscard]] Complex w() const { return {0.5 * (b1 + b2), 0.5 * (d1 + d2)}; }

  [[nodiscard]] bool ordered() const { return a1 <= a2 && b1 <= b2 && c1 <= c2 && d1 <= d2; }
  bool operator==(const SpectralBounds&) const = default;
};

// ---------------------------------------------------------------------------
// Operator parametrisation

/// M = U diag(re + i im) U* when `normal`; otherwise
/// M = U_re diag(re) U_re* + i U_im diag(im) U_im* (independent cartesian parts).
struct OperatorFactors {
  ComplexMatrix real_basis;
  ComplexMatrix imag_basis;
  std::vector<double> real_spectrum;
  std::vector<double> imag_spectrum;
  Band real_band;
  Band imag_band;
  bool normal = true;
};

namespace detail {

inline ComplexMatrix conjugate_diagonal(const ComplexMatrix& basis, const ComplexVector& diag) {
  return basis * diag.asDiagonal() * basis.adjoint();
}

inline ComplexMatrix hermitize(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace detail

inline ComplexMatrix assemble(const OperatorFactors& f) {
  const auto n = static_cast<Eigen::Index>(f.real_spectrum.size());
  if (f.normal) {
    ComplexVector diag(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      diag(k) = Complex(f.real_spectrum[static_cast<std::size_t>(k)], f.imag_spectrum[static_cast<std::size_t>(k)]);
    }
    return detail::conjugate_diagonal(f.real_basis, diag);
  }
  ComplexVector re(n), im(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    re(k) = f.real_spectrum[static_cast<std::size_t>(k)];
    im(k) = f.imag_spectrum[static_cast<std::size_t>(k)];
  }
  const ComplexMatrix a = detail::hermitize(detail::conjugate_diagonal(f.real_basis, re));
  const ComplexMatrix c = detail::hermitize(detail::conjugate_diagonal(f.imag_basis, im));
  return a + Complex(0.0, 1.0) * c;
}

// ---------------------------------------------------------------------------
// Elementary generators

/// Haar-distributed unitary: QR of a complex Gaussian with the phases of R removed.
inline ComplexMatrix random_unitary(Eigen::Index dim, std::uint64_t seed) {
  if (dim < 1) throw ShapeError("random_unitary: dimension must be at least 1");
  Rng rng(seed);
  const ComplexMatrix g = gaussian_matrix(dim, dim, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
  const ComplexMatrix& r = qr.matrixQR();
  for (Eigen::Index k = 0; k < dim; ++k) {
    const double mod = std::abs(r(k, k));
    const Complex phase = mod > 0.0 ? r(k, k) / mod : Complex(1.0, 0.0);
    q.col(k) *= phase;
  }
  return q;
}

namespace detail {

// A list of `dim` values in [lo, hi] with lo and hi each attained once, shuffled.
inline std::vector<double> pinned_spectrum(std::size_t dim, Band band, Rng& rng) {
  std::uniform_real_distribution<double> uniform(band.lo, band.hi);
  std::vector<double> out(dim);
  out[0] = band.lo;
  out[1] = band.hi;
  for (std::size_t k = 2; k < dim; ++k) out[k] = band.lo == band.hi ? band.lo : uniform(rng);
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

inline void require_band(Band band, const char* what) {
  if (!(band.lo <= band.hi) || !std::isfinite(band.lo) || !std::isfinite(band.hi)) {
    throw HypothesisError(std::string(what) + ": band [" + std::to_string(band.lo) + ", " +
                          std::to_string(band.hi) + "] is empty");
  }
}

}  // namespace detail

inline OperatorFactors hermitian_factors(Eigen::Index dim, Band band, std::uint64_t seed) {
  detail::require_band(band, "random_hermitian_banded");
  if (dim < 2) throw ShapeError("random_hermitian_banded: dimension must be at least 2");
  Rng rng(mix64(seed));
  OperatorFactors f;
  f.real_basis = random_unitary(dim, derive_seed(seed, 1));
  f.imag_basis = f.real_basis;
  f.real_spectrum = detail::pinned_spectrum(static_cast<std::size_t>(dim), band, rng);
  f.imag_spectrum.assign(static_cast<std::size_t>(dim), 0.0);
  f.real_band = band;
  f.imag_band = {0.0, 0.0};
  f.normal = true;
  return f;
}

/// Hermitian matrix with spectrum in [lo, hi], both endpoints attained.
inline ComplexMatrix random_hermitian_banded(Eigen::Index dim, double lo, double hi, std::uint64_t seed) {
  return detail::hermitize(assemble(hermitian_factors(dim, {lo, hi}, seed)));
}

/// Normal factors: real and imaginary spectra drawn independently in their bands
/// (endpoints pinned) over one shared eigenbasis.
inline OperatorFactors normal_factors(Eigen::Index dim, Band real_band, Band imag_band, const ComplexMatrix& basis,
                                      Rng& rng) {
  detail::require_band(real_band, "random_normal_banded");
  detail::require_band(imag_band, "random_normal_banded");
  if (dim < 2) throw ShapeError("random_normal_banded: dimension must be at least 2");
  OperatorFactors f;
  f.real_basis = basis;
  f.imag_basis = basis;
  f.real_spectrum = detail::pinned_spectrum(static_cast<std::size_t>(dim), real_band, rng);
  f.imag_spectrum = detail::pinned_spectrum(static_cast<std::size_t>(dim), imag_band, rng);
  f.real_band = real_band;
  f.imag_band = imag_band;
  f.normal = true;
  return f;
}

enum class OperatorSlot { S, T };

inline ComplexMatrix random_normal_banded(Eigen::Index dim, const SpectralBounds& bounds, OperatorSlot slot,
                                          std::uint64_t seed) {
  if (!bounds.ordered()) throw HypothesisError("random_normal_banded: bounds are not ordered");
  if (dim < 2) throw ShapeError("random_normal_banded: dimension must be at least 2");
  Rng rng(mix64(seed));
  const ComplexMatrix basis = random_unitary(dim, derive_seed(seed, 1));
  const Band re = slot == OperatorSlot::S ? bounds.a() : bounds.b();
  const Band im = slot == OperatorSlot::S ? bounds.c() : bounds.d();
  return assemble(normal_factors(dim, re, im, basis, rng));
}

/// Factors for an arbitrary square matrix, recovered numerically: a Schur form
/// for normal input, separate eigendecompositions of the cartesian parts otherwise.
inline OperatorFactors recover_factors(const ComplexMatrix& m, Band real_band, Band imag_band) {
  require_square(m, "recover_factors");
  OperatorFactors f;
  f.real_band = real_band;
  f.imag_band = imag_band;
  const auto n = static_cast<std::size_t>(m.rows());
  if (is_normal(m, 1e-10)) {
    Eigen::ComplexSchur<ComplexMatrix> schur(m);
    f.real_basis = schur.matrixU();
    f.imag_basis = f.real_basis;
    const ComplexMatrix& tri = schur.matrixT();
    for (std::size_t k = 0; k < n; ++k) {
      f.real_spectrum.push_back(tri(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)).real());
      f.imag_spectrum.push_back(tri(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)).imag());
    }
    f.normal = true;
    return f;
  }
  const auto parts = cartesian_decomposition(m);
  const auto re = hermitian_eig(parts.real);
  const auto im = hermitian_eig(parts.imag);
  f.real_basis = re.eigenvectors;
  f.imag_basis = im.eigenvectors;
  f.real_spectrum = re.eigenvalues;
  f.imag_spectrum = im.eigenvalues;
  f.normal = false;
  return f;
}

// ---------------------------------------------------------------------------
// Recipes

enum class OperatorFamily {
  normal,           // S, T normal with bands anywhere on the line
  positive_normal,  // normal with all four cartesian parts positive semidefinite
  hermitian,        // S, T Hermitian
  positive,         // S, T Hermitian positive semidefinite
  positive_parts,   // S, T non-normal with PSD cartesian parts in independent bases
  generic,          // unstructured Gaussian S, T; bounds read off the spectra
  equality_example  // the fixed 2x2 pair on which the Schwarz-type bound with constant 1/2 is attained
};

struct Recipe {
  OperatorFamily family = OperatorFamily::normal;
  bool shared_basis = false;         // T diagonalised by S's eigenbasis
  bool identical = false;            // T = S
  bool overlap = false;              // T shares half of S's eigenvalues (non-trivial kernels)
  bool with_xy = false;              // X, Y Gaussian
  bool positive_definite_x = false;  // X positive definite, spectrum in [0.2, 3]
  bool with_vector = false;          // unit x and n = ||ST - TS||
  std::optional<SpectralBounds> bounds;

  [[nodiscard]] std::string str() const;
  static Recipe parse(std::string_view text);
  bool operator==(const Recipe&) const = default;
};

namespace detail {

struct FamilyName {
  OperatorFamily family;
  std::string_view name;
};

inline constexpr FamilyName kFamilyNames[] = {
    {OperatorFamily::normal, "normal"},
    {OperatorFamily::positive_normal, "positive-normal"},
    {OperatorFamily::hermitian, "hermitian"},
    {OperatorFamily::positive, "positive"},
    {OperatorFamily::positive_parts, "positive-parts"},
    {OperatorFamily::generic, "generic"},
    {OperatorFamily::equality_example, "equality-example"},
};

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline std::string_view family_name(OperatorFamily family) {
  for (const auto& f : detail::kFamilyNames) {
    if (f.family == family) return f.name;
  }
  return "unknown";
}

inline std::string Recipe::str() const {
  std::string out(family_name(family));
  if (shared_basis) out += "+shared";
  if (identical) out += "+same";
  if (overlap) out += "+overlap";
  if (with_xy) out += "+xy";
  if (positive_definite_x) out += "+pdx";
  if (with_vector) out += "+vec";
  if (bounds) {
    const auto& b = *bounds;
    out += ";bounds=";
    const double v[] = {b.a1, b.a2, b.b1, b.b2, b.c1, b.c2, b.d1, b.d2};
    for (std::size_t k = 0; k < 8; ++k) {
      if (k) out += ':';
      out += detail::format_double(v[k]);
    }
  }
  return out;
}

/// Grammar: family[+option...][;bounds=a1:a2:b1:b2:c1:c2:d1:d2]
inline Recipe Recipe::parse(std::string_view text) {
  Recipe r;
  std::string_view head = text;
  std::string_view tail;
  if (const auto semi = text.find(';'); semi != std::string_view::npos) {
    head = text.substr(0, semi);
    tail = text.substr(semi + 1);
  }
  std::vector<std::string_view> tokens;
  for (std::size_t start = 0;;) {
    const auto plus = head.find('+', start);
    tokens.push_back(head.substr(start, plus == std::string_view::npos ? std::string_view::npos : plus - start));
    if (plus == std::string_view::npos) break;
    start = plus + 1;
  }
  bool known = false;
  for (const auto& f : detail::kFamilyNames) {
    if (f.name == tokens.front()) {
      r.family = f.family;
      known = true;
    }
  }
  if (!known) throw InputError("unknown recipe family '" + std::string(tokens.front()) + "'");
  for (std::size_t k = 1; k < tokens.size(); ++k) {
    const auto t = tokens[k];
    if (t == "shared") r.shared_basis = true;
    else if (t == "same") r.identical = true;
    else if (t == "overlap") r.overlap = true;
    else if (t == "xy") r.with_xy = true;
    else if (t == "pdx") r.positive_definite_x = true;
    else if (t == "vec") r.with_vector = true;
    else throw InputError("unknown recipe option '" + std::string(t) + "'");
  }
  if (!tail.empty()) {
    constexpr std::string_view key = "bounds=";
    if (tail.substr(0, key.size()) != key) throw InputError("malformed recipe suffix '" + std::string(tail) + "'");
    std::string values(tail.substr(key.size()));
    double v[8];
    std::size_t pos = 0;
    for (int k = 0; k < 8; ++k) {
      const auto colon = values.find(':', pos);
      if ((colon == std::string::npos) != (k == 7)) throw InputError("recipe bounds need exactly 8 values");
      try {
        v[k] = std::stod(values.substr(pos, colon - pos));
      } catch (const std::exception&) {
        throw InputError("recipe bounds: cannot parse '" + values.substr(pos, colon - pos) + "'");
      }
      pos = colon + 1;
    }
    r.bounds = SpectralBounds{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
  }
  return r;
}

/// FNV-1a of the canonical recipe string.
inline std::uint64_t recipe_hash(const std::string& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Instance

struct Fingerprint {
  std::uint64_t seed = 0;
  std::size_t dim = 0;
  std::string recipe;
  std::uint64_t recipe_hash = 0;
  bool operator==(const Fingerprint&) const = default;
  auto operator<=>(const Fingerprint&) const = default;
};

struct Instance {
  ComplexMatrix S;
  ComplexMatrix T;
  std::optional<ComplexMatrix> X;
  std::optional<ComplexMatrix> Y;
  std::optional<ComplexMatrix> C;  // derivation kernel element, when attached
  std::optional<ComplexVector> x;
  std::optional<double> n;
  SpectralBounds bounds;
  std::uint64_t seed = 0;
  std::size_t dim = 0;
  std::string recipe;

  // Generator-side parametrisation; absent for instances read from disk.
  std::optional<OperatorFactors> s_factors;
  std::optional<OperatorFactors> t_factors;
  std::optional<OperatorFactors> x_factors;

  [[nodiscard]] Fingerprint fingerprint() const { return {seed, dim, recipe, recipe_hash(recipe)}; }
};

/// Tight bounds read off the spectra of the cartesian parts of S and T.
inline SpectralBounds bounds_from_spectra(const ComplexMatrix& s, const ComplexMatrix& t) {
  const auto ps = cartesian_decomposition(s);
  const auto pt = cartesian_decomposition(t);
  const auto a = hermitian_eigenvalues(ps.real);
  const auto c = hermitian_eigenvalues(ps.imag);
  const auto b = hermitian_eigenvalues(pt.real);
  const auto d = hermitian_eigenvalues(pt.imag);
  return {a.back(), a.front(), b.back(), b.front(), c.back(), c.front(), d.back(), d.front()};
}

/// The 2x2 pair S = [[1,1],[1,-1]], T = [[0,1],[1,0]], x = (0,1), n = 2, with tight bounds.
inline Instance schwarz_equality_example() {
  Instance inst;
  inst.dim = 2;
  inst.S.resize(2, 2);
  inst.S << 1.0, 1.0, 1.0, -1.0;
  inst.T.resize(2, 2);
  inst.T << 0.0, 1.0, 1.0, 0.0;
  ComplexVector x(2);
  x << 0.0, 1.0;
  inst.x = x;
  inst.n = 2.0;
  const double r2 = std::sqrt(2.0);
  inst.bounds = {-r2, r2, -1.0, 1.0, 0.0, 0.0, 0.0, 0.0};
  inst.recipe = std::string(family_name(OperatorFamily::equality_example)) + "+vec";
  return inst;
}

namespace detail {

inline Band draw_band(Rng& rng, double lo_min, double lo_max) {
  std::uniform_real_distribution<double> lo(lo_min, lo_max);
  std::uniform_real_distribution<double> width(0.2, 3.0);
  const double l = lo(rng);
  return {l, l + width(rng)};
}

inline SpectralBounds draw_bounds(OperatorFamily family, Rng& rng) {
  SpectralBounds b;
  const bool positive = family == OperatorFamily::positive_normal || family == OperatorFamily::positive ||
                        family == OperatorFamily::positive_parts;
  const double lo_min = positive ? 0.0 : -2.0;
  const double lo_max = positive ? 1.0 : 2.0;
  const Band a = draw_band(rng, lo_min, lo_max);
  const Band bb = draw_band(rng, lo_min, lo_max);
  b.a1 = a.lo, b.a2 = a.hi, b.b1 = bb.lo, b.b2 = bb.hi;
  if (family == OperatorFamily::hermitian || family == OperatorFamily::positive) return b;
  const Band c = draw_band(rng, lo_min, lo_max);
  const Band d = draw_band(rng, lo_min, lo_max);
  b.c1 = c.lo, b.c2 = c.hi, b.d1 = d.lo, b.d2 = d.hi;
  return b;
}

inline void check_recipe_bounds(const Recipe& r, const SpectralBounds& b) {
  if (!b.ordered()) throw HypothesisError("recipe bounds are not ordered");
  const bool hermitian = r.family == OperatorFamily::hermitian || r.family == OperatorFamily::positive;
  if (hermitian && (b.c1 != 0.0 || b.c2 != 0.0 || b.d1 != 0.0 || b.d2 != 0.0)) {
    throw HypothesisError("recipe '" + r.str() + "' requires zero imaginary bands");
  }
  const bool positive = r.family == OperatorFamily::positive_normal || r.family == OperatorFamily::positive ||
                        r.family == OperatorFamily::positive_parts;
  if (positive && (b.a1 < 0.0 || b.b1 < 0.0 || b.c1 < 0.0 || b.d1 < 0.0)) {
    throw HypothesisError("recipe '" + r.str() + "' requires non-negative bands");
  }
  if (r.identical && (b.a() != b.b() || b.c() != b.d())) {
    throw HypothesisError("recipe '" + r.str() + "' requires identical bands for S and T");
  }
}

inline double tight_commutator_bound(const ComplexMatrix& s, const ComplexMatrix& t) {
  const double k = op_norm(commutator(s, t));
  return k > 1e-12 ? k : 1.0;
}

}  // namespace detail

/// Builds an instance satisfying every structural property the recipe names.
inline Instance make_instance(const Recipe& recipe, std::size_t dim, std::uint64_t seed) {
  if (recipe.family == OperatorFamily::equality_example) {
    Instance inst = schwarz_equality_example();
    Recipe canonical = recipe;
    canonical.with_vector = true;
    inst.seed = seed;
    inst.recipe = canonical.str();
    return inst;
  }
  if (dim < 2) throw ShapeError("make_instance: dimension must be at least 2");
  if (recipe.identical && (recipe.shared_basis || recipe.overlap)) {
    throw HypothesisError("make_instance: 'same' excludes 'shared' and 'overlap'");
  }
  if (recipe.family == OperatorFamily::generic && (recipe.shared_basis || recipe.overlap)) {
    throw HypothesisError("make_instance: generic operators have no eigenbasis to share");
  }
  const auto n = static_cast<Eigen::Index>(dim);
  Rng rng(derive_seed(seed, 0));

  Instance inst;
  inst.dim = dim;
  inst.seed = seed;
  inst.recipe = recipe.str();

  SpectralBounds b = recipe.bounds ? *recipe.bounds : detail::draw_bounds(recipe.family, rng);
  if (recipe.identical) {
    b.b1 = b.a1, b.b2 = b.a2, b.d1 = b.c1, b.d2 = b.c2;
  }
  detail::check_recipe_bounds(recipe, b);

  switch (recipe.family) {
    case OperatorFamily::generic: {
      inst.S = gaussian_matrix(n, n, rng) / std::sqrt(static_cast<double>(dim));
      inst.T = recipe.identical ? inst.S : ComplexMatrix(gaussian_matrix(n, n, rng) / std::sqrt(static_cast<double>(dim)));
      b = bounds_from_spectra(inst.S, inst.T);
      break;
    }
    case OperatorFamily::positive_parts: {
      OperatorFactors fs = hermitian_factors(n, b.a(), derive_seed(seed, 11));
      const OperatorFactors im_s = hermitian_factors(n, b.c(), derive_seed(seed, 12));
      fs.imag_basis = im_s.real_basis;
      fs.imag_spectrum = im_s.real_spectrum;
      fs.imag_band = b.c();
      fs.normal = false;
      OperatorFactors ft = fs;
      if (!recipe.identical) {
        ft = hermitian_factors(n, b.b(), derive_seed(seed, 13));
        const OperatorFactors im_t = hermitian_factors(n, b.d(), derive_seed(seed, 14));
        ft.imag_basis = im_t.real_basis;
        ft.imag_spectrum = im_t.real_spectrum;
        ft.imag_band = b.d();
        ft.normal = false;
      }
      inst.S = assemble(fs);
      inst.T = assemble(ft);
      inst.s_factors = std::move(fs);
      inst.t_factors = std::move(ft);
      break;
    }
    default: {
      const ComplexMatrix us = random_unitary(n, derive_seed(seed, 21));
      OperatorFactors fs = normal_factors(n, b.a(), b.c(), us, rng);
      OperatorFactors ft = fs;
      if (!recipe.identical) {
        const ComplexMatrix ut = recipe.shared_basis ? us : random_unitary(n, derive_seed(seed, 22));
        ft = normal_factors(n, b.b(), b.d(), ut, rng);
        if (recipe.overlap) {
          const std::size_t common = (dim + 1) / 2;
          for (std::size_t k = 0; k < common; ++k) {
            ft.real_spectrum[k] = fs.real_spectrum[k];
            ft.imag_spectrum[k] = fs.imag_spectrum[k];
          }
          const auto [rlo, rhi] = std::minmax_element(ft.real_spectrum.begin(), ft.real_spectrum.end());
          const auto [ilo, ihi] = std::minmax_element(ft.imag_spectrum.begin(), ft.imag_spectrum.end());
          ft.real_band = {*rlo, *rhi};
          ft.imag_band = {*ilo, *ihi};
          b.b1 = *rlo, b.b2 = *rhi, b.d1 = *ilo, b.d2 = *ihi;
        }
      }
      inst.S = assemble(fs);
      inst.T = assemble(ft);
      if (recipe.family == OperatorFamily::hermitian || recipe.family == OperatorFamily::positive) {
        inst.S = detail::hermitize(inst.S);
        inst.T = detail::hermitize(inst.T);
      }
      inst.s_factors = std::move(fs);
      inst.t_factors = std::move(ft);
      break;
    }
  }
  inst.bounds = b;

  if (recipe.with_xy || recipe.positive_definite_x) {
    Rng xrng(derive_seed(seed, 31));
    const double norm = 1.0 / std::sqrt(static_cast<double>(dim));
    if (recipe.positive_definite_x) {
      OperatorFactors fx = hermitian_factors(n, {0.2, 3.0}, derive_seed(seed, 32));
      inst.X = detail::hermitize(assemble(fx));
      inst.x_factors = std::move(fx);
    } else {
      inst.X = ComplexMatrix(gaussian_matrix(n, n, xrng) * norm);
    }
    inst.Y = ComplexMatrix(gaussian_matrix(n, n, xrng) * norm);
  }
  if (recipe.with_vector) {
    Rng vrng(derive_seed(seed, 41));
    inst.x = random_unit_vector(n, vrng);
    inst.n = detail::tight_commutator_bound(inst.S, inst.T);
  }
  return inst;
}

inline Instance make_instance(std::string_view recipe, std::size_t dim, std::uint64_t seed) {
  return make_instance(Recipe::parse(recipe), dim, seed);
}

// ---------------------------------------------------------------------------
// Perturbation (used by the tightness search)

namespace detail {

// exp(iH) for Hermitian H with ||H|| = scale * u, u ~ U(0, 1].
inline ComplexMatrix random_rotation(Eigen::Index dim, double scale, Rng& rng) {
  ComplexMatrix g = gaussian_matrix(dim, dim, rng);
  ComplexMatrix h = hermitize(g);
  const double nrm = op_norm(h);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (nrm > 0.0) h *= scale * (1.0 - u(rng)) / nrm;
  const auto solver = solve_hermitian(h, true);
  ComplexVector phases(dim);
  for (Eigen::Index k = 0; k < dim; ++k) phases(k) = std::polar(1.0, solver.eigenvalues()(k));
  return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

// Uniform noise of total width `scale`, clamp to band, re-pin both endpoints.
inline void jitter_spectrum(std::vector<double>& values, Band band, double scale, Rng& rng) {
  std::uniform_real_distribution<double> noise(-0.5 * scale, 0.5 * scale);
  for (double& v : values) v = std::clamp(v + noise(rng), band.lo, band.hi);
  if (values.size() < 2) return;
  const auto lo = std::min_element(values.begin(), values.end());
  *lo = band.lo;
  auto hi = values.begin();
  for (auto it = values.begin(); it != values.end(); ++it) {
    if (it != lo && (hi == lo || *it > *hi)) hi = it;
  }
  *hi = band.hi;
}

inline void jitter_factors(OperatorFactors& f, double scale, const ComplexMatrix* rotation, Rng& rng) {
  jitter_spectrum(f.real_spectrum, f.real_band, scale, rng);
  jitter_spectrum(f.imag_spectrum, f.imag_band, scale, rng);
  const auto dim = f.real_basis.rows();
  if (f.normal) {
    const ComplexMatrix r = rotation ? *rotation : random_rotation(dim, scale, rng);
    f.real_basis = f.real_basis * r;
    f.imag_basis = f.real_basis;
  } else {
    f.real_basis = f.real_basis * random_rotation(dim, scale, rng);
    f.imag_basis = f.imag_basis * random_rotation(dim, scale, rng);
  }
}

inline bool is_hermitian_family(const Recipe& r) {
  return r.family == OperatorFamily::hermitian || r.family == OperatorFamily::positive ||
         r.family == OperatorFamily::equality_example;
}

}  // namespace detail

/// Moves an instance a small step while keeping its structural hypotheses:
/// spectra jittered within their bands (endpoints re-pinned), eigenbases rotated
/// by exp(K) with K skew-Hermitian and ||K|| <= scale.
inline Instance perturb(const Instance& inst, double scale, std::uint64_t seed) {
  if (!(scale > 0.0)) throw InputError("perturb: scale must be positive");
  const Recipe recipe = Recipe::parse(inst.recipe);
  Rng rng(mix64(seed ^ 0x5bd1e995ULL));
  Instance out = inst;
  const auto n = inst.S.rows();

  if (recipe.family == OperatorFamily::generic) {
    const double norm = scale / std::sqrt(static_cast<double>(std::max<Eigen::Index>(n, 1)));
    out.S = inst.S + gaussian_matrix(n, n, rng) * norm;
    out.T = recipe.identical ? out.S : ComplexMatrix(inst.T + gaussian_matrix(n, n, rng) * norm);
    out.bounds = bounds_from_spectra(out.S, out.T);
  } else {
    OperatorFactors fs = inst.s_factors ? *inst.s_factors : recover_factors(inst.S, inst.bounds.a(), inst.bounds.c());
    OperatorFactors ft = inst.t_factors ? *inst.t_factors : recover_factors(inst.T, inst.bounds.b(), inst.bounds.d());
    if (recipe.shared_basis && !inst.t_factors) {
      // Recovered bases of commuting operators need not agree; express T in S's basis.
      const ComplexMatrix diag = fs.real_basis.adjoint() * inst.T * fs.real_basis;
      ft.real_basis = fs.real_basis;
      ft.imag_basis = fs.real_basis;
      ft.normal = true;
      for (Eigen::Index k = 0; k < n; ++k) {
        ft.real_spectrum[static_cast<std::size_t>(k)] = diag(k, k).real();
        ft.imag_spectrum[static_cast<std::size_t>(k)] = diag(k, k).imag();
      }
    }
    std::optional<ComplexMatrix> rotation;
    if (recipe.shared_basis) rotation = detail::random_rotation(n, scale, rng);
    detail::jitter_factors(fs, scale, rotation ? &*rotation : nullptr, rng);
    if (recipe.identical) {
      ft = fs;
    } else {
      detail::jitter_factors(ft, scale, rotation ? &*rotation : nullptr, rng);
    }
    out.S = assemble(fs);
    out.T = assemble(ft);
    if (detail::is_hermitian_family(recipe)) {
      out.S = detail::hermitize(out.S);
      out.T = detail::hermitize(out.T);
    }
    out.s_factors = std::move(fs);
    out.t_factors = std::move(ft);
  }

  if (inst.X) {
    if (recipe.positive_definite_x) {
      OperatorFactors fx = inst.x_factors ? *inst.x_factors : recover_factors(*inst.X, {0.2, 3.0}, {0.0, 0.0});
      detail::jitter_factors(fx, scale, nullptr, rng);
      out.X = detail::hermitize(assemble(fx));
      out.x_factors = std::move(fx);
    } else {
      out.X = ComplexMatrix(*inst.X + gaussian_matrix(n, n, rng) * (scale / std::sqrt(static_cast<double>(n))));
    }
  }
  if (inst.Y) out.Y = ComplexMatrix(*inst.Y + gaussian_matrix(n, n, rng) * (scale / std::sqrt(static_cast<double>(n))));
  if (inst.x) {
    ComplexVector v = *inst.x + gaussian_matrix(n, 1, rng) * scale;
    out.x = ComplexVector(v / v.norm());
  }
  if (inst.n) out.n = detail::tight_commutator_bound(out.S, out.T);
  return out;
}

}  // namespace normlab
