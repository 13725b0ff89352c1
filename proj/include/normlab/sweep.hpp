#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

#include "normlab/catalog.hpp"
#include "normlab/instance.hpp"

namespace normlab {

struct SweepConfig {
  std::vector<std::size_t> dims{4};
  std::size_t trials = 100;  // per dimension
  std::uint64_t seed = 0;
  std::optional<Recipe> recipe;  // defaults to the entry's own recipe
  double tol = kDefaultTol;
};

struct FailureRecord {
  Fingerprint fingerprint;
  double margin = 0.0;
  double rhs = 0.0;
};

struct SweepReport {
  EntryId entry = EntryId::FALSE_TEST;
  std::size_t trials = 0;
  std::size_t passes = 0;
  std::size_t failures = 0;
  std::size_t not_applicable = 0;
  std::optional<double> worst_margin;
  double worst_rhs = 0.0;
  std::optional<Fingerprint> worst_fingerprint;
  std::vector<FailureRecord> failure_records;  // capped at kMaxFailureRecords
  double wall_seconds = 0.0;

  static constexpr std::size_t kMaxFailureRecords = 100;
};

/// Seed of trial `index` (counted across all dims in order) for a master seed.
inline std::uint64_t trial_seed(std::uint64_t master, std::size_t index) { return derive_seed(master, index); }

inline SweepReport sweep(const CatalogEntry& e, const SweepConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const Recipe recipe = config.recipe ? *config.recipe : Recipe::parse(e.default_recipe);
  SweepReport out;
  out.entry = e.id;
  std::size_t index = 0;
  for (const std::size_t dim : config.dims) {
    for (std::size_t t = 0; t < config.trials; ++t, ++index) {
      ++out.trials;
      const std::uint64_t seed = trial_seed(config.seed, index);
      InequalityReport r;
      try {
        r = evaluate(e, make_instance(recipe, dim, seed), config.tol);
      } catch (const HypothesisError&) {
        ++out.not_applicable;
        continue;
      } catch (const NumericError&) {
        ++out.not_applicable;
        continue;
      }
      if (r.verdict == Verdict::not_applicable) {
        ++out.not_applicable;
        continue;
      }
      if (r.satisfied) {
        ++out.passes;
      } else {
        ++out.failures;
        if (out.failure_records.size() < SweepReport::kMaxFailureRecords) {
          out.failure_records.push_back({r.fingerprint, r.margin, r.rhs});
        }
      }
      if (!out.worst_margin || r.margin < *out.worst_margin) {
        out.worst_margin = r.margin;
        out.worst_rhs = r.rhs;
        out.worst_fingerprint = r.fingerprint;
      }
    }
  }
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

inline SweepReport sweep(EntryId id, const SweepConfig& config) { return sweep(entry(id), config); }

}  // namespace normlab
