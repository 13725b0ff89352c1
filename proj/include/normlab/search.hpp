#pragma once

// Hill climbing over hypothesis-preserving perturbations, looking for instances
// that push an entry's lhs towards (or past) its rhs.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "normlab/catalog.hpp"
#include "normlab/instance.hpp"

namespace normlab {

enum class ObjectiveKind { ratio, margin };

inline std::string_view objective_kind_name(ObjectiveKind k) { return k == ObjectiveKind::ratio ? "ratio" : "margin"; }

struct Objective {
  double value = 0.0;
  ObjectiveKind kind = ObjectiveKind::ratio;
};

/// Larger is closer to violation. For an upper bound this is lhs/rhs; lower
/// bounds use rhs/lhs; equalities use 1 + |lhs - rhs| / |rhs|. When the
/// denominator falls below 1e-9 the negated margin is used instead.
inline Objective objective_of(const CatalogEntry& e, const InequalityReport& r) {
  constexpr double kFloor = 1e-9;
  double num = r.lhs;
  double den = r.rhs;
  if (e.direction == Direction::lower) std::swap(num, den);
  if (e.direction == Direction::equality) {
    num = std::abs(r.rhs) + std::abs(r.lhs - r.rhs);
    den = std::abs(r.rhs);
  }
  if (den < kFloor) return {-r.margin, ObjectiveKind::margin};
  return {num / den, ObjectiveKind::ratio};
}

/// Objective value counts as a violation of the entry.
inline bool objective_violates(const Objective& o, double tol = kDefaultTol) {
  return o.kind == ObjectiveKind::ratio ? o.value > 1.0 + tol : o.value > tol;
}

struct SearchState {
  EntryId entry = EntryId::FALSE_TEST;
  Instance current;
  Objective objective;
  Instance best;
  Objective best_objective;
  std::size_t iteration = 0;  // total evaluations across restarts
  double step_scale = 0.0;    // of the restart that produced `current`
  std::vector<double> trace;  // best-so-far objective at every 50th evaluation of each restart
};

struct SearchConfig {
  std::size_t dim = 2;
  std::size_t iterations = 500;  // evaluations per restart, including the initial draw
  std::size_t restarts = 8;
  std::uint64_t seed = 0;
  double initial_scale = 0.1;
  double min_scale = 1e-6;
  std::size_t patience = 50;  // non-improving steps before the scale halves
  std::optional<Recipe> recipe;
};

namespace detail {

inline bool better(const Objective& a, const Fingerprint& fa, const Objective& b, const Fingerprint& fb) {
  if (a.value != b.value) return a.value > b.value;
  return fa < fb;
}

}  // namespace detail

inline SearchState maximize_ratio(const CatalogEntry& e, const SearchConfig& cfg) {
  if (cfg.iterations < 1) throw InputError("maximize_ratio: iterations must be at least 1");
  if (cfg.restarts < 1) throw InputError("maximize_ratio: restarts must be at least 1");
  const Recipe recipe = cfg.recipe ? *cfg.recipe : Recipe::parse(e.default_recipe);

  SearchState state;
  state.entry = e.id;
  bool have_best = false;

  for (std::size_t restart = 0; restart < cfg.restarts; ++restart) {
    const std::uint64_t restart_seed = derive_seed(cfg.seed, restart);
    Instance current = make_instance(recipe, cfg.dim, restart_seed);
    Objective cur = objective_of(e, evaluate(e, current));
    Instance local_best = current;
    Objective local_obj = cur;
    double scale = cfg.initial_scale;
    std::size_t stale = 0;
    ++state.iteration;
    state.trace.push_back(have_best && state.best_objective.value > cur.value ? state.best_objective.value
                                                                                 : cur.value);

    for (std::size_t it = 1; it < cfg.iterations; ++it) {
      Instance candidate = perturb(current, scale, derive_seed(restart_seed, it));
      ++state.iteration;
      std::optional<InequalityReport> rep;
      try {
        rep = evaluate(e, candidate);
      } catch (const NumericError&) {
      } catch (const HypothesisError&) {
      }
      if (rep && rep->verdict != Verdict::not_applicable) {
        const Objective o = objective_of(e, *rep);
        if (o.value > cur.value) {
          current = std::move(candidate);
          cur = o;
          stale = 0;
          if (o.value > local_obj.value) {
            local_obj = o;
            local_best = current;
          }
        } else {
          ++stale;
        }
      } else {
        ++stale;
      }
      if (stale >= cfg.patience) {
        scale = std::max(0.5 * scale, cfg.min_scale);
        stale = 0;
      }
      if (it % 50 == 0) {
        const double global = have_best ? std::max(state.best_objective.value, local_obj.value) : local_obj.value;
        state.trace.push_back(global);
      }
    }

    if (!have_best || detail::better(local_obj, local_best.fingerprint(), state.best_objective, state.best.fingerprint())) {
      state.best = local_best;
      state.best_objective = local_obj;
      have_best = true;
    }
    state.current = current;
    state.objective = cur;
    state.step_scale = scale;
  }
  return state;
}

inline SearchState maximize_ratio(EntryId id, const SearchConfig& cfg) { return maximize_ratio(entry(id), cfg); }

}  // namespace normlab
