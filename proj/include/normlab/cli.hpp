#pragma once

// Command-line front end. `run` returns the process exit status:
// 0 all applicable checks satisfied, 1 a violation was found, 2 usage or input error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "normlab/catalog.hpp"
#include "normlab/derivation.hpp"
#include "normlab/io.hpp"
#include "normlab/search.hpp"
#include "normlab/sweep.hpp"

namespace normlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

enum class Format { json, csv };

struct RunConfig {
  std::string command;
  std::vector<std::string> entries;
  std::string instance_path;
  std::string recipe;
  std::vector<std::size_t> dims;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  double tol = kDefaultTol;
  std::string out_path;
  std::optional<Format> format;
  std::size_t iterations = 500;
  std::size_t restarts = 8;
  bool timing = false;
};

namespace detail {

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InputError("cannot open output file '" + path + "'");
      out_ = &file_;
    }
  }
  std::ostream& stream() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

inline std::size_t single_dim(const RunConfig& cfg, std::size_t fallback) {
  if (cfg.dims.size() > 1) throw InputError("this command takes a single --dims value");
  return cfg.dims.empty() ? fallback : cfg.dims.front();
}

inline const CatalogEntry& single_entry(const RunConfig& cfg) {
  if (cfg.entries.size() != 1) throw InputError("exactly one --entry is required");
  return find_entry(cfg.entries.front());
}

/// Instance from --instance, else generated from --recipe / --dims / --seed.
inline Instance resolve_instance(const RunConfig& cfg, std::string_view default_recipe) {
  if (!cfg.instance_path.empty()) {
    if (!cfg.recipe.empty()) throw InputError("--instance and --recipe are mutually exclusive");
    return io::load_instance(cfg.instance_path);
  }
  const std::string recipe = cfg.recipe.empty() ? std::string(default_recipe) : cfg.recipe;
  return make_instance(recipe, single_dim(cfg, 4), cfg.seed);
}

inline void emit(std::ostream& os, const io::ordered_json& j) { os << j.dump(2) << '\n'; }

inline int run_list(const RunConfig& cfg, std::ostream& os, bool all) {
  std::vector<CatalogEntry> entries(catalog().begin(), catalog().end());
  if (all) entries.insert(entries.end(), catalog_variants().begin(), catalog_variants().end());
  if (cfg.format == Format::json) {
    io::ordered_json arr = io::ordered_json::array();
    for (const auto& e : entries) {
      arr.push_back({{"id", e.name}, {"status", status_name(e.status)}, {"statement", e.description},
                     {"source", e.source}, {"default_recipe", e.default_recipe}});
    }
    emit(os, arr);
  } else if (cfg.format == Format::csv) {
    os << "id,status,statement,source,default_recipe\n";
    for (const auto& e : entries) {
      os << e.name << ',' << status_name(e.status) << ',' << io::detail::quoted(std::string(e.description)) << ','
         << io::detail::quoted(std::string(e.source)) << ',' << e.default_recipe << '\n';
    }
    os << "# check report columns: " << io::kReportColumns << '\n';
    os << "# sweep report columns: " << io::kSweepColumns << '\n';
  } else {
    for (const auto& e : entries) {
      os << e.name << "  [" << status_name(e.status) << "]  " << e.description << "\n    " << e.source
         << "  (recipe: " << e.default_recipe << ")\n";
    }
  }
  return kExitOk;
}

inline int run_check(const RunConfig& cfg, std::ostream& os) {
  const auto& e = single_entry(cfg);
  const Instance inst = resolve_instance(cfg, e.default_recipe);
  InequalityReport r;
  try {
    r = evaluate(e, inst, cfg.tol);
  } catch (const HypothesisError& err) {
    r.entry = e.id;
    r.fingerprint = inst.fingerprint();
    r.tol = cfg.tol;
    r.verdict = Verdict::not_applicable;
    r.hypothesis_violations.push_back(err.what());
  }
  if (cfg.format == Format::csv) {
    os << io::kReportColumns << '\n' << io::to_csv_row(r) << '\n';
  } else {
    emit(os, io::to_json(r));
  }
  return r.verdict == Verdict::violated ? kExitViolation : kExitOk;
}

inline int run_sweep(const RunConfig& cfg, std::ostream& os) {
  if (cfg.entries.empty()) throw InputError("sweep needs at least one --entry");
  SweepConfig sc;
  sc.dims = cfg.dims.empty() ? std::vector<std::size_t>{4} : cfg.dims;
  sc.trials = cfg.trials;
  sc.seed = cfg.seed;
  sc.tol = cfg.tol;
  if (!cfg.recipe.empty()) sc.recipe = Recipe::parse(cfg.recipe);
  std::vector<SweepReport> reports;
  for (const auto& name : cfg.entries) reports.push_back(sweep(find_entry(name), sc));

  bool violated = false;
  for (const auto& r : reports) violated = violated || r.failures > 0;
  if (cfg.format == Format::csv) {
    os << io::kSweepColumns << (cfg.timing ? ",wall_seconds" : "") << '\n';
    for (const auto& r : reports) {
      os << io::to_csv_row(r);
      if (cfg.timing) os << ',' << io::detail::num(r.wall_seconds);
      os << '\n';
    }
  } else {
    io::ordered_json j;
    j["seed"] = cfg.seed;
    j["dims"] = sc.dims;
    j["trials_per_dim"] = sc.trials;
    j["tol"] = sc.tol;
    io::ordered_json arr = io::ordered_json::array();
    for (const auto& r : reports) arr.push_back(io::to_json(r, cfg.timing));
    j["sweeps"] = std::move(arr);
    emit(os, j);
  }
  return violated ? kExitViolation : kExitOk;
}

inline int run_search(const RunConfig& cfg, std::ostream& os) {
  const auto& e = single_entry(cfg);
  SearchConfig sc;
  sc.dim = single_dim(cfg, 2);
  sc.iterations = cfg.iterations;
  sc.restarts = cfg.restarts;
  sc.seed = cfg.seed;
  if (!cfg.recipe.empty()) sc.recipe = Recipe::parse(cfg.recipe);
  const SearchState state = maximize_ratio(e, sc);
  io::ordered_json j = io::to_json(state);
  j["seed"] = cfg.seed;
  emit(os, j);
  return objective_violates(state.best_objective, cfg.tol) ? kExitViolation : kExitOk;
}

inline int run_fp(const RunConfig& cfg, std::ostream& os) {
  const Instance inst = resolve_instance(cfg, "normal+overlap");
  const FPReport fp = check_fp_pair(inst.S, inst.T);
  io::ordered_json j;
  j["seed"] = inst.seed;
  j["fingerprint"] = io::to_json(inst.fingerprint());
  j["fp"] = io::to_json(fp);
  io::ordered_json reductions = io::ordered_json::array();
  for (const auto& el : kernel_basis(lift_derivation(inst.S, inst.T))) {
    reductions.push_back({{"range_C_for_S", io::to_json(check_reduction(inst.S, el.C))},
                          {"kernel_complement_for_T", io::to_json(check_reduction(inst.T, el.C.adjoint()))}});
  }
  j["reductions"] = std::move(reductions);
  emit(os, j);
  return fp.holds ? kExitOk : kExitViolation;
}

inline int run_ortho(const RunConfig& cfg, std::ostream& os) {
  Instance inst = resolve_instance(cfg, "normal+overlap");
  if (!inst.C) attach_kernel_element(inst, derive_seed(cfg.seed, 0xC));
  const auto& C = *inst.C;
  const FPReport fp = check_fp_pair(inst.S, inst.T);
  const double dist = min_distance_hs(inst.S, inst.T, C);
  const double c_hs = hs_norm(C);
  io::ordered_json j;
  j["seed"] = inst.seed;
  j["fingerprint"] = io::to_json(inst.fingerprint());
  j["fp_holds"] = fp.holds;
  j["c_hs_norm"] = c_hs;
  j["min_distance_hs"] = dist;
  bool violated = fp.holds && dist < c_hs - 1e-8 * std::max(1.0, c_hs);
  try {
    const ProbeResult probe = orthogonality_probe_opnorm(inst.S, inst.T, C, cfg.trials, derive_seed(cfg.seed, 0xD));
    j["probe"] = io::to_json(probe);
    violated = violated || (fp.holds && !probe.consistent);
  } catch (const HypothesisError& err) {
    j["probe"] = {{"error", err.what()}};
  }
  emit(os, j);
  return violated ? kExitViolation : kExitOk;
}

inline int run_gen(const RunConfig& cfg, std::ostream& os) {
  if (cfg.recipe.empty()) throw InputError("gen needs --recipe");
  emit(os, io::to_json(make_instance(cfg.recipe, single_dim(cfg, 4), cfg.seed)));
  return kExitOk;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"normlab: executable norm inequalities for commutators and derivations"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string format;
  bool all = false;

  auto common = [&](CLI::App* sub, bool instance_input) {
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", cfg.out_path, "write the report here instead of stdout");
    sub->add_option("--seed", cfg.seed, "seed (default 0)");
    if (instance_input) {
      sub->add_option("--instance", cfg.instance_path, "instance JSON file");
      sub->add_option("--recipe", cfg.recipe, "generation recipe, e.g. normal+xy");
      sub->add_option("--dims", cfg.dims, "dimension(s)")->delimiter(',');
    }
  };

  auto* list = app.add_subcommand("list", "print the catalog");
  list->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  list->add_flag("--all", all, "include variant entries");

  auto* check = app.add_subcommand("check", "evaluate one entry on one instance");
  common(check, true);
  check->add_option("--entry", cfg.entries, "catalog id")->required();
  check->add_option("--tol", cfg.tol, "verdict tolerance")->check(CLI::Range(1e-14, 1e-3));

  auto* sweep_cmd = app.add_subcommand("sweep", "randomised verification of entries");
  common(sweep_cmd, true);
  sweep_cmd->add_option("--entry", cfg.entries, "catalog id(s)")->required();
  sweep_cmd->add_option("--trials", cfg.trials, "trials per dimension");
  sweep_cmd->add_option("--tol", cfg.tol, "verdict tolerance")->check(CLI::Range(1e-14, 1e-3));
  sweep_cmd->add_flag("--timing", cfg.timing, "include wall time (reports stop being byte-reproducible)");

  auto* search = app.add_subcommand("search", "hill-climb towards violation of an entry");
  common(search, true);
  search->add_option("--entry", cfg.entries, "catalog id")->required();
  search->add_option("--iterations", cfg.iterations, "evaluations per restart")->check(CLI::PositiveNumber);
  search->add_option("--restarts", cfg.restarts, "independent restarts")->check(CLI::PositiveNumber);
  search->add_option("--tol", cfg.tol, "violation tolerance")->check(CLI::Range(1e-14, 1e-3));

  auto* fp = app.add_subcommand("fp", "Fuglede-Putnam check and reducing-subspace diagnostics");
  common(fp, true);

  auto* ortho = app.add_subcommand("ortho", "range-kernel orthogonality of a derivation");
  common(ortho, true);
  ortho->add_option("--trials", cfg.trials, "random samples for the operator-norm probe");

  auto* gen = app.add_subcommand("gen", "write an instance JSON");
  common(gen, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (format == "json") cfg.format = Format::json;
  if (format == "csv") cfg.format = Format::csv;

  try {
    detail::Output sink(cfg.out_path, out);
    auto& os = sink.stream();
    if (list->parsed()) return detail::run_list(cfg, os, all);
    if (check->parsed()) return detail::run_check(cfg, os);
    if (sweep_cmd->parsed()) return detail::run_sweep(cfg, os);
    if (search->parsed()) return detail::run_search(cfg, os);
    if (fp->parsed()) return detail::run_fp(cfg, os);
    if (ortho->parsed()) return detail::run_ortho(cfg, os);
    if (gen->parsed()) return detail::run_gen(cfg, os);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ShapeError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const HypothesisError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace normlab::cli
