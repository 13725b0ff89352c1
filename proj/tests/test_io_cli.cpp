#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "normlab/cli.hpp"
#include "normlab/io.hpp"

using namespace normlab;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int status;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "normlab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

fs::path temp_file(const std::string& name, const std::string& contents) {
  const fs::path p = fs::temp_directory_path() / ("normlab_test_" + name);
  std::ofstream(p) << contents;
  return p;
}

io::ordered_json parse(const std::string& s) { return io::ordered_json::parse(s); }

}  // namespace

TEST(Json, MatrixLayout) {
  ComplexMatrix m(2, 2);
  m << Complex(1, 2), 3, 0, Complex(0, -1);
  const auto j = io::to_json(m);
  EXPECT_EQ(j.dump(), R"({"rows":[[[1.0,2.0],[3.0,0.0]],[[0.0,0.0],[0.0,-1.0]]]})");
  EXPECT_EQ(io::matrix_from_json(j, "M"), m);
}

TEST(Json, InstanceRoundTripIsExact) {
  for (const char* recipe : {"normal+xy", "hermitian+shared+vec", "equality-example", "positive-parts"}) {
    const Instance inst = make_instance(recipe, 3, 21);
    const Instance back = io::parse_instance(io::to_json(inst).dump());
    EXPECT_EQ(back.S, inst.S);
    EXPECT_EQ(back.T, inst.T);
    EXPECT_EQ(back.bounds, inst.bounds);
    EXPECT_EQ(back.fingerprint(), inst.fingerprint());
    EXPECT_EQ(back.X.has_value(), inst.X.has_value());
    if (inst.X) {
      EXPECT_EQ(*back.X, *inst.X);
    }
    if (inst.x) {
      EXPECT_EQ(*back.x, *inst.x);
    }
    EXPECT_EQ(back.n, inst.n);
  }
}

TEST(Json, MalformedInputsRejected) {
  EXPECT_THROW(io::parse_instance("{\"S\": [1,2"), InputError);
  try {
    io::parse_instance("{\"S\": }");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("byte 7"), std::string::npos) << e.what();
  }
  EXPECT_THROW(io::parse_instance(R"({"S":{"rows":[[[1,0]]]}})"), InputError);
  EXPECT_THROW(io::parse_instance(R"({"S":{"rows":[[[1,0],[0,0]]]},"T":{"rows":[[[1,0],[0,0]]]}})"), InputError);
  EXPECT_THROW(io::parse_instance(R"({"S":{"rows":[[["a",0]]]},"T":{"rows":[[[1,0]]]}})"), InputError);
  EXPECT_THROW(io::parse_instance(R"({"S":{"rows":[[[1,0]]]},"T":{"rows":[[[1,0]]]},"dim":2})"), InputError);
  EXPECT_THROW(io::parse_instance(R"({"S":{"rows":[[[1,0]]]},"T":{"rows":[[[1,0]]]},"recipe":"bogus"})"), InputError);
}

TEST(Json, MissingBoundsAreComputed) {
  const Instance inst = io::parse_instance(R"({"S":{"rows":[[[1,0],[0,0]],[[0,0],[3,0]]]},"T":{"rows":[[[0,0],[0,0]],[[0,0],[0,2]]]}})");
  EXPECT_EQ(inst.bounds.a1, 1.0);
  EXPECT_EQ(inst.bounds.a2, 3.0);
  EXPECT_EQ(inst.bounds.d1, 0.0);
  EXPECT_EQ(inst.bounds.d2, 2.0);
  EXPECT_EQ(inst.seed, 0u);
}

TEST(Csv, RowsMatchColumns) {
  const auto count = [](const std::string& s) {
    std::size_t n = 1;
    bool q = false;
    for (char c : s) {
      if (c == '"') q = !q;
      if (c == ',' && !q) ++n;
    }
    return n;
  };
  const auto r = evaluate(EntryId::THM_MAIN, make_instance("positive-normal", 3, 0));
  EXPECT_EQ(count(io::to_csv_row(r)), count(io::kReportColumns));
  SweepConfig cfg;
  cfg.trials = 3;
  EXPECT_EQ(count(io::to_csv_row(sweep(EntryId::THM_MAIN, cfg))), count(io::kSweepColumns));
  cfg.trials = 0;
  EXPECT_EQ(count(io::to_csv_row(sweep(EntryId::THM_MAIN, cfg))), count(io::kSweepColumns));
}

TEST(Cli, ListPrintsSeventeenEntries) {
  const auto r = run_cli({"list", "--format", "json"});
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(parse(r.out).size(), 17u);
  const auto text = run_cli({"list"});
  std::size_t lines = 0;
  for (const auto& e : catalog()) lines += text.out.find(std::string(e.name) + "  [") != std::string::npos;
  EXPECT_EQ(lines, 17u);
  const auto csv = run_cli({"list", "--format", "csv"});
  EXPECT_NE(csv.out.find(io::kReportColumns), std::string::npos);
  EXPECT_NE(csv.out.find(io::kSweepColumns), std::string::npos);
}

TEST(Cli, CheckMainBoundOnEqualityExample) {
  const auto r = run_cli({"check", "--entry", "THM_MAIN", "--recipe", "equality-example"});
  EXPECT_EQ(r.status, 0) << r.err;
  const auto j = parse(r.out);
  EXPECT_NEAR(j["lhs"].get<double>(), 2.0, 1e-12);
  EXPECT_NEAR(j["rhs"].get<double>(), 2.0 * std::sqrt(2.0), 1e-12);
  EXPECT_EQ(j["verdict"], "satisfied");
  EXPECT_EQ(j["fingerprint"]["seed"], 0);
}

TEST(Cli, CheckFromInstanceFile) {
  const auto p = temp_file("inst.json", io::to_json(make_instance("normal", 3, 5)).dump());
  const auto r = run_cli({"check", "--entry", "STEP_CENTERED", "--instance", p.string()});
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(parse(r.out)["fingerprint"]["seed"], 5);
}

TEST(Cli, SweepFalseTestExitsOne) {
  const auto r = run_cli({"sweep", "--entry", "FALSE_TEST", "--trials", "10"});
  EXPECT_EQ(r.status, 1);
  const auto j = parse(r.out);
  EXPECT_EQ(j["seed"], 0);
  EXPECT_EQ(j["sweeps"][0]["failures"], 10);
}

TEST(Cli, SweepIsByteIdentical) {
  const std::vector<std::string> args{"sweep", "--entry", "THM_MAIN", "--entry", "SJ_MAX", "--dims", "2,3", "--trials", "15", "--seed", "4"};
  EXPECT_EQ(run_cli(args).out, run_cli(args).out);
  auto csv = args;
  csv.insert(csv.end(), {"--format", "csv"});
  EXPECT_EQ(run_cli(csv).out, run_cli(csv).out);
}

TEST(Cli, ViolationReplaysViaCheck) {
  const auto sweep_out = parse(run_cli({"sweep", "--entry", "FALSE_TEST", "--trials", "5", "--dims", "3", "--seed", "9"}).out);
  const auto& rec = sweep_out["sweeps"][0]["failure_records"][2];
  const auto fp = rec["fingerprint"];
  const auto r = run_cli({"check", "--entry", "FALSE_TEST", "--recipe", fp["recipe"].get<std::string>(), "--dims",
                          std::to_string(fp["dim"].get<std::size_t>()), "--seed",
                          std::to_string(fp["seed"].get<std::uint64_t>())});
  EXPECT_EQ(r.status, 1);
  EXPECT_EQ(parse(r.out)["margin"].get<double>(), rec["margin"].get<double>());
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run_cli({}).status, 2);
  EXPECT_EQ(run_cli({"frobnicate"}).status, 2);
  EXPECT_EQ(run_cli({"check", "--entry", "NOPE"}).status, 2);
  EXPECT_EQ(run_cli({"check"}).status, 2);
  EXPECT_EQ(run_cli({"check", "--entry", "THM_MAIN", "--tol", "1"}).status, 2);
  EXPECT_EQ(run_cli({"check", "--entry", "THM_MAIN", "--tol", "1e-20"}).status, 2);
  EXPECT_EQ(run_cli({"check", "--entry", "THM_MAIN", "--recipe", "unicorn"}).status, 2);
  EXPECT_EQ(run_cli({"check", "--entry", "THM_MAIN", "--instance", "/nonexistent/file.json"}).status, 2);
  EXPECT_EQ(run_cli({"sweep", "--entry", "THM_MAIN", "--format", "xml"}).status, 2);
  EXPECT_EQ(run_cli({"gen"}).status, 2);
}

TEST(Cli, MalformedJsonReportsPosition) {
  const auto p = temp_file("bad.json", "{\"S\": {\"rows\": [[[1, 0]]]}, \"T\": ");
  const auto r = run_cli({"check", "--entry", "THM_MAIN", "--instance", p.string()});
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("byte"), std::string::npos) << r.err;
}

TEST(Cli, HypothesisViolationIsReportedNotUsageError) {
  const auto p = temp_file("nonnormal.json", R"({"S":{"rows":[[[0,0],[1,0]],[[0,0],[0,0]]]},"T":{"rows":[[[1,0],[0,0]],[[0,0],[1,0]]]}})");
  const auto r = run_cli({"check", "--entry", "THM_MAIN", "--instance", p.string()});
  EXPECT_EQ(r.status, 0);
  const auto j = parse(r.out);
  EXPECT_EQ(j["verdict"], "not-applicable");
  EXPECT_FALSE(j["hypothesis_violations"].empty());
}

TEST(Cli, GenThenCheckRoundTrip) {
  const fs::path out = fs::temp_directory_path() / "normlab_test_gen.json";
  EXPECT_EQ(run_cli({"gen", "--recipe", "hermitian+shared+vec", "--dims", "3", "--seed", "2", "--out", out.string()}).status, 0);
  const Instance loaded = io::load_instance(out.string());
  EXPECT_EQ(loaded.S, make_instance("hermitian+shared+vec", 3, 2).S);
  EXPECT_EQ(run_cli({"check", "--entry", "SCHWARZ_REVERSE", "--instance", out.string()}).status, 0);
}

TEST(Cli, FpAndOrtho) {
  auto r = run_cli({"fp", "--recipe", "normal+overlap", "--dims", "4", "--seed", "1"});
  EXPECT_EQ(r.status, 0) << r.err;
  auto j = parse(r.out);
  EXPECT_TRUE(j["fp"]["holds"].get<bool>());
  EXPECT_EQ(j["reductions"].size(), j["fp"]["kernel_dimension"].get<std::size_t>());

  const auto p = temp_file("nilpotent.json", R"({"S":{"rows":[[[0,0],[1,0]],[[0,0],[0,0]]]},"T":{"rows":[[[0,0],[0,0]],[[0,0],[0,0]]]}})");
  r = run_cli({"fp", "--instance", p.string()});
  EXPECT_EQ(r.status, 1);
  EXPECT_FALSE(parse(r.out)["fp"]["holds"].get<bool>());

  r = run_cli({"ortho", "--recipe", "normal+same", "--dims", "3", "--trials", "10"});
  EXPECT_EQ(r.status, 0) << r.err;
  j = parse(r.out);
  EXPECT_EQ(j["probe"]["verdict"], "consistent");
  EXPECT_NEAR(j["min_distance_hs"].get<double>(), j["c_hs_norm"].get<double>(), 1e-8);
}

TEST(Cli, SearchDeterministic) {
  const std::vector<std::string> args{"search", "--entry", "THM_MAIN", "--iterations", "60", "--restarts", "2", "--seed", "3"};
  const auto a = run_cli(args);
  EXPECT_EQ(a.status, 0) << a.err;
  EXPECT_EQ(a.out, run_cli(args).out);
  EXPECT_EQ(run_cli({"search", "--entry", "FALSE_TEST", "--iterations", "5", "--restarts", "1"}).status, 1);
}

TEST(Cli, OutputFile) {
  const fs::path out = fs::temp_directory_path() / "normlab_test_report.csv";
  const auto r = run_cli({"check", "--entry", "HS_PRODUCT", "--format", "csv", "--out", out.string()});
  EXPECT_EQ(r.status, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(out);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, io::kReportColumns);
}
