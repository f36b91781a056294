#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ptgame/cli_io.hpp"
#include "ptgame/error.hpp"

using namespace ptgame;
using namespace ptgame::io;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("ptgame_test_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

std::vector<double> last_point(const std::string& csv, std::size_t dim) {
  const auto rows = lines(csv);
  std::istringstream row(rows.back());
  std::string cell;
  std::getline(row, cell, ',');
  std::vector<double> x;
  for (std::size_t k = 0; k < dim && std::getline(row, cell, ','); ++k) x.push_back(std::stod(cell));
  return x;
}

}  // namespace

TEST_CASE("run imm on the team game writes a converged trajectory") {
  TempDir tmp("run_imm");
  RunOptions opt{"team_nonsmooth", "imm", JointStrategy{2.0, 4.0}, std::nullopt, std::nullopt,
                 tmp.path.string(), 0, {0, 1}};
  std::ostringstream out, err;
  CHECK(cmd_run(opt, out, err) == kExitOk);
  const auto csv = slurp(tmp.path / "trajectory.csv");
  const auto x = last_point(csv, 2);
  CHECK(std::abs(x[0]) <= 1e-3);
  CHECK(std::abs(x[1]) <= 1e-3);
  CHECK(lines(csv)[0].rfind("iter,", 0) == 0);
  CHECK(fs::exists(tmp.path / "manifest.json"));
  CHECK(fs::exists(tmp.path / "timing.csv"));
  const auto manifest = nlohmann::json::parse(slurp(tmp.path / "manifest.json"));
  CHECK(manifest["scenario_hash"] == hash_hex(slurp(tmp.path / "scenario.json")));
  CHECK(lines(csv).size() == lines(slurp(tmp.path / "timing.csv")).size());
}

TEST_CASE("run ibr from (4,0) stops at (4,-4)") {
  TempDir tmp("run_ibr");
  RunOptions opt{"team_nonsmooth", "ibr", JointStrategy{4.0, 0.0}, std::nullopt, std::nullopt,
                 tmp.path.string(), 0, {0, 1}};
  std::ostringstream out, err;
  CHECK(cmd_run(opt, out, err) == kExitOk);
  const auto x = last_point(slurp(tmp.path / "trajectory.csv"), 2);
  CHECK(x[0] == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(x[1] == doctest::Approx(-4.0).epsilon(1e-6));
}

TEST_CASE("max_iter exit code") {
  TempDir tmp("run_cap");
  RunOptions opt{"team_nonsmooth", "imm", JointStrategy{2.0, 4.0}, std::nullopt, std::size_t{2},
                 tmp.path.string(), 0, {0, 1}};
  std::ostringstream out, err;
  CHECK(cmd_run(opt, out, err) == kExitMaxIter);
}

TEST_CASE("invalid scenario file reports the field path") {
  TempDir tmp("bad_probs");
  auto doc = scenario_to_json(builtin("smooth_two_player"));
  doc["distribution"]["probs"] = {0.7, 0.2};
  const auto file = tmp.path / "bad.json";
  write_atomic(file, doc.dump(2));
  RunOptions opt{file.string(), "imm", std::nullopt, std::nullopt, std::nullopt, (tmp.path / "o").string(), 0,
                 {0, 1}};
  std::ostringstream out, err;
  CHECK(cmd_run(opt, out, err) == kExitValidation);
  CHECK(err.str().find("distribution.probs") != std::string::npos);
}

TEST_CASE("strict schema rejects unknown keys and wrong types") {
  auto doc = scenario_to_json(builtin("team_nonsmooth"));
  auto extra = doc;
  extra["agents"][0]["colour"] = "red";
  try {
    scenario_from_json(extra);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "agents[0].colour");
  }
  auto wrong = doc;
  wrong["lambda"] = "high";
  CHECK_THROWS_AS(scenario_from_json(wrong), ValidationError);
  try {
    parse_scenario("{\n  \"schema_version\": 1,\n  oops\n}");
    FAIL("expected a parse error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("infeasible x0 is a validation error") {
  TempDir tmp("bad_x0");
  RunOptions opt{"team_nonsmooth", "imm", JointStrategy{200.0, 0.0}, std::nullopt, std::nullopt,
                 tmp.path.string(), 0, {0, 1}};
  std::ostringstream out, err;
  CHECK(cmd_run(opt, out, err) == kExitValidation);
  opt.x0 = JointStrategy{1.0};
  CHECK(cmd_run(opt, out, err) == kExitValidation);
}

TEST_CASE("plain gradient ascent is rejected on the lattice scenario") {
  TempDir tmp("ga_lattice");
  RunOptions opt{"grid_rendezvous", "ga", std::nullopt, std::nullopt, std::nullopt, tmp.path.string(), 0, {0, 1}};
  std::ostringstream out, err;
  CHECK(cmd_run(opt, out, err) == kExitValidation);
}

TEST_CASE("export and re-import are byte identical") {
  for (const auto& name : builtin_names()) {
    const auto text = canonical_text(builtin(name));
    const auto again = canonical_text(parse_scenario(text));
    CHECK(text == again);
    CHECK(parse_scenario(text) == builtin(name));
  }
  TempDir tmp("export");
  std::ostringstream out, err;
  const auto file = tmp.path / "s.json";
  CHECK(cmd_export("energy_community", file.string(), out, err) == kExitOk);
  CHECK(slurp(file) == canonical_text(builtin("energy_community")));
  CHECK(load_scenario(file.string()) == builtin("energy_community"));
}

TEST_CASE("printed rendezvous variant round-trips") {
  const auto def = build_grid_rendezvous(ExponentSign::printed, 12.0);
  CHECK(parse_scenario(canonical_text(def)) == def);
}

TEST_CASE("certify exit codes") {
  TempDir tmp("certify");
  std::ostringstream out, err;
  CertifyOptions ok{"team_nonsmooth", JointStrategy{0.0, 0.0}, std::nullopt, std::nullopt, 1e-6,
                    (tmp.path / "a").string()};
  CHECK(cmd_certify(ok, out, err) == kExitOk);
  const auto report = nlohmann::json::parse(slurp(tmp.path / "a" / "certification.json"));
  CHECK(report.contains("regularization_bound"));
  CertifyOptions bad = ok;
  bad.point = JointStrategy{1.0, 0.0};
  bad.out = (tmp.path / "b").string();
  CHECK(cmd_certify(bad, out, err) == kExitNotNash);
  CertifyOptions budget = ok;
  budget.budget = 100.0;
  budget.out = (tmp.path / "c").string();
  CHECK(cmd_certify(budget, out, err) == kExitBudget);
  CHECK(err.str().find("--resolution") != std::string::npos);
}

TEST_CASE("compare writes a joined error table") {
  TempDir tmp("compare");
  std::ostringstream out, err;
  CompareOptions opt;
  opt.scenario = "smooth_two_player";
  opt.out = tmp.path.string();
  CHECK(cmd_compare(opt, out, err) == kExitOk);
  const auto header = lines(slurp(tmp.path / "compare.csv"))[0];
  CHECK(header.find("err_imm") != std::string::npos);
  CHECK(header.find("err_aga") != std::string::npos);
  const auto summary = nlohmann::json::parse(slurp(tmp.path / "compare_summary.json"));
  CHECK(summary.is_object());

  TempDir one("compare_one");
  CompareOptions single = opt;
  single.algos = {"imm"};
  single.out = one.path.string();
  CHECK(cmd_compare(single, out, err) == kExitOk);
  CHECK(lines(slurp(one.path / "compare.csv"))[0] == "iter,err_imm,potential_imm");
}

TEST_CASE("rendezvous compare adds pairwise columns") {
  TempDir tmp("compare_rdv");
  std::ostringstream out, err;
  CompareOptions opt;
  opt.scenario = "grid_rendezvous";
  opt.algos = {"immd", "sga"};
  opt.out = tmp.path.string();
  const int rc = cmd_compare(opt, out, err);
  CHECK((rc == kExitOk || rc == kExitMaxIter));
  CHECK(fs::exists(tmp.path / "trajectory_immd.csv"));
  CHECK(fs::exists(tmp.path / "trajectory_sga.csv"));
  const auto header = lines(slurp(tmp.path / "compare.csv"))[0];
  CHECK(header.find("pairwise_immd") != std::string::npos);
  CHECK(header.find("pairwise_sga") != std::string::npos);
}

TEST_CASE("steer command") {
  TempDir tmp("steer");
  std::ostringstream out, err;
  SteerOptions opt;
  opt.steer.tau = -4.0;
  opt.out = tmp.path.string();
  CHECK(cmd_steer(opt, out, err) == kExitOk);
  const auto rows = lines(slurp(tmp.path / "steering.csv"));
  CHECK(rows[0] == "k,lambda_1,lambda_2,x_1,x_2,J,abs_err");
  SteerOptions far = opt;
  far.steer.tau = -1000.0;
  far.out = (tmp.path / "far").string();
  CHECK(cmd_steer(far, out, err) == kExitUnreachable);
  CHECK(err.str().find("target unreachable") != std::string::npos);
}

TEST_CASE("repeated runs produce identical trajectory files") {
  for (const char* algo : {"sga", "imm"}) {
    TempDir a(std::string("det_a_") + algo), b(std::string("det_b_") + algo);
    std::ostringstream out, err;
    RunOptions opt{"team_nonsmooth", algo, JointStrategy{2.0, 4.0}, std::uint64_t{7}, std::nullopt,
                   a.path.string(), 0, {0, 1}};
    cmd_run(opt, out, err);
    opt.out = b.path.string();
    cmd_run(opt, out, err);
    CHECK(slurp(a.path / "trajectory.csv") == slurp(b.path / "trajectory.csv"));
    CHECK(!slurp(a.path / "trajectory.csv").empty());
  }
}

TEST_CASE("default output directory honors the environment") {
  ::setenv("PTGAME_OUT_DIR", "/tmp/ptgame_env_out", 1);
  CHECK(default_out_dir("x") == fs::path("/tmp/ptgame_env_out") / "x");
  ::unsetenv("PTGAME_OUT_DIR");
  CHECK(default_out_dir("x") == fs::path("runs") / "x");
}

TEST_CASE("numbers are written with 17 significant digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(hash_hex("") == "cbf29ce484222325");
}

TEST_CASE("contour export covers the requested grid") {
  const auto def = builtin("team_nonsmooth");
  const auto csv = contours_csv(def.game, {0.0, 0.0}, 0, 1, 5);
  CHECK(lines(csv).size() == 26);
}
