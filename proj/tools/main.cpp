// ptgame: run, certify, compare and steer the built-in games or scenario files.

#include <CLI11.hpp>
#include <iostream>
#include <sstream>

#include "ptgame/cli_io.hpp"

namespace {

std::vector<double> parse_point(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw CLI::ValidationError("point", "cannot parse '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace ptgame::io;
  CLI::App app{"Equilibrium learning in regularized games with prospect-theoretic agents"};
  app.require_subcommand(1);
  int code = kExitOk;

  // run
  RunOptions run;
  std::string run_x0, contour_coords = "1,2";
  std::uint64_t run_seed = 0;
  std::size_t run_max_iter = 0;
  auto* run_cmd = app.add_subcommand("run", "Run one learning algorithm");
  run_cmd->add_option("scenario", run.scenario, "Built-in name or scenario file")->required();
  run_cmd->add_option("--algo", run.algo, "ga | aga | sga | ibr | imm | immd")->required();
  run_cmd->add_option("--x0", run_x0, "Initial joint strategy, comma separated");
  auto* seed_opt = run_cmd->add_option("--seed", run_seed, "RNG seed");
  auto* iter_opt = run_cmd->add_option("--max-iter", run_max_iter, "Iteration cap");
  run_cmd->add_option("--out", run.out, "Output directory");
  run_cmd->add_option("--emit-contours", run.contour_resolution, "Sample the potential on an N x N grid");
  run_cmd->add_option("--contour-coords", contour_coords, "Two 1-based coordinates for --emit-contours");
  run_cmd->callback([&] {
    if (!run_x0.empty()) run.x0 = parse_point(run_x0);
    if (*seed_opt) run.seed = run_seed;
    if (*iter_opt) run.max_iter = run_max_iter;
    const auto cc = parse_point(contour_coords);
    if (cc.size() != 2 || cc[0] < 1 || cc[1] < 1) {
      throw CLI::ValidationError("--contour-coords", "expected two 1-based indices");
    }
    run.contour_coords = {static_cast<std::size_t>(cc[0]) - 1, static_cast<std::size_t>(cc[1]) - 1};
    code = cmd_run(run, std::cout, std::cerr);
  });

  // certify
  CertifyOptions cert;
  std::string cert_point;
  std::size_t cert_res = 0;
  double cert_budget = 0.0;
  auto* cert_cmd = app.add_subcommand("certify", "Best-response gaps, grid argmax and regularization bound");
  cert_cmd->add_option("scenario", cert.scenario, "Built-in name or scenario file")->required();
  cert_cmd->add_option("--point", cert_point, "Joint strategy to certify, comma separated");
  auto* res_opt = cert_cmd->add_option("--resolution", cert_res, "Grid points per coordinate");
  auto* budget_opt = cert_cmd->add_option("--budget", cert_budget, "Maximum grid evaluations");
  cert_cmd->add_option("--epsilon", cert.epsilon, "Largest acceptable best-response gap");
  cert_cmd->add_option("--out", cert.out, "Output directory");
  cert_cmd->callback([&] {
    if (!cert_point.empty()) cert.point = parse_point(cert_point);
    if (*res_opt) cert.resolution = cert_res;
    if (*budget_opt) cert.budget = cert_budget;
    code = cmd_certify(cert, std::cout, std::cerr);
  });

  // compare
  CompareOptions cmp;
  std::string cmp_algos = "aga,ibr,imm", cmp_x0;
  std::uint64_t cmp_seed = 0;
  auto* cmp_cmd = app.add_subcommand("compare", "Run several algorithms from the same start");
  cmp_cmd->add_option("scenario", cmp.scenario, "Built-in name or scenario file")->required();
  cmp_cmd->add_option("--algos", cmp_algos, "Comma separated algorithms");
  cmp_cmd->add_option("--x0", cmp_x0, "Initial joint strategy, comma separated");
  auto* cmp_seed_opt = cmp_cmd->add_option("--seed", cmp_seed, "RNG seed shared by all runs");
  cmp_cmd->add_option("--threshold", cmp.threshold, "Error level for the iteration count summary");
  cmp_cmd->add_option("--out", cmp.out, "Output directory");
  cmp_cmd->callback([&] {
    cmp.algos = split(cmp_algos);
    if (!cmp_x0.empty()) cmp.x0 = parse_point(cmp_x0);
    if (*cmp_seed_opt) cmp.seed = cmp_seed;
    code = cmd_compare(cmp, std::cout, std::cerr);
  });

  // steer
  SteerOptions steer;
  std::string steer_x0;
  auto* steer_cmd = app.add_subcommand("steer", "Steer the collective benefit to a target with incentives");
  steer_cmd->add_option("scenario", steer.scenario, "Scenario with a linear incentive regularizer")
      ->capture_default_str();
  steer_cmd->add_option("--tau", steer.steer.tau, "Target value of the collective benefit")->required();
  steer_cmd->add_option("--eta", steer.steer.eta, "Incentive step size")->capture_default_str();
  steer_cmd->add_option("--delta", steer.steer.delta, "Finite-difference increment")->capture_default_str();
  steer_cmd->add_option("--lambda-min", steer.steer.lambda_min, "Lower incentive bound")->capture_default_str();
  steer_cmd->add_option("--lambda-max", steer.steer.lambda_max, "Upper incentive bound")->capture_default_str();
  steer_cmd->add_option("--max-outer", steer.steer.max_outer, "Outer iteration cap")->capture_default_str();
  steer_cmd->add_option("--tol", steer.steer.tol, "Stop when |J - tau| is below this")->capture_default_str();
  steer_cmd->add_option("--x0", steer_x0, "Initial joint strategy, comma separated");
  steer_cmd->add_option("--out", steer.out, "Output directory");
  steer_cmd->callback([&] {
    if (!steer_x0.empty()) steer.x0 = parse_point(steer_x0);
    code = cmd_steer(steer, std::cout, std::cerr);
  });

  // list / export
  auto* list_cmd = app.add_subcommand("list", "List built-in scenarios");
  list_cmd->callback([&] { code = cmd_list(std::cout); });

  std::string export_name, export_out;
  auto* export_cmd = app.add_subcommand("export", "Write the canonical scenario file");
  export_cmd->add_option("scenario", export_name, "Built-in name or scenario file")->required();
  export_cmd->add_option("--out", export_out, "Destination file (stdout when omitted)");
  export_cmd->callback([&] { code = cmd_export(export_name, export_out, std::cout, std::cerr); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }
  return code;
}
