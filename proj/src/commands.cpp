#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unistd.h>

#include "ptgame/cli_io.hpp"
#include "ptgame/error.hpp"

namespace ptgame::io {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Output helpers

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

fs::path default_out_dir(const std::string& leaf) {
  const char* env = std::getenv("PTGAME_OUT_DIR");
  fs::path base = (env != nullptr && *env != '\0') ? fs::path(env) : fs::path("runs");
  return base / leaf;
}

std::string trajectory_csv(const std::vector<Iterate>& iterates) {
  std::ostringstream os;
  const std::size_t dim = iterates.empty() ? 0 : iterates.front().x.size();
  const std::size_t agents = iterates.empty() ? 0 : iterates.front().utilities.size();
  os << "iter";
  for (std::size_t k = 0; k < dim; ++k) os << ",x" << k + 1;
  os << ",potential";
  for (std::size_t i = 0; i < agents; ++i) os << ",utility" << i + 1;
  os << ",displacement\n";
  for (const auto& it : iterates) {
    os << it.iter;
    for (double v : it.x) os << ',' << format_double(v);
    os << ',' << format_double(it.potential);
    for (double u : it.utilities) os << ',' << format_double(u);
    os << ',' << format_double(it.displacement) << '\n';
  }
  return os.str();
}

std::string timing_csv(const std::vector<Iterate>& iterates) {
  std::ostringstream os;
  os << "iter,wall_ms\n";
  for (const auto& it : iterates) os << it.iter << ',' << format_double(it.wall_ms) << '\n';
  return os.str();
}

std::string paths_csv(const std::vector<std::vector<Iterate>>& paths) {
  std::ostringstream os;
  const std::size_t dim = paths.empty() || paths.front().empty() ? 0 : paths.front().front().x.size();
  os << "path,iter";
  for (std::size_t k = 0; k < dim; ++k) os << ",x" << k + 1;
  os << ",potential\n";
  for (std::size_t p = 0; p < paths.size(); ++p) {
    for (const auto& it : paths[p]) {
      os << p << ',' << it.iter;
      for (double v : it.x) os << ',' << format_double(v);
      os << ',' << format_double(it.potential) << '\n';
    }
  }
  return os.str();
}

std::string relay_csv(const std::vector<RelayEvent>& log) {
  std::ostringstream os;
  const std::size_t d = log.empty() ? 0 : log.front().before.size();
  os << "cycle,agent";
  for (std::size_t c = 0; c < d; ++c) os << ",before" << c + 1;
  for (std::size_t c = 0; c < d; ++c) os << ",after" << c + 1;
  os << '\n';
  for (const auto& e : log) {
    os << e.cycle << ',' << e.agent + 1;
    for (double v : e.before) os << ',' << format_double(v);
    for (double v : e.after) os << ',' << format_double(v);
    os << '\n';
  }
  return os.str();
}

std::string steering_csv(const SteeringTrace& trace) {
  std::ostringstream os;
  const std::size_t n = trace.steps.empty() ? 0 : trace.steps.front().lambda.size();
  const std::size_t d = trace.steps.empty() ? 0 : trace.steps.front().x.size();
  os << "k";
  for (std::size_t i = 0; i < n; ++i) os << ",lambda_" << i + 1;
  for (std::size_t c = 0; c < d; ++c) os << ",x_" << c + 1;
  os << ",J,abs_err\n";
  for (const auto& s : trace.steps) {
    os << s.k;
    for (double v : s.lambda) os << ',' << format_double(v);
    for (double v : s.x) os << ',' << format_double(v);
    os << ',' << format_double(s.collective) << ',' << format_double(s.error) << '\n';
  }
  return os.str();
}

std::string contours_csv(const GameSpec& game, const JointStrategy& base, std::size_t i, std::size_t j,
                         std::size_t resolution) {
  const auto& space = game.space();
  if (i >= space.dimension() || j >= space.dimension() || i == j) {
    throw ValidationError("contour coordinates must be two distinct coordinates", "contour_coords");
  }
  if (resolution < 2) throw ValidationError("must be at least 2", "emit_contours");
  std::ostringstream os;
  os << "x" << i + 1 << ",x" << j + 1 << ",potential\n";
  JointStrategy y = base;
  auto at = [&](std::size_t k, std::size_t m) {
    return space.lo(k) + (space.hi(k) - space.lo(k)) * static_cast<double>(m) / static_cast<double>(resolution - 1);
  };
  for (std::size_t a = 0; a < resolution; ++a) {
    for (std::size_t b = 0; b < resolution; ++b) {
      y[i] = at(i, a);
      y[j] = at(j, b);
      os << format_double(y[i]) << ',' << format_double(y[j]) << ',' << format_double(game.potential(y)) << '\n';
    }
  }
  return os.str();
}

json report_to_json(const CertificationReport& r) {
  json bounds = json::array();
  for (const auto& b : r.bounds) {
    bounds.push_back({{"name", b.name}, {"lhs", b.lhs}, {"rhs", b.rhs}, {"satisfied", b.satisfied}});
  }
  json doc = {{"point", r.point},         {"gaps", r.gaps},     {"epsilon", r.epsilon},
              {"potential", r.potential}, {"bounds", bounds},   {"resolution", r.resolution}};
  if (r.has_argmax) {
    doc["grid_argmax"] = {{"point", r.argmax.point},
                          {"value", r.argmax.value},
                          {"grid_max", r.argmax.grid_max},
                          {"tie_count", r.argmax.ties.size()},
                          {"cell", r.argmax.cell},
                          {"evaluations", r.argmax.evaluations}};
  }
  return doc;
}

json regularization_bound_to_json(const RegularizationBound& r) {
  json bounds = json::array();
  for (const auto& b : r.bounds) {
    bounds.push_back({{"name", b.name}, {"lhs", b.lhs}, {"rhs", b.rhs}, {"satisfied", b.satisfied}});
  }
  return {{"x_dagger", r.x_dagger}, {"h_dagger", r.h_dagger},       {"epsilon", r.epsilon},
          {"x_lambda", r.x_lambda}, {"gaps", r.gaps},               {"gamma0_size", r.gamma0_size},
          {"tolerance", r.tolerance}, {"bounds", bounds},           {"satisfied", r.satisfied()}};
}

double max_pairwise_l1(const StrategySpace& space, const JointStrategy& x) {
  double m = 0.0;
  for (std::size_t i = 0; i < space.num_blocks(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (space.block_dim(i) != space.block_dim(j)) continue;
      double d = 0.0;
      for (std::size_t c = 0; c < space.block_dim(i); ++c) {
        d += std::abs(x[space.offset(i) + c] - x[space.offset(j) + c]);
      }
      m = std::max(m, d);
    }
  }
  return m;
}

// ---------------------------------------------------------------------------

namespace {

const std::vector<std::string> kAlgos{"ga", "aga", "sga", "ibr", "imm", "immd"};

void check_algo(const ScenarioDef& def, const std::string& algo) {
  if (std::find(kAlgos.begin(), kAlgos.end(), algo) == kAlgos.end()) {
    throw ValidationError("unknown algorithm '" + algo + "' (expected ga, aga, sga, ibr, imm or immd)", "algo");
  }
  if ((algo == "ga" || algo == "aga") && def.game.space().has_lattice()) {
    throw ValidationError("'" + algo + "' is not available on lattice strategy spaces; use sga or immd", "algo");
  }
}

int status_code(Status s) {
  switch (s) {
    case Status::converged:
      return kExitOk;
    case Status::max_iter:
      return kExitMaxIter;
    case Status::error:
      return kExitSolverError;
  }
  return kExitSolverError;
}

JointStrategy start_point(const ScenarioDef& def, const std::optional<JointStrategy>& x0) {
  if (x0) return *x0;
  if (def.initial_states.empty()) throw ValidationError("scenario has no initial state; pass --x0", "x0");
  return def.initial_states.front();
}

// Runs a command body, mapping exceptions to exit codes.
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kExitBudget;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolverError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolverError;
  }
}

json manifest(const ScenarioDef& def, const std::string& canonical, const std::string& algo,
              const SolverConfig& cfg) {
  return {{"scenario", def.name},
          {"scenario_hash", hash_hex(canonical)},
          {"solver", algo},
          {"config", config_to_json(cfg)},
          {"seed", cfg.seed},
          {"version", PTGAME_VERSION}};
}

}  // namespace

SolverConfig resolve_config(const ScenarioDef& def, const std::string& algo) {
  SolverConfig cfg = def.solver_config(algo);
  if (algo == "ga") cfg.accelerate = false;
  if (algo == "aga") cfg.accelerate = true;
  return cfg;
}

Trajectory run_algorithm(const ScenarioDef& def, const std::string& algo, const JointStrategy& x0,
                         const SolverConfig& cfg) {
  check_algo(def, algo);
  if (algo == "ga" || algo == "aga" || algo == "sga") return solve_gradient(def.game, x0, cfg);
  if (algo == "ibr") return solve_ibr(def.game, x0, cfg);
  if (algo == "imm") return solve_imm(def.game, x0, cfg);
  return solve_immd(def.game, x0, cfg);
}

int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const ScenarioDef def = load_scenario(opt.scenario);
    check_algo(def, opt.algo);
    SolverConfig cfg = resolve_config(def, opt.algo);
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.max_iter) cfg.max_iter = *opt.max_iter;
    const JointStrategy x0 = start_point(def, opt.x0);
    const Trajectory traj = run_algorithm(def, opt.algo, x0, cfg);

    const fs::path dir = opt.out.empty() ? default_out_dir(def.name + "-" + opt.algo) : fs::path(opt.out);
    const std::string canonical = canonical_text(def);
    json man = manifest(def, canonical, opt.algo, cfg);
    man["x0"] = x0;
    man["status"] = to_string(traj.status);
    man["message"] = traj.message;
    man["iterations"] = traj.iterates.size() - 1;
    man["final"] = traj.last().x;
    man["final_potential"] = traj.last().potential;
    write_atomic(dir / "scenario.json", canonical);
    write_atomic(dir / "trajectory.csv", trajectory_csv(traj.iterates));
    write_atomic(dir / "timing.csv", timing_csv(traj.iterates));
    if (!traj.mean_path.empty()) {
      write_atomic(dir / "trajectory_mean.csv", trajectory_csv(traj.mean_path));
      write_atomic(dir / "paths.csv", paths_csv(traj.paths));
    }
    if (!traj.relay_log.empty()) write_atomic(dir / "relay_log.csv", relay_csv(traj.relay_log));
    if (opt.contour_resolution > 0) {
      write_atomic(dir / "contours.csv", contours_csv(def.game, traj.last().x, opt.contour_coords.first,
                                                      opt.contour_coords.second, opt.contour_resolution));
    }
    write_atomic(dir / "manifest.json", man.dump(2) + "\n");

    out << def.name << " " << opt.algo << ": " << to_string(traj.status) << " after "
        << traj.iterates.size() - 1 << " iterations\nfinal x =";
    for (double v : traj.last().x) out << ' ' << format_double(v);
    out << "\npotential = " << format_double(traj.last().potential) << "\noutput: " << dir.string() << '\n';
    if (!traj.message.empty()) err << traj.message << '\n';
    return status_code(traj.status);
  });
}

int cmd_certify(const CertifyOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const ScenarioDef def = load_scenario(opt.scenario);
    const GameSpec& game = def.game;
    const std::size_t res = opt.resolution.value_or(def.certification.resolution);
    const double budget = opt.budget.value_or(def.certification.budget);
    const JointStrategy point = start_point(def, opt.point);
    if (point.size() != game.dimension()) throw ValidationError("wrong number of coordinates", "point");
    if (!game.space().contains(point)) throw ValidationError("outside the strategy box", "point");

    CertificationReport rep;
    rep.point = point;
    rep.resolution = res;
    rep.potential = game.potential(point);
    rep.gaps = br_gap(game, point, res);
    rep.epsilon = *std::max_element(rep.gaps.begin(), rep.gaps.end());
    rep.bounds.push_back({"epsilon <= threshold", rep.epsilon, opt.epsilon, rep.epsilon <= opt.epsilon});

    const fs::path dir = opt.out.empty() ? default_out_dir(def.name + "-certify") : fs::path(opt.out);
    json doc;
    int code = kExitOk;
    try {
      rep.argmax = grid_potential_argmax(game, res, budget);
      rep.has_argmax = true;
      if (game.lambda() > 0.0) {
        const auto rb = regularization_bound_check(game.with_lambda(0.0), game.regularizer(), game.lambda(), res, budget);
        doc["regularization_bound"] = regularization_bound_to_json(rb);
        for (const auto& b : rb.bounds) rep.bounds.push_back(b);
      }
    } catch (const BudgetExceeded& e) {
      err << "error: " << e.what() << '\n';
      code = kExitBudget;
    }
    json body = report_to_json(rep);
    for (auto it = doc.begin(); it != doc.end(); ++it) body[it.key()] = it.value();
    body["scenario"] = def.name;
    body["scenario_hash"] = hash_hex(canonical_text(def));
    body["epsilon_threshold"] = opt.epsilon;
    const bool all_ok = std::all_of(rep.bounds.begin(), rep.bounds.end(), [](const auto& b) { return b.satisfied; });
    body["passed"] = code == kExitOk && all_ok;
    write_atomic(dir / "certification.json", body.dump(2) + "\n");

    out << "epsilon = " << format_double(rep.epsilon) << " (gaps:";
    for (double g : rep.gaps) out << ' ' << format_double(g);
    out << ")\npotential at point = " << format_double(rep.potential) << '\n';
    if (rep.has_argmax) {
      out << "grid argmax =";
      for (double v : rep.argmax.point) out << ' ' << format_double(v);
      out << " value " << format_double(rep.argmax.value) << " (" << rep.argmax.ties.size() << " tied nodes)\n";
    }
    for (const auto& b : rep.bounds) {
      out << (b.satisfied ? "  ok    " : "  FAIL  ") << b.name << ": " << format_double(b.lhs) << " vs "
          << format_double(b.rhs) << '\n';
    }
    out << "output: " << dir.string() << '\n';
    if (code != kExitOk) return code;
    return all_ok ? kExitOk : kExitNotNash;
  });
}

int cmd_compare(const CompareOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const ScenarioDef def = load_scenario(opt.scenario);
    if (opt.algos.empty()) throw ValidationError("no algorithms given", "algos");
    for (const auto& a : opt.algos) check_algo(def, a);
    const JointStrategy x0 = start_point(def, opt.x0);
    const fs::path dir = opt.out.empty() ? default_out_dir(def.name + "-compare") : fs::path(opt.out);

    std::optional<JointStrategy> reference;
    try {
      reference = grid_potential_argmax(def.game, def.certification.resolution, def.certification.budget).point;
    } catch (const BudgetExceeded&) {
      err << "note: potential argmax not certified within budget; error columns omitted\n";
    }
    const bool pairwise = std::any_of(def.game.collective().begin(), def.game.collective().end(), [](const auto& t) {
      return std::holds_alternative<collective::NegPairwiseL1>(t);
    });

    std::vector<Trajectory> runs;
    int code = kExitOk;
    json summary = json::object();
    for (const auto& algo : opt.algos) {
      SolverConfig cfg = resolve_config(def, algo);
      if (opt.seed) cfg.seed = *opt.seed;
      runs.push_back(run_algorithm(def, algo, x0, cfg));
      const Trajectory& t = runs.back();
      write_atomic(dir / ("trajectory_" + algo + ".csv"), trajectory_csv(t.iterates));
      code = std::max(code, status_code(t.status));
      json s = {{"status", to_string(t.status)}, {"iterations", t.iterates.size() - 1}, {"final", t.last().x}};
      if (reference) {
        json hit = nullptr;
        for (const auto& it : t.iterates) {
          double e = 0.0;
          for (std::size_t k = 0; k < x0.size(); ++k) e += (it.x[k] - (*reference)[k]) * (it.x[k] - (*reference)[k]);
          if (std::sqrt(e) <= opt.threshold) {
            hit = it.iter;
            break;
          }
        }
        s["iterations_to_threshold"] = hit;
      }
      if (pairwise) s["final_max_pairwise_l1"] = max_pairwise_l1(def.game.space(), t.last().x);
      summary[algo] = s;
    }

    std::ostringstream csv;
    csv << "iter";
    for (const auto& a : opt.algos) {
      if (reference) csv << ",err_" << a;
      csv << ",potential_" << a;
      if (pairwise) csv << ",pairwise_" << a;
    }
    csv << '\n';
    std::size_t len = 0;
    for (const auto& t : runs) len = std::max(len, t.iterates.size());
    for (std::size_t n = 0; n < len; ++n) {
      csv << n;
      for (const auto& t : runs) {
        const std::size_t cols = 1 + (reference ? 1 : 0) + (pairwise ? 1 : 0);
        if (n >= t.iterates.size()) {
          for (std::size_t c = 0; c < cols; ++c) csv << ',';
          continue;
        }
        const auto& it = t.iterates[n];
        if (reference) {
          double e = 0.0;
          for (std::size_t k = 0; k < x0.size(); ++k) e += (it.x[k] - (*reference)[k]) * (it.x[k] - (*reference)[k]);
          csv << ',' << format_double(std::sqrt(e));
        }
        csv << ',' << format_double(it.potential);
        if (pairwise) csv << ',' << format_double(max_pairwise_l1(def.game.space(), it.x));
      }
      csv << '\n';
    }
    write_atomic(dir / "compare.csv", csv.str());
    json doc = {{"scenario", def.name},
                {"scenario_hash", hash_hex(canonical_text(def))},
                {"x0", x0},
                {"threshold", opt.threshold},
                {"runs", summary}};
    if (reference) doc["reference"] = *reference;
    write_atomic(dir / "compare_summary.json", doc.dump(2) + "\n");

    for (const auto& a : opt.algos) {
      const json& s = summary[a];
      out << a << ": " << s["status"].get<std::string>() << ", " << s["iterations"] << " iterations";
      if (s.contains("iterations_to_threshold")) out << ", reaches " << opt.threshold << " at " << s["iterations_to_threshold"];
      if (s.contains("final_max_pairwise_l1")) out << ", final max pairwise L1 " << s["final_max_pairwise_l1"];
      out << '\n';
    }
    out << "output: " << dir.string() << '\n';
    return code;
  });
}

int cmd_steer(const SteerOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const ScenarioDef def = load_scenario(opt.scenario);
    const SolverConfig cfg = def.solver_config("imm");
    const SteeringTrace trace = steer_collective(def, opt.steer, cfg, opt.x0.value_or(JointStrategy{}));
    const fs::path dir = opt.out.empty() ? default_out_dir(def.name + "-steer") : fs::path(opt.out);
    const std::string canonical = canonical_text(def);
    json man = manifest(def, canonical, "imm", cfg);
    man["tau"] = opt.steer.tau;
    man["eta"] = opt.steer.eta;
    man["delta"] = opt.steer.delta;
    man["lambda_bounds"] = {opt.steer.lambda_min, opt.steer.lambda_max};
    man["status"] = to_string(trace.status);
    man["message"] = trace.message;
    man["steps"] = trace.steps.size();
    write_atomic(dir / "scenario.json", canonical);
    write_atomic(dir / "steering.csv", steering_csv(trace));
    write_atomic(dir / "manifest.json", man.dump(2) + "\n");

    out << "steering to tau = " << format_double(opt.steer.tau) << ": " << to_string(trace.status);
    if (!trace.steps.empty()) {
      const auto& s = trace.steps.back();
      out << " after " << trace.steps.size() << " steps, J = " << format_double(s.collective)
          << ", |J - tau| = " << format_double(s.error);
    }
    out << "\noutput: " << dir.string() << '\n';
    if (!trace.message.empty()) err << trace.message << '\n';
    switch (trace.status) {
      case SteeringStatus::converged:
        return static_cast<int>(kExitOk);
      case SteeringStatus::max_iter:
        return static_cast<int>(kExitMaxIter);
      case SteeringStatus::unreachable:
        return static_cast<int>(kExitUnreachable);
      case SteeringStatus::error:
        break;
    }
    return static_cast<int>(kExitSolverError);
  });
}

int cmd_list(std::ostream& out) {
  for (const auto& name : builtin_names()) out << name << "  " << builtin(name).description << '\n';
  return kExitOk;
}

int cmd_export(const std::string& scenario, const std::string& out_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const std::string text = canonical_text(load_scenario(scenario));
    if (out_path.empty()) {
      out << text;
    } else {
      write_atomic(out_path, text);
    }
    return static_cast<int>(kExitOk);
  });
}

}  // namespace ptgame::io
