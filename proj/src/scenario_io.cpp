#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ptgame/cli_io.hpp"
#include "ptgame/error.hpp"

namespace ptgame::io {

using nlohmann::json;

namespace {

// Object reader that remembers which keys were consumed so leftovers can be
// rejected.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError("expected an object", path_);
  }

  const json& req(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end()) throw ValidationError("missing required key", sub(key));
    seen_.insert(key);
    return *it;
  }
  const json* opt(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }
  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void done() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ValidationError("unknown key", sub(it.key()));
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string idx(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

double num(const json& j, const std::string& path) {
  if (!j.is_number()) throw ValidationError("expected a number", path);
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ValidationError("must be finite", path);
  return v;
}

std::uint64_t count(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  throw ValidationError("expected a nonnegative integer", path);
}

std::string str(const json& j, const std::string& path) {
  if (!j.is_string()) throw ValidationError("expected a string", path);
  return j.get<std::string>();
}

bool boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ValidationError("expected true or false", path);
  return j.get<bool>();
}

const json& arr(const json& j, const std::string& path) {
  if (!j.is_array()) throw ValidationError("expected an array", path);
  return j;
}

std::vector<double> nums(const json& j, const std::string& path) {
  std::vector<double> out;
  for (std::size_t i = 0; i < arr(j, path).size(); ++i) out.push_back(num(j[i], idx(path, i)));
  return out;
}

std::vector<std::size_t> counts(const json& j, const std::string& path) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < arr(j, path).size(); ++i) out.push_back(count(j[i], idx(path, i)));
  return out;
}

std::string kind_of(Obj& o) { return str(o.req("kind"), o.sub("kind")); }

[[noreturn]] void unknown_kind(const std::string& kind, const std::string& path) {
  throw ValidationError("unknown kind '" + kind + "'", path);
}

// --- weighting -------------------------------------------------------------

json weighting_to_json(const WeightingFunction& w) {
  return std::visit(
      [](const auto& k) -> json {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, WeightingFunction::Identity>) {
          return {{"kind", "identity"}};
        } else if constexpr (std::is_same_v<T, WeightingFunction::Prelec>) {
          return {{"kind", "prelec"}, {"alpha", k.alpha}};
        } else {
          json knots = json::array();
          for (const auto& [p, v] : k.knots) knots.push_back({p, v});
          return {{"kind", "tabulated"}, {"knots", knots}};
        }
      },
      w.kind());
}

WeightingFunction weighting_from_json(const json& j, const std::string& path) {
  Obj o(j, path);
  const std::string kind = kind_of(o);
  WeightingFunction w;
  if (kind == "identity") {
    w = WeightingFunction::identity();
  } else if (kind == "prelec") {
    w = WeightingFunction::prelec(num(o.req("alpha"), o.sub("alpha")));
  } else if (kind == "tabulated") {
    const std::string kp = o.sub("knots");
    const json& ks = arr(o.req("knots"), kp);
    std::vector<std::pair<double, double>> knots;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const auto pair = nums(ks[i], idx(kp, i));
      if (pair.size() != 2) throw ValidationError("expected [p, value]", idx(kp, i));
      knots.emplace_back(pair[0], pair[1]);
    }
    w = WeightingFunction::tabulated(std::move(knots));
  } else {
    unknown_kind(kind, o.sub("kind"));
  }
  o.done();
  return w;
}

// --- value and reward functions -------------------------------------------

const char* form_name(ValueSegment::Form f) {
  switch (f) {
    case ValueSegment::Form::linear:
      return "linear";
    case ValueSegment::Form::log1p:
      return "log1p";
    case ValueSegment::Form::exp_saturating:
      return "exp_saturating";
  }
  return "linear";
}

json value_to_json(const ValueFunction& v) {
  return std::visit(
      [](const auto& k) -> json {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, ValueFunction::Identity>) {
          return {{"kind", "identity"}};
        } else if constexpr (std::is_same_v<T, ValueFunction::Linear>) {
          return {{"kind", "linear"}, {"slope", k.slope}};
        } else if constexpr (std::is_same_v<T, ValueFunction::LogGainLinearLoss>) {
          return {{"kind", "log_gain_linear_loss"}};
        } else if constexpr (std::is_same_v<T, ValueFunction::ExpSaturating>) {
          return {{"kind", "exp_saturating"}, {"c", k.c}, {"k", k.k}};
        } else {
          json segs = json::array();
          for (const auto& s : k.segments) {
            segs.push_back({{"start", s.start}, {"offset", s.offset}, {"form", form_name(s.form)}, {"a", s.a},
                            {"b", s.b}});
          }
          return {{"kind", "piecewise"}, {"segments", segs}};
        }
      },
      v.kind());
}

ValueFunction value_from_json(const json& j, const std::string& path) {
  Obj o(j, path);
  const std::string kind = kind_of(o);
  ValueFunction v;
  if (kind == "identity") {
    v = ValueFunction::identity();
  } else if (kind == "linear") {
    v = ValueFunction::linear(num(o.req("slope"), o.sub("slope")));
  } else if (kind == "log_gain_linear_loss") {
    v = ValueFunction::log_gain_linear_loss();
  } else if (kind == "exp_saturating") {
    v = ValueFunction::exp_saturating(num(o.req("c"), o.sub("c")), num(o.req("k"), o.sub("k")));
  } else if (kind == "piecewise") {
    const std::string sp = o.sub("segments");
    const json& segs = arr(o.req("segments"), sp);
    std::vector<ValueSegment> out;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      Obj s(segs[i], idx(sp, i));
      ValueSegment seg;
      seg.start = num(s.req("start"), s.sub("start"));
      seg.offset = num(s.req("offset"), s.sub("offset"));
      const std::string form = str(s.req("form"), s.sub("form"));
      if (form == "linear") {
        seg.form = ValueSegment::Form::linear;
      } else if (form == "log1p") {
        seg.form = ValueSegment::Form::log1p;
      } else if (form == "exp_saturating") {
        seg.form = ValueSegment::Form::exp_saturating;
      } else {
        throw ValidationError("unknown form '" + form + "'", s.sub("form"));
      }
      seg.a = num(s.req("a"), s.sub("a"));
      if (const json* b = s.opt("b")) seg.b = num(*b, s.sub("b"));
      s.done();
      out.push_back(seg);
    }
    v = ValueFunction::piecewise(std::move(out));
  } else {
    unknown_kind(kind, o.sub("kind"));
  }
  o.done();
  return v;
}

json reward_to_json(const RewardFunction& r) {
  return std::visit(
      [](const auto& k) -> json {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, RewardFunction::AffineScaled>) {
          return {{"kind", "affine_scaled"}, {"d", k.d}};
        } else if constexpr (std::is_same_v<T, RewardFunction::ScaleShift>) {
          return {{"kind", "scale_shift"}, {"d", k.d}};
        } else if constexpr (std::is_same_v<T, RewardFunction::ExpOfProduct>) {
          return {{"kind", "exp_of_product"}, {"k", k.k}};
        } else if constexpr (std::is_same_v<T, RewardFunction::ExpPlain>) {
          return {{"kind", "exp_plain"}, {"k", k.k}};
        } else {
          return {{"kind", "linear"}, {"c", k.c}};
        }
      },
      r.kind());
}

RewardFunction reward_from_json(const json& j, const std::string& path) {
  Obj o(j, path);
  const std::string kind = kind_of(o);
  RewardFunction r;
  if (kind == "affine_scaled") {
    r = RewardFunction::affine_scaled(num(o.req("d"), o.sub("d")));
  } else if (kind == "scale_shift") {
    r = RewardFunction::scale_shift(num(o.req("d"), o.sub("d")));
  } else if (kind == "exp_of_product") {
    r = RewardFunction::exp_of_product(num(o.req("k"), o.sub("k")));
  } else if (kind == "exp_plain") {
    r = RewardFunction::exp_plain(num(o.req("k"), o.sub("k")));
  } else if (kind == "linear") {
    r = RewardFunction::linear(num(o.req("c"), o.sub("c")));
  } else {
    unknown_kind(kind, o.sub("kind"));
  }
  o.done();
  return r;
}

// --- collective and regularizer -------------------------------------------

json collective_to_json(const collective::Term& t) {
  return std::visit(
      [](const auto& k) -> json {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, collective::Constant>) {
          return {{"kind", "constant"}, {"c", k.c}};
        } else if constexpr (std::is_same_v<T, collective::NegQuadraticToTarget>) {
          return {{"kind", "neg_quadratic_to_target"}, {"coef", k.coef}, {"target", k.target}, {"coords", k.coords}};
        } else if constexpr (std::is_same_v<T, collective::NegSqDeviation>) {
          return {{"kind", "neg_sq_deviation"}, {"d", k.d}, {"coords", k.coords}};
        } else if constexpr (std::is_same_v<T, collective::NegPairwiseL1>) {
          return {{"kind", "neg_pairwise_l1"}};
        } else {
          return {{"kind", "neg_abs_sum"}, {"coords", k.coords}};
        }
      },
      t);
}

collective::Term collective_from_json(const json& j, const std::string& path) {
  Obj o(j, path);
  const std::string kind = kind_of(o);
  collective::Term t;
  if (kind == "constant") {
    t = collective::Constant{num(o.req("c"), o.sub("c"))};
  } else if (kind == "neg_quadratic_to_target") {
    t = collective::NegQuadraticToTarget{num(o.req("coef"), o.sub("coef")), num(o.req("target"), o.sub("target")),
                                         counts(o.req("coords"), o.sub("coords"))};
  } else if (kind == "neg_sq_deviation") {
    std::vector<std::size_t> coords;
    if (const json* c = o.opt("coords")) coords = counts(*c, o.sub("coords"));
    t = collective::NegSqDeviation{num(o.req("d"), o.sub("d")), std::move(coords)};
  } else if (kind == "neg_pairwise_l1") {
    t = collective::NegPairwiseL1{};
  } else if (kind == "neg_abs_sum") {
    t = collective::NegAbsSum{counts(o.req("coords"), o.sub("coords"))};
  } else {
    unknown_kind(kind, o.sub("kind"));
  }
  o.done();
  return t;
}

json regularizer_to_json(const regularizer::Term& t) {
  return std::visit(
      [](const auto& k) -> json {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, regularizer::WeightedSqNorm>) {
          return {{"kind", "weighted_sq_norm"}, {"center", k.center}, {"weights", k.weights}};
        } else {
          return {{"kind", "linear_incentive"}, {"coefficients", k.coefficients}, {"coords", k.coords}};
        }
      },
      t);
}

regularizer::Term regularizer_from_json(const json& j, const std::string& path) {
  Obj o(j, path);
  const std::string kind = kind_of(o);
  regularizer::Term t;
  if (kind == "weighted_sq_norm") {
    t = regularizer::WeightedSqNorm{nums(o.req("center"), o.sub("center")), nums(o.req("weights"), o.sub("weights"))};
  } else if (kind == "linear_incentive") {
    t = regularizer::LinearIncentive{nums(o.req("coefficients"), o.sub("coefficients")),
                                     counts(o.req("coords"), o.sub("coords"))};
  } else {
    unknown_kind(kind, o.sub("kind"));
  }
  o.done();
  return t;
}

// --- agents ---------------------------------------------------------------

json agent_to_json(const AgentSpec& a, const StrategyBlock& b) {
  json block = {{"lo", b.lo}, {"hi", b.hi}};
  if (b.lattice) block["lattice"] = {{"origin", b.lattice->origin}, {"step", b.lattice->step}};
  json terms = json::array();
  for (const auto& t : a.terms) {
    terms.push_back({{"sign", t.sign},
                     {"value_fn", value_to_json(t.value)},
                     {"reward_fn", reward_to_json(t.reward)},
                     {"coordinate", t.coordinate}});
  }
  return {{"weight", a.weight}, {"constant", a.constant}, {"block", block}, {"individual_terms", terms}};
}

std::pair<AgentSpec, StrategyBlock> agent_from_json(const json& j, const std::string& path) {
  Obj o(j, path);
  AgentSpec a;
  StrategyBlock b;
  if (const json* w = o.opt("weight")) a.weight = num(*w, o.sub("weight"));
  if (const json* c = o.opt("constant")) a.constant = num(*c, o.sub("constant"));
  {
    Obj bo(o.req("block"), o.sub("block"));
    b.lo = nums(bo.req("lo"), bo.sub("lo"));
    b.hi = nums(bo.req("hi"), bo.sub("hi"));
    if (const json* l = bo.opt("lattice")) {
      Obj lo(*l, bo.sub("lattice"));
      Lattice lat;
      if (const json* og = lo.opt("origin")) lat.origin = num(*og, lo.sub("origin"));
      lat.step = num(lo.req("step"), lo.sub("step"));
      lo.done();
      b.lattice = lat;
    }
    bo.done();
  }
  if (const json* ts = o.opt("individual_terms")) {
    const std::string tp = o.sub("individual_terms");
    for (std::size_t i = 0; i < arr(*ts, tp).size(); ++i) {
      Obj to((*ts)[i], idx(tp, i));
      IndividualTerm t;
      const json& sj = to.req("sign");
      if (!sj.is_number_integer()) throw ValidationError("expected +1 or -1", to.sub("sign"));
      t.sign = sj.get<int>();
      t.value = value_from_json(to.req("value_fn"), to.sub("value_fn"));
      t.reward = reward_from_json(to.req("reward_fn"), to.sub("reward_fn"));
      if (const json* c = to.opt("coordinate")) t.coordinate = count(*c, to.sub("coordinate"));
      to.done();
      a.terms.push_back(std::move(t));
    }
  }
  o.done();
  return {std::move(a), std::move(b)};
}

const char* step_name(StepSchedule s) { return s == StepSchedule::constant ? "constant" : "diminishing"; }

}  // namespace

// ---------------------------------------------------------------------------

json config_to_json(const SolverConfig& c) {
  return {{"max_iter", c.max_iter},
          {"tol", c.tol},
          {"step", step_name(c.step)},
          {"eta", c.eta},
          {"accelerate", c.accelerate},
          {"prox_weight", c.prox_weight},
          {"inner_tol", c.inner_tol},
          {"max_inner_iter", c.max_inner_iter},
          {"averaging", c.averaging},
          {"seed", c.seed},
          {"first_agent", c.first_agent},
          {"grid_points", c.grid_points}};
}

SolverConfig config_from_json(const json& j, const std::string& path) {
  Obj o(j, path);
  SolverConfig c;
  if (const json* v = o.opt("max_iter")) c.max_iter = count(*v, o.sub("max_iter"));
  if (const json* v = o.opt("tol")) c.tol = num(*v, o.sub("tol"));
  if (const json* v = o.opt("step")) {
    const std::string s = str(*v, o.sub("step"));
    if (s == "constant") {
      c.step = StepSchedule::constant;
    } else if (s == "diminishing") {
      c.step = StepSchedule::diminishing;
    } else {
      throw ValidationError("expected 'constant' or 'diminishing'", o.sub("step"));
    }
  }
  if (const json* v = o.opt("eta")) c.eta = num(*v, o.sub("eta"));
  if (const json* v = o.opt("accelerate")) c.accelerate = boolean(*v, o.sub("accelerate"));
  if (const json* v = o.opt("prox_weight")) c.prox_weight = num(*v, o.sub("prox_weight"));
  if (const json* v = o.opt("inner_tol")) c.inner_tol = num(*v, o.sub("inner_tol"));
  if (const json* v = o.opt("max_inner_iter")) c.max_inner_iter = count(*v, o.sub("max_inner_iter"));
  if (const json* v = o.opt("averaging")) c.averaging = count(*v, o.sub("averaging"));
  if (const json* v = o.opt("seed")) c.seed = count(*v, o.sub("seed"));
  if (const json* v = o.opt("first_agent")) c.first_agent = count(*v, o.sub("first_agent"));
  if (const json* v = o.opt("grid_points")) c.grid_points = count(*v, o.sub("grid_points"));
  o.done();
  try {
    validate(c);
  } catch (const ValidationError& e) {
    throw ValidationError(e.what(), path);
  }
  return c;
}

json scenario_to_json(const ScenarioDef& def) {
  const GameSpec& g = def.game;
  json agents = json::array();
  for (std::size_t i = 0; i < g.num_agents(); ++i) agents.push_back(agent_to_json(g.agent(i), g.space().block(i)));
  json coll = json::array();
  for (const auto& t : g.collective()) coll.push_back(collective_to_json(t));
  json reg = json::array();
  for (const auto& t : g.regularizer()) reg.push_back(regularizer_to_json(t));
  json solvers = json::object();
  for (const auto& [algo, cfg] : def.solver_defaults) solvers[algo] = config_to_json(cfg);
  json targets = json::array();
  for (const auto& t : def.acceptance.targets) targets.push_back(t);
  json states = json::array();
  for (const auto& s : def.initial_states) states.push_back(s);

  return {{"schema_version", kSchemaVersion},
          {"meta",
           {{"name", def.name},
            {"description", def.description},
            {"acceptance",
             {{"targets", targets}, {"tolerance", def.acceptance.tolerance}, {"note", def.acceptance.note}}}}},
          {"distribution", {{"support", g.distribution().support()}, {"probs", g.distribution().probs()}}},
          {"weighting", weighting_to_json(g.weighting())},
          {"agents", agents},
          {"collective", coll},
          {"regularizer", reg},
          {"lambda", g.lambda()},
          {"initial_states", states},
          {"solver_defaults", solvers},
          {"certification",
           {{"resolution", def.certification.resolution}, {"budget", def.certification.budget}}}};
}

ScenarioDef scenario_from_json(const json& doc) {
  Obj root(doc, "");
  const json& ver = root.req("schema_version");
  if (!ver.is_number_integer() || ver.get<int>() != kSchemaVersion) {
    throw ValidationError("unsupported schema version (expected " + std::to_string(kSchemaVersion) + ")",
                          "schema_version");
  }

  std::string name, description;
  Acceptance acceptance;
  {
    Obj meta(root.req("meta"), "meta");
    name = str(meta.req("name"), "meta.name");
    if (const json* d = meta.opt("description")) description = str(*d, "meta.description");
    if (const json* a = meta.opt("acceptance")) {
      Obj ac(*a, "meta.acceptance");
      if (const json* t = ac.opt("targets")) {
        for (std::size_t i = 0; i < arr(*t, "meta.acceptance.targets").size(); ++i) {
          acceptance.targets.push_back(nums((*t)[i], idx("meta.acceptance.targets", i)));
        }
      }
      if (const json* t = ac.opt("tolerance")) acceptance.tolerance = num(*t, "meta.acceptance.tolerance");
      if (const json* t = ac.opt("note")) acceptance.note = str(*t, "meta.acceptance.note");
      ac.done();
    }
    meta.done();
  }

  std::vector<double> support, probs;
  {
    Obj d(root.req("distribution"), "distribution");
    support = nums(d.req("support"), "distribution.support");
    probs = nums(d.req("probs"), "distribution.probs");
    d.done();
  }
  OutcomeDistribution dist(std::move(support), std::move(probs));

  WeightingFunction weighting = WeightingFunction::identity();
  if (const json* w = root.opt("weighting")) weighting = weighting_from_json(*w, "weighting");

  std::vector<AgentSpec> agents;
  std::vector<StrategyBlock> blocks;
  const json& aj = arr(root.req("agents"), "agents");
  for (std::size_t i = 0; i < aj.size(); ++i) {
    auto [a, b] = agent_from_json(aj[i], idx("agents", i));
    agents.push_back(std::move(a));
    blocks.push_back(std::move(b));
  }

  CollectiveUtility coll;
  if (const json* c = root.opt("collective")) {
    for (std::size_t i = 0; i < arr(*c, "collective").size(); ++i) {
      coll.push_back(collective_from_json((*c)[i], idx("collective", i)));
    }
  }
  Regularizer reg;
  if (const json* r = root.opt("regularizer")) {
    for (std::size_t i = 0; i < arr(*r, "regularizer").size(); ++i) {
      reg.push_back(regularizer_from_json((*r)[i], idx("regularizer", i)));
    }
  }
  double lambda = 0.0;
  if (const json* l = root.opt("lambda")) lambda = num(*l, "lambda");

  std::vector<JointStrategy> states;
  if (const json* s = root.opt("initial_states")) {
    for (std::size_t i = 0; i < arr(*s, "initial_states").size(); ++i) {
      states.push_back(nums((*s)[i], idx("initial_states", i)));
    }
  }
  std::map<std::string, SolverConfig> solvers;
  if (const json* s = root.opt("solver_defaults")) {
    if (!s->is_object()) throw ValidationError("expected an object", "solver_defaults");
    static const std::set<std::string> known{"ga", "aga", "sga", "ibr", "imm", "immd"};
    for (auto it = s->begin(); it != s->end(); ++it) {
      const std::string p = "solver_defaults." + it.key();
      if (!known.count(it.key())) throw ValidationError("unknown algorithm", p);
      solvers[it.key()] = config_from_json(it.value(), p);
    }
  }
  CertificationSettings cert;
  if (const json* c = root.opt("certification")) {
    Obj co(*c, "certification");
    if (const json* r = co.opt("resolution")) cert.resolution = count(*r, "certification.resolution");
    if (const json* b = co.opt("budget")) cert.budget = num(*b, "certification.budget");
    co.done();
  }
  root.done();

  StrategySpace space(std::move(blocks));
  GameSpec game(std::move(space), std::move(agents), std::move(coll), std::move(reg), lambda, std::move(dist),
                std::move(weighting));
  ScenarioDef def{std::move(name),     std::move(description), std::move(game), std::move(states),
                  std::move(solvers), cert,                    std::move(acceptance)};
  def.validate();
  return def;
}

ScenarioDef parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into a line and column.
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream msg;
    msg << "syntax error at line " << line << ", column " << col;
    throw ValidationError(msg.str(), "scenario");
  }
  return scenario_from_json(doc);
}

std::string canonical_text(const ScenarioDef& def) { return scenario_to_json(def).dump(2) + "\n"; }

std::string hash_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ScenarioDef load_scenario(const std::string& name_or_path) {
  const auto names = builtin_names();
  if (std::find(names.begin(), names.end(), name_or_path) != names.end()) return builtin(name_or_path);
  std::ifstream in(name_or_path, std::ios::binary);
  if (!in) {
    throw ValidationError("not a built-in scenario and not a readable file: '" + name_or_path + "'", "scenario");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

}  // namespace ptgame::io
