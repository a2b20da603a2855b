#pragma once

// Scenario runner behind the command-line tool: builds perturbed instances
// from known exact structures, runs the correctors, checks every bound, and
// renders the trace CSV and JSON reports.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eqstab/cocycle.hpp"
#include "eqstab/errors.hpp"
#include "eqstab/galg.hpp"
#include "eqstab/graded.hpp"
#include "eqstab/groups.hpp"
#include "eqstab/homcorrect.hpp"
#include "eqstab/matca.hpp"
#include "eqstab/random.hpp"
#include "eqstab/relations.hpp"

namespace eqstab {

using json = nlohmann::ordered_json;

/// A schema violation, located by a JSON pointer.
class ScenarioError : public InvalidArgument {
 public:
  ScenarioError(const std::string& pointer, const std::string& what)
      : InvalidArgument(pointer + ": " + what), pointer_(pointer) {}
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

enum class ScenarioKind { rep, cocycle, lift, rokhlin, tracial, graded, integral_estimate };

inline const char* kind_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::rep: return "rep";
    case ScenarioKind::cocycle: return "cocycle";
    case ScenarioKind::lift: return "lift";
    case ScenarioKind::rokhlin: return "rokhlin";
    case ScenarioKind::tracial: return "tracial";
    case ScenarioKind::graded: return "graded";
    case ScenarioKind::integral_estimate: return "integral_estimate";
  }
  return "?";
}

struct Range {
  double lo = 0;
  double hi = 0;
  double sample(CounterRng& rng) const { return lo == hi ? lo : rng.uniform(lo, hi); }
};

struct IntRange {
  int lo = 0;
  int hi = 0;
  int sample(CounterRng& rng) const { return lo == hi ? lo : rng.uniform_int(lo, hi); }
};

struct TowerSpec {
  IntRange levels{5, 8};
  Range ratio{0.1, 0.25};
  std::string action = "conjugation";  // or "translation"
};

struct Scenario {
  ScenarioKind kind = ScenarioKind::rep;
  std::vector<GroupSpec> groups{GroupSpec{GroupKind::cyclic, 3, {}}};  // cycled by trial
  IntRange dimension{2, 6};
  std::optional<Range> magnitude;       // literal perturbation size
  std::optional<Range> target_defect;   // tune the perturbation to this measured r
  std::optional<Range> threshold_fraction;  // partition seeds: delta as a fraction of the threshold
  std::vector<double> radii{0.1, 0.3, 0.45};  // integral estimate, cycled by trial
  TowerSpec tower;
  std::uint64_t seed = 1;
  int trials = 10;
  double tolerance = 1e-12;
  int max_iterations = 64;
  bool allow_uncertified = false;
  std::optional<double> epsilon;  // graded component tolerance override
};

// ---------------------------------------------------------------------------
// JSON schema

inline std::string group_spec_name(const GroupSpec& g) {
  switch (g.kind) {
    case GroupKind::cyclic: return "Z/" + std::to_string(g.param);
    case GroupKind::dihedral: return "D" + std::to_string(g.param);
    case GroupKind::symmetric: return "S" + std::to_string(g.param);
    case GroupKind::product: return group_spec_name(g.factors.at(0)) + "x" + group_spec_name(g.factors.at(1));
  }
  return "?";
}

inline json group_spec_to_json(const GroupSpec& g) {
  switch (g.kind) {
    case GroupKind::cyclic: return {{"kind", "cyclic"}, {"order", g.param}};
    case GroupKind::dihedral: return {{"kind", "dihedral"}, {"n", g.param}};
    case GroupKind::symmetric: return {{"kind", "symmetric"}, {"n", g.param}};
    case GroupKind::product:
      return {{"kind", "product"},
              {"factors", json::array({group_spec_to_json(g.factors.at(0)), group_spec_to_json(g.factors.at(1))})}};
  }
  return {};
}

namespace detail {

inline const json& require_field(const json& j, const std::string& ptr, const char* key) {
  if (!j.contains(key)) throw ScenarioError(ptr + "/" + key, "missing required field");
  return j.at(key);
}

inline int as_int(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) throw ScenarioError(ptr, "expected an integer");
  return j.get<int>();
}

inline double as_number(const json& j, const std::string& ptr) {
  if (!j.is_number()) throw ScenarioError(ptr, "expected a number");
  return j.get<double>();
}

inline Range as_range(const json& j, const std::string& ptr) {
  if (j.is_number()) {
    const double v = j.get<double>();
    return {v, v};
  }
  if (!j.is_array() || j.size() != 2) throw ScenarioError(ptr, "expected a number or a [lo, hi] pair");
  Range r{as_number(j[0], ptr + "/0"), as_number(j[1], ptr + "/1")};
  if (r.lo > r.hi) throw ScenarioError(ptr, "lo exceeds hi");
  return r;
}

inline IntRange as_int_range(const json& j, const std::string& ptr) {
  if (j.is_number_integer()) {
    const int v = j.get<int>();
    return {v, v};
  }
  if (!j.is_array() || j.size() != 2) throw ScenarioError(ptr, "expected an integer or a [lo, hi] pair");
  IntRange r{as_int(j[0], ptr + "/0"), as_int(j[1], ptr + "/1")};
  if (r.lo > r.hi) throw ScenarioError(ptr, "lo exceeds hi");
  return r;
}

inline GroupSpec parse_group(const json& j, const std::string& ptr) {
  if (!j.is_object()) throw ScenarioError(ptr, "expected a group object");
  const json& kind = require_field(j, ptr, "kind");
  if (!kind.is_string()) throw ScenarioError(ptr + "/kind", "expected a string");
  const std::string k = kind.get<std::string>();
  GroupSpec g;
  if (k == "cyclic") {
    g.kind = GroupKind::cyclic;
    g.param = as_int(require_field(j, ptr, "order"), ptr + "/order");
  } else if (k == "dihedral" || k == "symmetric") {
    g.kind = k == "dihedral" ? GroupKind::dihedral : GroupKind::symmetric;
    g.param = as_int(require_field(j, ptr, "n"), ptr + "/n");
  } else if (k == "product") {
    g.kind = GroupKind::product;
    const json& f = require_field(j, ptr, "factors");
    if (!f.is_array() || f.size() != 2) throw ScenarioError(ptr + "/factors", "expected two factors");
    g.factors = {parse_group(f[0], ptr + "/factors/0"), parse_group(f[1], ptr + "/factors/1")};
  } else {
    throw ScenarioError(ptr + "/kind", "unknown group kind '" + k + "'");
  }
  if (g.kind != GroupKind::product && g.param < 1) throw ScenarioError(ptr, "group parameter must be positive");
  try {
    (void)make_group(g);
  } catch (const Error& e) {
    throw ScenarioError(ptr, e.what());
  }
  return g;
}

}  // namespace detail

inline ScenarioKind parse_kind(const std::string& s, const std::string& ptr = "/kind") {
  for (auto k : {ScenarioKind::rep, ScenarioKind::cocycle, ScenarioKind::lift, ScenarioKind::rokhlin,
                 ScenarioKind::tracial, ScenarioKind::graded, ScenarioKind::integral_estimate}) {
    if (s == kind_name(k)) return k;
  }
  throw ScenarioError(ptr, "unknown scenario kind '" + s + "'");
}

/// Parses a scenario document. Unknown keys are rejected.
inline Scenario parse_scenario(const json& j) {
  using namespace detail;
  if (!j.is_object()) throw ScenarioError("", "scenario must be a JSON object");
  static const std::vector<std::string> known = {"kind",   "group",     "groups",    "dimension", "magnitude",
                                                 "target_defect", "threshold_fraction", "radii", "tower",
                                                 "seed",   "trials",    "tolerance", "max_iterations",
                                                 "allow_uncertified", "epsilon"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ScenarioError("/" + key, "unknown field");
  }
  Scenario s;
  const json& kind = require_field(j, "", "kind");
  if (!kind.is_string()) throw ScenarioError("/kind", "expected a string");
  s.kind = parse_kind(kind.get<std::string>());
  if (j.contains("group") && j.contains("groups")) throw ScenarioError("/groups", "give either group or groups");
  if (j.contains("group")) s.groups = {parse_group(j["group"], "/group")};
  if (j.contains("groups")) {
    const json& gs = j["groups"];
    if (!gs.is_array() || gs.empty()) throw ScenarioError("/groups", "expected a nonempty array");
    s.groups.clear();
    for (std::size_t i = 0; i < gs.size(); ++i) s.groups.push_back(parse_group(gs[i], "/groups/" + std::to_string(i)));
  }
  if (j.contains("dimension")) {
    s.dimension = as_int_range(j["dimension"], "/dimension");
    if (s.dimension.lo < 1) throw ScenarioError("/dimension", "must be positive");
  }
  if (j.contains("magnitude")) {
    s.magnitude = as_range(j["magnitude"], "/magnitude");
    if (s.magnitude->lo < 0) throw ScenarioError("/magnitude", "must be nonnegative");
  }
  if (j.contains("target_defect")) {
    s.target_defect = as_range(j["target_defect"], "/target_defect");
    if (s.target_defect->lo <= 0) throw ScenarioError("/target_defect", "must be positive");
  }
  if (j.contains("threshold_fraction")) {
    s.threshold_fraction = as_range(j["threshold_fraction"], "/threshold_fraction");
    if (s.threshold_fraction->lo <= 0) throw ScenarioError("/threshold_fraction", "must be positive");
  }
  if (j.contains("radii")) {
    const json& r = j["radii"];
    if (!r.is_array() || r.empty()) throw ScenarioError("/radii", "expected a nonempty array");
    s.radii.clear();
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double v = as_number(r[i], "/radii/" + std::to_string(i));
      if (v < 0 || v > 0.5) throw ScenarioError("/radii/" + std::to_string(i), "radius must lie in [0, 1/2]");
      s.radii.push_back(v);
    }
  }
  if (j.contains("tower")) {
    const json& t = j["tower"];
    if (!t.is_object()) throw ScenarioError("/tower", "expected an object");
    if (t.contains("levels")) s.tower.levels = as_int_range(t["levels"], "/tower/levels");
    if (t.contains("ratio")) s.tower.ratio = as_range(t["ratio"], "/tower/ratio");
    if (t.contains("action")) {
      if (!t["action"].is_string()) throw ScenarioError("/tower/action", "expected a string");
      s.tower.action = t["action"].get<std::string>();
      if (s.tower.action != "conjugation" && s.tower.action != "translation") {
        throw ScenarioError("/tower/action", "expected 'conjugation' or 'translation'");
      }
    }
    if (s.tower.levels.lo < 1 || s.tower.levels.hi > 32) throw ScenarioError("/tower/levels", "must lie in [1, 32]");
    if (s.tower.ratio.lo <= 0 || s.tower.ratio.hi >= 1) throw ScenarioError("/tower/ratio", "must lie in (0, 1)");
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) throw ScenarioError("/seed", "expected an integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("trials")) {
    s.trials = as_int(j["trials"], "/trials");
    if (s.trials < 1) throw ScenarioError("/trials", "must be positive");
  }
  if (j.contains("tolerance")) {
    s.tolerance = as_number(j["tolerance"], "/tolerance");
    if (s.tolerance <= 0) throw ScenarioError("/tolerance", "must be positive");
  }
  if (j.contains("max_iterations")) s.max_iterations = as_int(j["max_iterations"], "/max_iterations");
  if (j.contains("allow_uncertified")) {
    if (!j["allow_uncertified"].is_boolean()) throw ScenarioError("/allow_uncertified", "expected a boolean");
    s.allow_uncertified = j["allow_uncertified"].get<bool>();
  }
  if (j.contains("epsilon")) s.epsilon = as_number(j["epsilon"], "/epsilon");
  return s;
}

inline json scenario_to_json(const Scenario& s) {
  json j;
  j["kind"] = kind_name(s.kind);
  json gs = json::array();
  for (const auto& g : s.groups) gs.push_back(group_spec_to_json(g));
  j["groups"] = gs;
  j["dimension"] = {s.dimension.lo, s.dimension.hi};
  if (s.magnitude) j["magnitude"] = {s.magnitude->lo, s.magnitude->hi};
  if (s.target_defect) j["target_defect"] = {s.target_defect->lo, s.target_defect->hi};
  if (s.threshold_fraction) j["threshold_fraction"] = {s.threshold_fraction->lo, s.threshold_fraction->hi};
  if (s.kind == ScenarioKind::integral_estimate) j["radii"] = s.radii;
  if (s.kind == ScenarioKind::lift) {
    j["tower"] = {{"levels", {s.tower.levels.lo, s.tower.levels.hi}},
                  {"ratio", {s.tower.ratio.lo, s.tower.ratio.hi}},
                  {"action", s.tower.action}};
  }
  j["seed"] = s.seed;
  j["trials"] = s.trials;
  j["tolerance"] = s.tolerance;
  j["max_iterations"] = s.max_iterations;
  j["allow_uncertified"] = s.allow_uncertified;
  if (s.epsilon) j["epsilon"] = *s.epsilon;
  return j;
}

/// Defaults used when a subcommand runs without a scenario file.
inline Scenario default_scenario(ScenarioKind kind) {
  Scenario s;
  s.kind = kind;
  switch (kind) {
    case ScenarioKind::rep:
    case ScenarioKind::cocycle:
      s.groups = {{GroupKind::cyclic, 2, {}}, {GroupKind::cyclic, 3, {}}, {GroupKind::symmetric, 3, {}},
                  {GroupKind::dihedral, 4, {}}};
      s.dimension = {2, 8};
      s.target_defect = Range{1e-3, 0.05};
      break;
    case ScenarioKind::lift:
      s.groups = {{GroupKind::symmetric, 3, {}}, {GroupKind::cyclic, 4, {}}};
      s.dimension = {2, 3};
      break;
    case ScenarioKind::rokhlin:
      s.groups = {{GroupKind::cyclic, 3, {}}};
      s.dimension = {6, 6};
      s.magnitude = Range{0.02, 0.02};
      s.allow_uncertified = true;
      break;
    case ScenarioKind::tracial:
      s.groups = {{GroupKind::cyclic, 2, {}}, {GroupKind::cyclic, 3, {}}};
      s.dimension = {5, 12};
      s.threshold_fraction = Range{0.2, 0.9};
      break;
    case ScenarioKind::graded:
      s.groups = {{GroupKind::cyclic, 2, {}}, {GroupKind::cyclic, 3, {}}, {GroupKind::cyclic, 4, {}}};
      s.dimension = {1, 3};
      s.magnitude = Range{1e-4, 1e-3};
      break;
    case ScenarioKind::integral_estimate:
      s.groups = {{GroupKind::cyclic, 4, {}}, {GroupKind::symmetric, 3, {}}};
      s.dimension = {2, 6};
      break;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Instance construction

/// Permutation matrix with P e_i = e_{perm[i]}.
inline CMatrix permutation_matrix(const std::vector<int>& perm) {
  const auto n = static_cast<Eigen::Index>(perm.size());
  CMatrix p = CMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) p(perm[static_cast<std::size_t>(i)], i) = 1.0;
  return p;
}

/// Block-diagonal direct sum.
inline CMatrix direct_sum(const std::vector<CMatrix>& parts) {
  Eigen::Index n = 0;
  for (const auto& p : parts) n += p.rows();
  CMatrix out = CMatrix::Zero(n, n);
  Eigen::Index o = 0;
  for (const auto& p : parts) {
    out.block(o, o, p.rows(), p.cols()) = p;
    o += p.rows();
  }
  return out;
}

/// A unitary representation of dimension `dim`: a random direct sum of the
/// regular, natural permutation and one-dimensional representations,
/// conjugated by a Haar unitary.
inline ApproxRep exact_rep(const FiniteGroup& G, int dim, CounterRng& rng) {
  if (dim < 1) throw InvalidArgument("exact_rep: dimension must be positive");
  const int m = G.order();
  std::vector<std::vector<CMatrix>> summands;  // summands[j][g]
  const auto chars = linear_characters(G);
  const auto& natural = G.natural_permutations();
  const int nat_deg = natural.empty() ? 0 : static_cast<int>(natural.front().size());
  int left = dim;
  while (left > 0) {
    std::vector<int> options{0};
    if (m <= left && m > 1) options.push_back(1);
    if (nat_deg > 1 && nat_deg <= left) options.push_back(2);
    const int pick = options[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(options.size()) - 1))];
    std::vector<CMatrix> s;
    if (pick == 0) {
      const auto& chi = chars[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(chars.size()) - 1))];
      for (int g = 0; g < m; ++g) s.push_back(CMatrix::Constant(1, 1, chi[g]));
      left -= 1;
    } else if (pick == 1) {
      for (int g = 0; g < m; ++g) {
        std::vector<int> perm(static_cast<std::size_t>(m));
        for (int h = 0; h < m; ++h) perm[h] = G.mul(g, h);
        s.push_back(permutation_matrix(perm));
      }
      left -= m;
    } else {
      for (int g = 0; g < m; ++g) s.push_back(permutation_matrix(natural[g]));
      left -= nat_deg;
    }
    summands.push_back(std::move(s));
  }
  const CMatrix w = random_unitary(rng, dim);
  ApproxRep out{G, {}};
  for (int g = 0; g < m; ++g) {
    std::vector<CMatrix> parts;
    for (const auto& s : summands) parts.push_back(s[g]);
    out.values.push_back(w * direct_sum(parts) * w.adjoint());
  }
  const double d = defect(out);
  if (d > tol::kComposed) throw Error("exact_rep: construction is not a representation (" + std::to_string(d) + ")");
  return out;
}

/// rho(g) = exp(eps H_g) pi(g) for fixed skew-Hermitian H_g of norm 1.
inline ApproxRep perturb_with(const ApproxRep& pi, const std::vector<CMatrix>& h, double eps) {
  if (eps == 0.0) return pi;
  ApproxRep out{pi.group, {}};
  for (int g = 0; g < pi.group.order(); ++g) out.values.push_back(exp_skew(eps * h[g]) * pi(g));
  return out;
}

inline std::vector<CMatrix> random_directions(CounterRng& rng, int count, Eigen::Index n) {
  std::vector<CMatrix> h;
  for (int i = 0; i < count; ++i) h.push_back(random_skew(rng, n, 1.0));
  return h;
}

/// Multiplies each value by exp(eps H) with H random skew-Hermitian, ||H|| = 1.
inline ApproxRep perturb(const ApproxRep& pi, double magnitude, CounterRng& rng) {
  if (magnitude < 0) throw InvalidArgument("perturb: magnitude must be nonnegative");
  return perturb_with(pi, random_directions(rng, pi.group.order(), pi.dim()), magnitude);
}

/// Scales a one-parameter family until `measure(t)` hits `target`; the
/// families used here are close to linear in t. Throws when the family does
/// not respond (for instance a perturbation the action cannot see).
inline double tune_scale(const std::function<double(double)>& measure, double target, double t0) {
  double t = t0;
  double m = measure(t);
  for (int i = 0; i < 8 && m > 0; ++i) {
    const double next = t * std::clamp(target / m, 0.1, 10.0);
    if (std::abs(next - t) <= 1e-6 * t) break;
    t = next;
    m = measure(t);
  }
  if (!(std::abs(m - target) <= 0.05 * target)) {
    std::ostringstream os;
    os << "could not tune the perturbation to defect " << target << " (reached " << m << ")";
    throw Error(os.str());
  }
  return t;
}

// ---------------------------------------------------------------------------
// Reports

struct BoundCheck {
  std::string name;
  double value = 0;
  double bound = 0;
  bool pass = false;
};

struct TrialReport {
  int trial = 0;
  std::string group;
  int dimension = 0;
  json measured = json::object();
  std::vector<BoundCheck> bounds;
  std::vector<TraceRow> trace;
  double wall_ms = 0;
  std::string error;

  void check(const std::string& name, double value, double bound) {
    bounds.push_back({name, value, bound, value <= bound});
  }
  bool pass() const {
    if (!error.empty()) return false;
    return std::all_of(bounds.begin(), bounds.end(), [](const BoundCheck& b) { return b.pass; });
  }
  const BoundCheck* find(const std::string& name) const {
    for (const auto& b : bounds)
      if (b.name == name) return &b;
    return nullptr;
  }
};

struct ScenarioResult {
  Scenario scenario;
  std::vector<TrialReport> trials;
  double wall_ms = 0;

  bool pass() const {
    return std::all_of(trials.begin(), trials.end(), [](const TrialReport& t) { return t.pass(); });
  }

  /// Names of failing bounds as "trial N: name (value > bound)".
  std::vector<std::string> failures() const {
    std::vector<std::string> out;
    char buf[256];
    for (const auto& t : trials) {
      if (!t.error.empty()) out.push_back("trial " + std::to_string(t.trial) + ": error: " + t.error);
      for (const auto& b : t.bounds) {
        if (b.pass) continue;
        std::snprintf(buf, sizeof buf, "trial %d: %s (%.6g > %.6g)", t.trial, b.name.c_str(), b.value, b.bound);
        out.emplace_back(buf);
      }
    }
    return out;
  }
};

/// `trial,iteration,defect,distance`, values in %.17g.
inline std::string trace_csv(const ScenarioResult& r) {
  std::string out = "trial,iteration,defect,distance\n";
  char buf[128];
  for (const auto& t : r.trials)
    for (const auto& row : t.trace) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", t.trial, row.iteration, row.defect, row.distance);
      out += buf;
    }
  return out;
}

inline json trial_json(const TrialReport& t) {
  json b = json::array();
  for (const auto& x : t.bounds) b.push_back({{"name", x.name}, {"value", x.value}, {"bound", x.bound}, {"pass", x.pass}});
  json j = {{"trial", t.trial}, {"group", t.group}, {"dimension", t.dimension}, {"measured", t.measured},
            {"bounds", b},      {"pass", t.pass()}, {"wall_time_ms", t.wall_ms}};
  if (!t.error.empty()) j["error"] = t.error;
  return j;
}

inline json report_json(const ScenarioResult& r) {
  json trials = json::array();
  for (const auto& t : r.trials) trials.push_back(trial_json(t));
  json failed = json::array();
  for (const auto& f : r.failures()) failed.push_back(f);
  return {{"scenario", scenario_to_json(r.scenario)},
          {"pass", r.pass()},
          {"failed", failed},
          {"wall_time_ms", r.wall_ms},
          {"trials", trials}};
}

/// Writes trace.csv, report.json and one trials/trial_NNNN.json per trial.
inline void write_outputs(const ScenarioResult& r, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "trials");
  {
    std::ofstream f(dir / "trace.csv", std::ios::binary);
    f << trace_csv(r);
  }
  {
    std::ofstream f(dir / "report.json", std::ios::binary);
    f << report_json(r).dump(2) << "\n";
  }
  char name[32];
  for (const auto& t : r.trials) {
    std::snprintf(name, sizeof name, "trial_%04d.json", t.trial);
    std::ofstream f(dir / "trials" / name, std::ios::binary);
    f << trial_json(t).dump(2) << "\n";
  }
}

// ---------------------------------------------------------------------------
// Trials

namespace detail {

constexpr double kBoundSlack = 1e-10;
constexpr double kDistanceSlack = 1e-9;

inline void copy_trace(TrialReport& rep, const std::vector<TraceRow>& trace) { rep.trace = trace; }

inline double sample_defect_target(const Scenario& s, CounterRng& rng) {
  // Stay inside the requested window after tuning.
  const Range r = *s.target_defect;
  return Range{r.lo * 1.02, r.hi * 0.98 > r.lo * 1.02 ? r.hi * 0.98 : r.lo * 1.02}.sample(rng);
}

inline void run_rep(const Scenario& s, const FiniteGroup& G, int dim, CounterRng& rng, TrialReport& rep) {
  const ApproxRep pi = exact_rep(G, dim, rng);
  const auto h = random_directions(rng, G.order(), dim);
  double eps = 0;
  if (s.target_defect) {
    const double target = sample_defect_target(s, rng);
    eps = tune_scale([&](double t) { return defect(perturb_with(pi, h, t)); }, target, target / 2);
  } else if (s.magnitude) {
    eps = s.magnitude->sample(rng);
  }
  const ApproxRep rho = perturb_with(pi, h, eps);
  const double r = defect(rho);
  rep.measured["magnitude"] = eps;
  rep.measured["r"] = r;
  rep.measured["bound_17r2"] = 17 * r * r;
  rep.measured["bound_2r"] = 2 * r;

  if (r <= 0.2) {
    const ApproxRep sigma = one_step(rho);
    const double d1 = defect(sigma), disp = distance(sigma, rho);
    rep.measured["one_step_defect"] = d1;
    rep.measured["one_step_displacement"] = disp;
    rep.check("one_step_defect<=17r^2", d1, 17 * r * r + kBoundSlack);
    rep.check("one_step_displacement<=2r", disp, 2 * r + kBoundSlack);
  }
  if (!(r < 1.0 / 17.0)) {
    rep.measured["note"] = "r >= 1/17: full correction not attempted";
    return;
  }
  const CorrectionResult c = correct_to_rep(rho, {s.tolerance, s.max_iterations, {}});
  const double bound = 2 * r / (1 - 17 * r);
  rep.measured["iterations"] = c.iterations;
  rep.measured["final_defect"] = c.final_defect;
  rep.measured["distance"] = c.distance;
  rep.measured["bound_2r/(1-17r)"] = bound;
  copy_trace(rep, c.trace);
  rep.check("final_defect<=tolerance", c.final_defect, s.tolerance);
  rep.check("iterations<=20", c.iterations, 20);
  rep.check("distance<=2r/(1-17r)", c.distance, bound + kDistanceSlack);

  // The corrected representation is conjugate to the exact one it came from.
  const CMatrix u = intertwiner(pi, c.rep);
  double conj = 0;
  for (int g = 0; g < G.order(); ++g) conj = std::max(conj, operator_norm(u * pi(g) * u.adjoint() - c.rep(g)));
  rep.measured["intertwiner_residual"] = conj;
  rep.check("intertwiner_residual", conj, tol::kComposed);

  // Two-block version: the second block is exact and survives the quotient.
  const int k = std::max(1, dim / 2);
  const ApproxRep pi2 = exact_rep(G, k, rng);
  ApproxRep rho_q{G, {}}, pi_q{G, {}};
  for (int g = 0; g < G.order(); ++g) {
    rho_q.values.push_back(direct_sum({rho(g), pi2(g)}));
    pi_q.values.push_back(direct_sum({pi(g), pi2(g)}));
  }
  const QuotientMap kappa = [dim, k](const CMatrix& a) { return CMatrix(a.block(dim, dim, k, k)); };
  const CorrectionResult cq = correct_to_rep(rho_q, {s.tolerance, s.max_iterations, kappa});
  rep.measured["quotient_final_defect"] = cq.final_defect;
  rep.measured["quotient_drift"] = cq.quotient_drift;
  rep.check("quotient_final_defect<=tolerance", cq.final_defect, s.tolerance);
  rep.check("quotient_drift", cq.quotient_drift, tol::kStep);
  rep.check("quotient_distance<=2r/(1-17r)", cq.distance, bound + kDistanceSlack);
  const CMatrix uq = intertwiner(pi_q, cq.rep, kappa);
  double conj_q = 0;
  for (int g = 0; g < G.order(); ++g) conj_q = std::max(conj_q, operator_norm(uq * pi_q(g) * uq.adjoint() - cq.rep(g)));
  const double ku = operator_norm(kappa(uq) - identity(k));
  rep.measured["quotient_intertwiner_residual"] = conj_q;
  rep.measured["kappa_u_minus_1"] = ku;
  rep.check("quotient_intertwiner_residual", conj_q, tol::kComposed);
  rep.check("kappa(u)=1", ku, tol::kComposed);
}

/// max_g distance of pi(g) from the scalars; zero iff Ad(pi) is trivial.
inline double inner_action_size(const ApproxRep& pi) {
  double worst = 0;
  for (const auto& v : pi.values) {
    const Complex c = v.trace() / static_cast<double>(v.rows());
    worst = std::max(worst, operator_norm(v - c * identity(v.rows())));
  }
  return worst;
}

inline void run_cocycle(const Scenario& s, const FiniteGroup& G, int dim, CounterRng& rng, TrialReport& rep) {
  // A trivial action makes every cocycle and every mismatch vanish.
  ApproxRep pi = exact_rep(G, dim, rng);
  for (int tries = 0; tries < 64 && inner_action_size(pi) < 0.5; ++tries) pi = exact_rep(G, dim, rng);
  if (inner_action_size(pi) < 0.5) throw InvalidArgument("cocycle scenario: no nontrivial action in this dimension");
  const GAlgebra a = GAlgebra::inner(G, pi.values);
  const CMatrix u = random_unitary(rng, dim);
  const Cocycle w = coboundary(a, u);
  const CMatrix hdir = random_skew(rng, dim, 1.0);
  auto seed_at = [&](double t) { return CMatrix(u * exp_skew(t * hdir)); };
  double eps = 0;
  if (s.target_defect) {
    const double target = sample_defect_target(s, rng);
    eps = tune_scale([&](double t) { return coboundary_mismatch(w, seed_at(t)); }, target, target / 2);
  } else if (s.magnitude) {
    eps = s.magnitude->sample(rng);
  }
  const CMatrix v0 = seed_at(eps);
  const double r = coboundary_mismatch(w, v0);
  rep.measured["magnitude"] = eps;
  rep.measured["r"] = r;
  rep.measured["cocycle_defect"] = cocycle_defect(w);
  rep.measured["bound_10r2"] = 10 * r * r;
  if (r <= 0.2) {
    const CMatrix z = one_step_cobound(w, v0);
    const double m1 = coboundary_mismatch(w, z), disp = operator_norm(z - v0);
    rep.measured["one_step_mismatch"] = m1;
    rep.measured["one_step_displacement"] = disp;
    rep.check("one_step_mismatch<=10r^2", m1, 10 * r * r + kBoundSlack);
    rep.check("one_step_displacement<=2r", disp, 2 * r + kBoundSlack);
  }
  if (!(r < 0.1)) {
    rep.measured["note"] = "r >= 1/10: trivialization not attempted";
    return;
  }
  TrivializeOptions opts;
  opts.tolerance = s.tolerance;
  opts.max_iterations = s.max_iterations;
  const TrivializeResult t = trivialize(w, v0, opts);
  const double bound = 2 * r / (1 - 10 * r);
  rep.measured["iterations"] = t.iterations;
  rep.measured["final_mismatch"] = t.final_mismatch;
  rep.measured["distance"] = t.distance;
  rep.measured["bound_2r/(1-10r)"] = bound;
  copy_trace(rep, t.trace);
  rep.check("final_mismatch<=tolerance", t.final_mismatch, s.tolerance);
  rep.check("distance<=2r/(1-10r)", t.distance, bound + kDistanceSlack);

  // Two blocks; the perturbation lives on the first (ideal) block only.
  const int k = std::max(1, dim / 2);
  const ApproxRep pi2 = exact_rep(G, k, rng);
  const GAlgebra a2 = GAlgebra::blockwise_inner(G, {pi.values, pi2.values});
  const CMatrix u2 = random_unitary(rng, k);
  const Cocycle w2 = coboundary(a2, direct_sum({u, u2}));
  const CMatrix v02 = direct_sum({v0, u2});
  const CocycleQuotient q{[dim, k](const CMatrix& x) { return CMatrix(x.block(dim, dim, k, k)); },
                          GAlgebra::inner(G, pi2.values)};
  TrivializeOptions qopts = opts;
  qopts.quotient = q;
  const TrivializeResult tq = trivialize(w2, v02, qopts);
  rep.measured["quotient_final_mismatch"] = tq.final_mismatch;
  rep.measured["quotient_drift"] = tq.quotient_drift;
  rep.check("quotient_final_mismatch<=tolerance", tq.final_mismatch, s.tolerance);
  rep.check("quotient_drift", tq.quotient_drift, tol::kStep);
  rep.check("quotient_distance<=2r/(1-10r)", tq.distance,
            2 * tq.initial_mismatch / (1 - 10 * tq.initial_mismatch) + kDistanceSlack);
}

inline void run_estimate(const Scenario& s, const FiniteGroup& G, int dim, int trial, CounterRng& rng,
                         TrialReport& rep) {
  const double r = s.radii[static_cast<std::size_t>(trial) % s.radii.size()];
  const double theta_max = 2 * std::asin(r / 2);  // ||exp(i theta H) - 1|| = 2 sin(theta/2)
  std::vector<CMatrix> u;
  for (int g = 0; g < G.order(); ++g) {
    const double frac = g == 0 ? 1.0 : rng.uniform(0.2, 1.0);
    const CMatrix h = random_hermitian(rng, dim, 1.0);
    u.push_back(exp_skew(Complex(0.0, theta_max * frac) * h));
  }
  const IntegralEstimate e = verify_integral_estimate(G, u, r);
  rep.measured["r"] = r;
  rep.measured["lhs"] = e.lhs;
  rep.measured["bound"] = e.bound;
  rep.measured["avg_norm"] = e.avg_norm;
  rep.trace.push_back({0, e.lhs, 0.0});
  rep.check("lhs<=5r^2/(2(1-2r))", e.lhs, e.bound + kBoundSlack);
  rep.check("avg_norm<=1", e.avg_norm, 1.0 + 1e-12);
}

inline void run_lift(const Scenario& s, const FiniteGroup& G0, int dim, CounterRng& rng, TrialReport& rep) {
  const int levels = s.tower.levels.sample(rng);
  const double ratio = s.tower.ratio.sample(rng);
  FiniteGroup G = G0;
  SourceAction alpha;
  ApproxRep pi;
  std::vector<CMatrix> gamma;  // target action unitaries, the same on every block
  if (s.tower.action == "translation") {
    if (!G0.cyclic_generator()) throw InvalidArgument("translation towers need a cyclic group");
    const int d = G0.order();
    G = FiniteGroup::cyclic(d);
    alpha = SourceAction::translation(d);
    CMatrix z = CMatrix::Zero(d, d), shift = CMatrix::Zero(d, d);
    for (int j = 0; j < d; ++j) {
      z(j, j) = std::polar(1.0, 2 * kPi * j / d);
      shift((j + 1) % d, j) = 1.0;
    }
    pi.group = G;
    for (int h = 0; h < d; ++h) {
      pi.values.push_back(matrix_power(z, h));
      gamma.push_back(matrix_power(shift, h));
    }
    dim = d;
  } else {
    alpha = SourceAction::conjugation(G);
    pi = exact_rep(G, dim, rng);
    gamma = pi.values;
  }
  // Blocks 0..levels-1 are the ideal blocks B_1..B_N, the last is the top.
  std::vector<std::vector<CMatrix>> block_action(static_cast<std::size_t>(levels + 1), gamma);
  const GAlgebra c = GAlgebra::blockwise_inner(G, block_action);
  std::vector<std::vector<int>> ideals;
  for (int n = 0; n <= levels; ++n) {
    std::vector<int> j(static_cast<std::size_t>(n));
    std::iota(j.begin(), j.end(), 0);
    ideals.push_back(std::move(j));
  }
  const Tower tower(c, ideals);
  std::vector<CMatrix> v;
  double eps_k = 1.0;
  for (int k = 0; k < levels; ++k) {
    eps_k *= ratio;
    v.push_back(exp_skew(random_skew(rng, dim, eps_k)));
  }
  ApproxRep seed{G, {}};
  for (int h = 0; h < G.order(); ++h) {
    std::vector<CMatrix> parts;
    for (int k = 0; k < levels; ++k) parts.push_back(v[k] * pi(h) * v[k].adjoint());
    parts.push_back(pi(h));
    seed.values.push_back(direct_sum(parts));
  }
  const LiftResult lift = lift_group_rep(tower, alpha, pi, seed);
  const double ldef = defect(lift.lift);
  rep.measured["levels"] = levels;
  rep.measured["ratio"] = ratio;
  rep.measured["action"] = s.tower.action;
  rep.measured["accepted_level"] = lift.level;
  rep.measured["lift_defect"] = ldef;
  rep.measured["equivariance_defect"] = lift.equivariance_defect;
  rep.measured["projection_error"] = lift.projection_error;
  rep.measured["correction_iterations"] = lift.correction.iterations;
  json table = json::array();
  for (const auto& row : lift.levels) {
    table.push_back({{"level", row.level},
                     {"equivariance_defect", row.equivariance_defect},
                     {"symmetrization_shift", row.symmetrization_shift},
                     {"unitarized_defect", row.unitarized_defect},
                     {"accepted", row.accepted}});
  }
  rep.measured["level_table"] = table;
  copy_trace(rep, lift.correction.trace);
  rep.check("lift_defect", ldef, tol::kComposed);
  rep.check("lift_equivariance_defect", lift.equivariance_defect, tol::kComposed);
  rep.check("projection_error", lift.projection_error, tol::kComposed);
}

/// Exact Rokhlin data on C^d (x) C^m (+ C^extra): alpha = Ad(W (S^j (x) 1 + 1)),
/// e_{t^j} = W (e_jj (x) 1 + 0) W*.
struct RokhlinModel {
  FiniteGroup group;
  MatrixAction action;
  std::vector<CMatrix> exact;
  CMatrix w;
  int n = 0;
};

inline RokhlinModel rokhlin_model(int d, int m, int extra, CounterRng& rng) {
  const FiniteGroup G = FiniteGroup::cyclic(d);
  const int gen = *G.cyclic_generator();
  const int n = d * m + extra;
  const CMatrix w = random_unitary(rng, n);
  CMatrix shift = CMatrix::Zero(n, n);
  for (int i = 0; i < d; ++i) shift.block(((i + 1) % d) * m, i * m, m, m) = identity(m);
  if (extra > 0) shift.block(d * m, d * m, extra, extra) = identity(extra);
  std::vector<CMatrix> unitaries(static_cast<std::size_t>(d));
  std::vector<CMatrix> exact(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    const int g = G.power(gen, j);
    unitaries[g] = w * matrix_power(shift, j) * w.adjoint();
    CMatrix e = CMatrix::Zero(n, n);
    e.block(j * m, j * m, m, m) = identity(m);
    exact[g] = w * e * w.adjoint();
  }
  const GAlgebra a = GAlgebra::inner(G, unitaries);
  return {G, a.as_action(), exact, w, n};
}

/// e0_g = V e_g V* + (t/2) N_g with V = exp(t K): conjugation breaks
/// equivariance, N_g breaks the projection relations.
inline std::vector<CMatrix> partition_seeds(const RokhlinModel& model, double t, const CMatrix& k,
                                            const std::vector<CMatrix>& noise) {
  const CMatrix v = exp_skew(t * k);
  std::vector<CMatrix> out;
  for (std::size_t g = 0; g < model.exact.size(); ++g) out.push_back(v * model.exact[g] * v.adjoint() + (t / 2) * noise[g]);
  return out;
}

inline void report_partition(TrialReport& rep, const PartitionReport& pr) {
  rep.measured["seed_delta"] = pr.seed_delta;
  rep.measured["threshold"] = pr.threshold;
  rep.measured["certified"] = pr.certified;
  rep.measured["symmetrization_shift"] = pr.symmetrization_shift;
  rep.measured["encoded_unitarity"] = pr.encoded_unitarity;
  rep.measured["min_midpoint_gap"] = pr.min_midpoint_gap;
  rep.measured["displacement"] = pr.displacement;
}

inline void run_rokhlin(const Scenario& s, const FiniteGroup& G0, int dim, CounterRng& rng, TrialReport& rep,
                        bool tracial) {
  if (!G0.cyclic_generator()) throw InvalidArgument("partition scenarios need a cyclic group");
  const int d = G0.order();
  int m = 0, extra = 0;
  if (tracial) {
    extra = std::max(1, dim - d * std::max(1, (dim - 1) / d));
    m = std::max(1, (dim - extra) / d);
  } else {
    m = std::max(1, dim / d);
  }
  const RokhlinModel model = rokhlin_model(d, m, extra, rng);
  rep.dimension = model.n;
  const CMatrix k = random_skew(rng, model.n, 1.0);
  std::vector<CMatrix> noise;
  for (int g = 0; g < d; ++g) noise.push_back(random_hermitian(rng, model.n, 1.0));
  // For the tracial variant the seeds sum to the tower support, not to 1.
  CMatrix support = CMatrix::Zero(model.n, model.n);
  for (const auto& e : model.exact) support += e;
  auto delta_at = [&](double t) {
    const auto seeds = partition_seeds(model, t, k, noise);
    PartitionDefects pd = partition_defects(model.group, model.action, seeds);
    if (tracial) {
      CMatrix total = CMatrix::Zero(model.n, model.n);
      for (const auto& e : seeds) total += e;
      pd.sum = operator_norm(total - support);
    }
    return seed_delta(pd);
  };
  double t = 0;
  const double threshold = partition_threshold(d);
  if (s.threshold_fraction) {
    const double target = s.threshold_fraction->sample(rng) * threshold;
    t = tune_scale(delta_at, target, target);
  } else if (s.target_defect) {
    const double target = s.target_defect->sample(rng);
    t = tune_scale(delta_at, target, target);
  } else if (s.magnitude) {
    const double target = s.magnitude->sample(rng);
    t = tune_scale(delta_at, target, target);
  }
  const auto seeds = partition_seeds(model, t, k, noise);
  PartitionOptions opts;
  opts.allow_uncertified = s.allow_uncertified;
  rep.measured["d"] = d;
  rep.measured["n"] = model.n;
  double max_defect = 0;
  if (!tracial) {
    const PartitionResult res = stabilize_partition(model.group, model.action, seeds, opts);
    report_partition(rep, res.report);
    const auto& r = res.report.result;
    rep.measured["projection_defect"] = r.projection;
    rep.measured["orthogonality_defect"] = r.orthogonality;
    rep.measured["sum_defect"] = r.sum;
    rep.measured["equivariance_defect"] = r.equivariance;
    rep.check("projection_defect", r.projection, tol::kStep);
    rep.check("orthogonality_defect", r.orthogonality, tol::kStep);
    rep.check("sum_defect", r.sum, tol::kStep);
    rep.check("equivariance_defect", r.equivariance, tol::kStep);
    max_defect = r.max();
    rep.trace.push_back({0, res.report.seed_delta, 0.0});
    rep.trace.push_back({1, max_defect, res.report.displacement});
    return;
  }
  // Witness: a unit vector inside the first tower level.
  CVector xi = CVector::Zero(model.n);
  for (int i = 0; i < m; ++i) xi(i) = Complex(rng.normal(), rng.normal());
  xi = model.w * (xi / xi.norm());
  const CMatrix x = xi * xi.adjoint();
  const TracialResult res = stabilize_tracial_partition(model.group, model.action, seeds, x, opts);
  report_partition(rep, res.report);
  const auto& r = res.corner_defects;
  rep.measured["projection_defect"] = r.projection;
  rep.measured["orthogonality_defect"] = r.orthogonality;
  rep.measured["corner_sum_defect"] = r.sum;
  rep.measured["equivariance_defect"] = r.equivariance;
  rep.measured["corner_rank"] = res.corner_rank;
  rep.measured["complement_rank"] = res.complement_rank;
  rep.measured["witness_norm"] = res.witness_norm;
  rep.measured["support_invariance"] = res.support_invariance;
  rep.measured["displacement"] = res.displacement;
  rep.check("projection_defect", r.projection, tol::kStep);
  rep.check("orthogonality_defect", r.orthogonality, tol::kStep);
  rep.check("equivariance_defect", r.equivariance, tol::kStep);
  rep.check("corner_sum_defect", r.sum, tol::kStep);
  rep.check("complement_rank_matches", std::abs(res.complement_rank - extra), 0.0);
  max_defect = std::max({r.projection, r.orthogonality, r.equivariance, r.sum});
  rep.trace.push_back({0, res.report.seed_delta, 0.0});
  rep.trace.push_back({1, max_defect, res.displacement});
}

inline void run_graded(const Scenario& s, const FiniteGroup& G, int mult, CounterRng& rng, TrialReport& rep) {
  if (!G.is_abelian()) throw InvalidArgument("graded scenarios need an abelian group");
  const RegularModel model = regular_model(G, mult);
  const int n = model.algebra.dim();
  rep.dimension = n;
  const CMatrix w = random_unitary(rng, n);
  const GradedAlgebra a = model.algebra.conjugated(w);
  ApproxRep units{G, {}};
  for (const auto& u : model.units.values) units.values.push_back(w * u * w.adjoint());
  const double eps = s.magnitude ? s.magnitude->sample(rng) : 0.0;
  const ApproxRep psi1 = perturb(units, eps, rng);
  GradedOptions opts;
  opts.tolerance = s.tolerance;
  opts.max_iterations = s.max_iterations;
  if (s.epsilon) opts.epsilon = *s.epsilon;
  const GradedResult res = graded_correct(a, psi1.values, opts);
  rep.measured["magnitude"] = eps;
  rep.measured["input_leak"] = res.input_leak;
  rep.measured["r"] = res.correction.initial_defect;
  rep.measured["final_defect"] = res.correction.final_defect;
  rep.measured["iterations"] = res.correction.iterations;
  rep.measured["max_iterate_leak"] = res.max_iterate_leak;
  rep.measured["distance"] = res.distance;
  rep.measured["bound_2r/(1-17r)"] = res.distance_bound;
  rep.measured["theorem_bound"] = res.theorem_distance_bound;
  copy_trace(rep, res.correction.trace);
  rep.check("final_defect<=tolerance", res.correction.final_defect, s.tolerance);
  rep.check("max_iterate_leak", res.max_iterate_leak, tol::kStep);
  rep.check("distance<=2r/(1-17r)", res.distance, res.distance_bound + kBoundSlack);
  rep.check("distance<=2(6eps0)/(1-17(6eps0))", res.distance, res.theorem_distance_bound + kBoundSlack);
}

}  // namespace detail

/// Runs one trial; exceptions become a failing report with the message.
inline TrialReport run_trial(const Scenario& s, int trial) {
  const auto start = std::chrono::steady_clock::now();
  TrialReport rep;
  rep.trial = trial;
  CounterRng rng = CounterRng(s.seed).fork(static_cast<std::uint64_t>(trial));
  const GroupSpec& spec = s.groups[static_cast<std::size_t>(trial) % s.groups.size()];
  rep.group = group_spec_name(spec);
  try {
    const FiniteGroup G = make_group(spec);
    const int dim = s.dimension.sample(rng);
    rep.dimension = dim;
    switch (s.kind) {
      case ScenarioKind::rep: detail::run_rep(s, G, dim, rng, rep); break;
      case ScenarioKind::cocycle: detail::run_cocycle(s, G, dim, rng, rep); break;
      case ScenarioKind::integral_estimate: detail::run_estimate(s, G, dim, trial, rng, rep); break;
      case ScenarioKind::lift: detail::run_lift(s, G, dim, rng, rep); break;
      case ScenarioKind::rokhlin: detail::run_rokhlin(s, G, dim, rng, rep, false); break;
      case ScenarioKind::tracial: detail::run_rokhlin(s, G, dim, rng, rep, true); break;
      case ScenarioKind::graded: detail::run_graded(s, G, dim, rng, rep); break;
    }
  } catch (const std::exception& e) {
    rep.error = e.what();
  }
  rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

inline ScenarioResult run_scenario(const Scenario& s) {
  const auto start = std::chrono::steady_clock::now();
  ScenarioResult out{s, {}, 0};
  for (int t = 0; t < s.trials; ++t) out.trials.push_back(run_trial(s, t));
  out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

/// Scenarios run by the `suite` subcommand, keyed by output subdirectory.
inline std::vector<std::pair<std::string, Scenario>> suite_scenarios(std::uint64_t seed) {
  std::vector<std::pair<std::string, Scenario>> out;
  auto add = [&](const std::string& name, Scenario s, int trials) {
    s.seed = seed;
    s.trials = trials;
    out.emplace_back(name, std::move(s));
  };
  Scenario rep = default_scenario(ScenarioKind::rep);
  rep.groups = {{GroupKind::cyclic, 2, {}}, {GroupKind::cyclic, 3, {}}, {GroupKind::cyclic, 4, {}},
                {GroupKind::cyclic, 5, {}}, {GroupKind::cyclic, 6, {}}, {GroupKind::symmetric, 3, {}},
                {GroupKind::dihedral, 4, {}}};
  add("rep", rep, 140);
  Scenario coc = default_scenario(ScenarioKind::cocycle);
  coc.groups = rep.groups;
  add("cocycle", coc, 70);
  Scenario est = default_scenario(ScenarioKind::integral_estimate);
  add("estimate", est, 60);
  Scenario lift = default_scenario(ScenarioKind::lift);
  add("lift_conjugation", lift, 20);
  Scenario lift_t = default_scenario(ScenarioKind::lift);
  lift_t.groups = {{GroupKind::cyclic, 2, {}}, {GroupKind::cyclic, 3, {}}, {GroupKind::cyclic, 4, {}}};
  lift_t.tower.action = "translation";
  add("lift_translation", lift_t, 12);
  Scenario rk = default_scenario(ScenarioKind::rokhlin);
  rk.groups = {{GroupKind::cyclic, 2, {}}, {GroupKind::cyclic, 3, {}}, {GroupKind::cyclic, 4, {}}};
  rk.dimension = {4, 12};
  rk.magnitude.reset();
  rk.allow_uncertified = false;
  rk.threshold_fraction = Range{0.1, 0.95};
  add("rokhlin", rk, 40);
  add("rokhlin_example", default_scenario(ScenarioKind::rokhlin), 5);
  add("tracial", default_scenario(ScenarioKind::tracial), 20);
  add("graded", default_scenario(ScenarioKind::graded), 45);
  return out;
}

}  // namespace eqstab
