#include "cal/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "cal/errors.hpp"

namespace cal {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Analyze: return "analyze";
    case ExperimentKind::Simulate: return "simulate";
    case ExperimentKind::CompareGradientFlow: return "compare-gradient-flow";
    case ExperimentKind::ActionOracle: return "action-oracle";
    case ExperimentKind::ResetExperiment: return "reset-experiment";
  }
  return "?";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (auto k : {ExperimentKind::Analyze, ExperimentKind::Simulate,
                 ExperimentKind::CompareGradientFlow, ExperimentKind::ActionOracle,
                 ExperimentKind::ResetExperiment})
    if (name == to_string(k)) return k;
  throw ConfigError("unknown experiment kind '" + name + "'");
}

namespace {

// Field access with "<source>:<line>: <path>: <message>" diagnostics. The line
// is found by walking the key path through the raw text, which is exact for
// the usual one-key-per-line layouts and a close pointer otherwise.
class Reader {
 public:
  Reader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
    throw ConfigError(source_ + ":" + std::to_string(line_of(path)) + ": " + path + ": " + msg);
  }

  void keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) const {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : obj.items()) {
      (void)value;
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
        fail(join(path, key), "unknown key");
    }
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "expected a finite number");
    return x;
  }

  int integer(const json& v, const std::string& path) const {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    const auto x = v.get<std::int64_t>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
      fail(path, "integer out of range");
    return static_cast<int>(x);
  }

  std::uint64_t unsigned_integer(const json& v, const std::string& path) const {
    if (!v.is_number_unsigned()) fail(path, "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  std::string string(const json& v, const std::string& path) const {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  bool boolean(const json& v, const std::string& path) const {
    if (!v.is_boolean()) fail(path, "expected true or false");
    return v.get<bool>();
  }

  std::vector<double> vector(const json& v, const std::string& path) const {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }

  Matrix matrix(const json& v, const std::string& path) const {
    if (!v.is_array()) fail(path, "expected an array of rows");
    Matrix out;
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(vector(v[i], path + "[" + std::to_string(i) + "]"));
    for (const auto& row : out)
      if (row.size() != out.front().size()) fail(path, "rows have different lengths");
    return out;
  }

  template <class T, class F>
  void opt(const json& obj, const std::string& path, const char* key, std::optional<T>& dst,
           F read) const {
    if (obj.contains(key)) dst = read(obj.at(key), join(path, key));
  }

  std::size_t line_of(const std::string& path) const {
    std::size_t pos = 0;
    std::size_t start = 0;
    while (start <= path.size()) {
      std::size_t end = path.find('.', start);
      if (end == std::string::npos) end = path.size();
      std::string key = path.substr(start, end - start);
      key = key.substr(0, key.find('['));
      const std::size_t found = text_.find("\"" + key + "\"", pos);
      if (found == std::string::npos) break;
      pos = found;
      start = end + 1;
    }
    return 1 + static_cast<std::size_t>(std::count(text_.begin(), text_.begin() + static_cast<long>(pos), '\n'));
  }

 private:
  const std::string& text_;
  std::string source_;
};

CALParameters read_cal(const Reader& r, const json& v, const std::string& path) {
  r.keys(v, path, {"theta", "mu", "nu", "gamma", "k"});
  CALParameters p;
  for (auto [key, dst] : {std::pair{"theta", &p.theta}, std::pair{"mu", &p.mu},
                          std::pair{"nu", &p.nu}, std::pair{"gamma", &p.gamma},
                          std::pair{"k", &p.k}}) {
    if (!v.contains(key)) r.fail(Reader::join(path, key), "missing");
    *dst = r.number(v.at(key), Reader::join(path, key));
  }
  return p;
}

RawParameters read_raw(const Reader& r, const json& v, const std::string& path) {
  r.keys(v, path, {"alpha", "beta", "gamma1", "gamma2", "k", "theta", "xi"});
  RawParameters p;
  for (auto [key, dst] : {std::pair{"alpha", &p.alpha}, std::pair{"beta", &p.beta},
                          std::pair{"gamma1", &p.gamma1}, std::pair{"gamma2", &p.gamma2},
                          std::pair{"k", &p.k}, std::pair{"theta", &p.theta}}) {
    if (!v.contains(key)) r.fail(Reader::join(path, key), "missing");
    *dst = r.number(v.at(key), Reader::join(path, key));
  }
  if (v.contains("xi")) {
    p.xi = r.integer(v.at("xi"), path + ".xi");
    if (p.xi != 1 && p.xi != -1) r.fail(path + ".xi", "must be 1 or -1");
  }
  return p;
}

ParametersSpec read_parameters(const Reader& r, const json& v) {
  r.keys(v, "parameters", {"raw", "derived"});
  ParametersSpec s;
  const bool has_raw = v.contains("raw");
  const bool has_derived = v.contains("derived");
  if (has_raw == has_derived)
    r.fail("parameters", "exactly one of 'raw' and 'derived' must be present");
  if (has_raw) s.raw = read_raw(r, v.at("raw"), "parameters.raw");
  if (has_derived) s.derived = read_cal(r, v.at("derived"), "parameters.derived");
  const double theta = has_raw ? s.raw->theta : s.derived->theta;
  if (!(theta > 0.0)) r.fail(has_raw ? "parameters.raw.theta" : "parameters.derived.theta",
                             "theta must be > 0");
  return s;
}

PotentialSpec read_potential(const Reader& r, const json& v) {
  const std::string P = "potential";
  r.keys(v, P, {"kind", "dimension", "weight", "scale", "features", "input_dim", "hidden",
                "nonlinearity"});
  PotentialSpec s;
  if (v.contains("kind")) s.kind = r.string(v.at("kind"), P + ".kind");
  const auto num = [&](const json& x, const std::string& p) { return r.number(x, p); };
  const auto integer = [&](const json& x, const std::string& p) { return r.integer(x, p); };
  r.opt(v, P, "dimension", s.dimension, integer);
  r.opt(v, P, "weight", s.weight, [&](const json& x, const std::string& p) { return r.matrix(x, p); });
  r.opt(v, P, "scale", s.scale, num);
  r.opt(v, P, "features", s.features, integer);
  r.opt(v, P, "input_dim", s.input_dim, integer);
  r.opt(v, P, "hidden", s.hidden, integer);
  r.opt(v, P, "nonlinearity", s.nonlinearity,
        [&](const json& x, const std::string& p) { return r.string(x, p); });
  if (s.kind == "zero" || s.kind == "linear_regression") {
  } else if (s.kind == "quadratic_tracking") {
    if (s.weight.has_value() == s.dimension.has_value())
      r.fail(P, "quadratic_tracking needs exactly one of 'weight' and 'dimension'");
    if (s.weight && s.scale) r.fail(P + ".scale", "not allowed together with 'weight'");
  } else if (s.kind == "feature_demo") {
    if (s.nonlinearity && *s.nonlinearity != "tanh" && *s.nonlinearity != "logistic")
      r.fail(P + ".nonlinearity", "expected 'tanh' or 'logistic'");
  } else {
    r.fail(P + ".kind", "unknown potential kind '" + s.kind + "'");
  }
  return s;
}

InputSpec read_input(const Reader& r, const json& v) {
  const std::string P = "input";
  r.keys(v, P, {"kind", "dimension", "amplitude", "frequency", "phase", "breakpoints", "values",
                "seed", "bandwidth", "components", "path"});
  InputSpec s;
  if (v.contains("kind")) s.kind = r.string(v.at("kind"), P + ".kind");
  const auto vec = [&](const json& x, const std::string& p) { return r.vector(x, p); };
  const auto integer = [&](const json& x, const std::string& p) { return r.integer(x, p); };
  r.opt(v, P, "dimension", s.dimension, integer);
  r.opt(v, P, "amplitude", s.amplitude, vec);
  r.opt(v, P, "frequency", s.frequency, vec);
  r.opt(v, P, "phase", s.phase, vec);
  r.opt(v, P, "breakpoints", s.breakpoints, vec);
  r.opt(v, P, "values", s.values, [&](const json& x, const std::string& p) { return r.matrix(x, p); });
  r.opt(v, P, "seed", s.seed,
        [&](const json& x, const std::string& p) { return r.unsigned_integer(x, p); });
  r.opt(v, P, "bandwidth", s.bandwidth, [&](const json& x, const std::string& p) { return r.number(x, p); });
  r.opt(v, P, "components", s.components, integer);
  r.opt(v, P, "path", s.path, [&](const json& x, const std::string& p) { return r.string(x, p); });
  if (s.kind == "zero" || s.kind == "smooth_noise") {
  } else if (s.kind == "sinusoid") {
    if (!s.amplitude || !s.frequency) r.fail(P, "sinusoid needs 'amplitude' and 'frequency'");
  } else if (s.kind == "piecewise_constant") {
    if (!s.breakpoints || !s.values) r.fail(P, "piecewise_constant needs 'breakpoints' and 'values'");
  } else if (s.kind == "file") {
    if (!s.path) r.fail(P, "file input needs 'path'");
  } else {
    r.fail(P + ".kind", "unknown input kind '" + s.kind + "'");
  }
  return s;
}

BPhaseSpec read_b_phase(const Reader& r, const json& v) {
  const std::string P = "schedule.b_phase";
  r.keys(v, P, {"kind", "rho", "gamma_bar", "epsilon", "linear_bound", "parameters"});
  BPhaseSpec s;
  if (v.contains("kind")) s.kind = r.string(v.at("kind"), P + ".kind");
  const auto num = [&](const json& x, const std::string& p) { return r.number(x, p); };
  r.opt(v, P, "rho", s.rho, num);
  r.opt(v, P, "gamma_bar", s.gamma_bar, num);
  r.opt(v, P, "epsilon", s.epsilon, num);
  r.opt(v, P, "linear_bound", s.linear_bound,
        [&](const json& x, const std::string& p) { return r.boolean(x, p); });
  r.opt(v, P, "parameters", s.parameters,
        [&](const json& x, const std::string& p) { return read_cal(r, x, p); });
  if (s.kind == "fixed_rho") {
    if (s.rho && !(*s.rho > 0.0)) r.fail(P + ".rho", "rho must be > 0");
  } else if (s.kind == "adaptive") {
    if (s.epsilon && !(*s.epsilon > 0.0)) r.fail(P + ".epsilon", "epsilon must be > 0");
  } else if (s.kind == "explicit") {
    if (!s.parameters) r.fail(P, "explicit b_phase needs 'parameters'");
    if (s.parameters->mu == 0.0) r.fail(P + ".parameters.mu", "mu must be nonzero");
    if (!(s.parameters->theta > 0.0)) r.fail(P + ".parameters.theta", "theta must be > 0");
  } else {
    r.fail(P + ".kind", "expected 'fixed_rho', 'adaptive' or 'explicit'");
  }
  return s;
}

ScheduleSpec read_schedule(const Reader& r, const json& v) {
  const std::string P = "schedule";
  r.keys(v, P, {"breakpoints", "period_A", "period_B", "count", "b_phase", "reset_mode", "tail"});
  ScheduleSpec s;
  const auto num = [&](const json& x, const std::string& p) { return r.number(x, p); };
  r.opt(v, P, "breakpoints", s.breakpoints,
        [&](const json& x, const std::string& p) { return r.vector(x, p); });
  r.opt(v, P, "period_A", s.period_a, num);
  r.opt(v, P, "period_B", s.period_b, num);
  r.opt(v, P, "count", s.count, [&](const json& x, const std::string& p) { return r.integer(x, p); });
  const bool generator = s.period_a || s.period_b || s.count;
  if (s.breakpoints && generator)
    r.fail(P, "give either 'breakpoints' or the period_A/period_B/count generator, not both");
  if (generator && !(s.period_a && s.period_b && s.count))
    r.fail(P, "the generator needs period_A, period_B and count");
  if (v.contains("b_phase")) s.b_phase = read_b_phase(r, v.at("b_phase"));
  if (v.contains("reset_mode")) s.reset_mode = r.string(v.at("reset_mode"), P + ".reset_mode");
  if (s.reset_mode != "simulate_b" && s.reset_mode != "hard_reset")
    r.fail(P + ".reset_mode", "expected 'simulate_b' or 'hard_reset'");
  r.opt(v, P, "tail", s.tail, [&](const json& x, const std::string& p) { return r.string(x, p); });
  if (s.tail && *s.tail != "A" && *s.tail != "B") r.fail(P + ".tail", "expected 'A' or 'B'");
  return s;
}

RunSpec read_run(const Reader& r, const json& v) {
  const std::string P = "run";
  r.keys(v, P, {"kind", "T", "h", "cauchy", "seed", "output_dir", "thetas", "xi", "eta", "trials",
                "rhos", "b_duration"});
  RunSpec s;
  if (!v.contains("kind")) r.fail(P + ".kind", "missing");
  try {
    s.kind = parse_experiment_kind(r.string(v.at("kind"), P + ".kind"));
  } catch (const ConfigError& e) {
    r.fail(P + ".kind", e.what());
  }
  if (!v.contains("T")) r.fail(P + ".T", "missing");
  s.T = r.number(v.at("T"), P + ".T");
  if (!(s.T > 0.0)) r.fail(P + ".T", "T must be > 0");
  if (v.contains("h")) s.h = r.number(v.at("h"), P + ".h");
  if (!(s.h > 0.0)) r.fail(P + ".h", "h must be > 0");
  if (v.contains("seed")) s.seed = r.unsigned_integer(v.at("seed"), P + ".seed");
  if (v.contains("output_dir")) s.output_dir = r.string(v.at("output_dir"), P + ".output_dir");

  if (v.contains("cauchy")) {
    const json& c = v.at("cauchy");
    const std::string C = P + ".cauchy";
    r.keys(c, C, {"q0", "q1", "q2", "q3", "q0_random_scale", "dimension"});
    const auto vec = [&](const json& x, const std::string& p) { return r.vector(x, p); };
    r.opt(c, C, "q0", s.cauchy.q0, vec);
    r.opt(c, C, "q1", s.cauchy.q1, vec);
    r.opt(c, C, "q2", s.cauchy.q2, vec);
    r.opt(c, C, "q3", s.cauchy.q3, vec);
    r.opt(c, C, "q0_random_scale", s.cauchy.q0_random_scale,
          [&](const json& x, const std::string& p) { return r.number(x, p); });
    r.opt(c, C, "dimension", s.cauchy.dimension,
          [&](const json& x, const std::string& p) { return r.integer(x, p); });
    if (s.cauchy.q0 && s.cauchy.q0_random_scale)
      r.fail(C, "give either 'q0' or 'q0_random_scale', not both");
    const std::size_t n = s.cauchy.q0 ? s.cauchy.q0->size() : 0;
    for (auto [key, field] : {std::pair{"q1", &s.cauchy.q1}, std::pair{"q2", &s.cauchy.q2},
                              std::pair{"q3", &s.cauchy.q3}})
      if (*field && s.cauchy.q0 && (*field)->size() != n)
        r.fail(C + "." + key, "length differs from q0");
  }
  const auto num = [&](const json& x, const std::string& p) { return r.number(x, p); };
  r.opt(v, P, "thetas", s.thetas, [&](const json& x, const std::string& p) { return r.vector(x, p); });
  r.opt(v, P, "xi", s.xi, [&](const json& x, const std::string& p) { return r.integer(x, p); });
  r.opt(v, P, "eta", s.eta, num);
  r.opt(v, P, "trials", s.trials, [&](const json& x, const std::string& p) { return r.integer(x, p); });
  r.opt(v, P, "rhos", s.rhos, [&](const json& x, const std::string& p) { return r.vector(x, p); });
  r.opt(v, P, "b_duration", s.b_duration, num);
  if (s.xi && *s.xi != 1 && *s.xi != -1) r.fail(P + ".xi", "must be 1 or -1");
  if (s.thetas) {
    if (s.thetas->empty()) r.fail(P + ".thetas", "must not be empty");
    for (double t : *s.thetas)
      if (!(t > 0.0)) r.fail(P + ".thetas", "every theta must be > 0");
  }
  if (s.kind == ExperimentKind::CompareGradientFlow && !s.thetas)
    r.fail(P + ".thetas", "compare-gradient-flow needs a theta list");
  if (s.eta && !(*s.eta > 0.0)) r.fail(P + ".eta", "eta must be > 0");
  if (s.trials && *s.trials < 0) r.fail(P + ".trials", "must be >= 0");
  if (s.b_duration && !(*s.b_duration > 0.0)) r.fail(P + ".b_duration", "must be > 0");
  return s;
}

ojson cal_json(const CALParameters& p) {
  return {{"theta", p.theta}, {"mu", p.mu}, {"nu", p.nu}, {"gamma", p.gamma}, {"k", p.k}};
}

template <class T>
void put(ojson& obj, const char* key, const std::optional<T>& v) {
  if (v) obj[key] = *v;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir,
                              const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(byte > 0 ? byte - 1 : 0), '\n');
    throw ConfigError(source + ":" + std::to_string(line) + ": syntax error: " + e.what());
  }
  const Reader r(text, source);
  r.keys(doc, "", {"parameters", "potential", "input", "schedule", "run"});
  for (const char* section : {"parameters", "run"})
    if (!doc.contains(section)) r.fail(section, "missing section");

  ExperimentConfig c;
  c.base_dir = base_dir;
  c.parameters = read_parameters(r, doc.at("parameters"));
  if (doc.contains("potential")) c.potential = read_potential(r, doc.at("potential"));
  if (doc.contains("input")) c.input = read_input(r, doc.at("input"));
  if (doc.contains("schedule")) c.schedule = read_schedule(r, doc.at("schedule"));
  c.run = read_run(r, doc.at("run"));

  if (c.schedule) {
    try {
      const Schedule s = build_schedule(c.schedule, c.run.T);
      if (c.schedule->tail && *c.schedule->tail != to_string(s.tail_phase()))
        r.fail("schedule.tail", std::string("breakpoints give a tail in phase ") +
                                    to_string(s.tail_phase()));
    } catch (const InvalidArgument& e) {
      r.fail("schedule", e.what());
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError(path.string() + ": cannot open");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path.parent_path().empty() ? "." : path.parent_path(),
                      path.string());
}

ojson to_json(const ExperimentConfig& c) {
  ojson out;
  ojson params;
  if (c.parameters.raw) {
    const auto& p = *c.parameters.raw;
    params["raw"] = {{"alpha", p.alpha}, {"beta", p.beta}, {"gamma1", p.gamma1},
                     {"gamma2", p.gamma2}, {"k", p.k},       {"theta", p.theta},
                     {"xi", p.xi}};
  }
  if (c.parameters.derived) params["derived"] = cal_json(*c.parameters.derived);
  out["parameters"] = params;

  ojson pot;
  pot["kind"] = c.potential.kind;
  put(pot, "dimension", c.potential.dimension);
  put(pot, "weight", c.potential.weight);
  put(pot, "scale", c.potential.scale);
  put(pot, "features", c.potential.features);
  put(pot, "input_dim", c.potential.input_dim);
  put(pot, "hidden", c.potential.hidden);
  put(pot, "nonlinearity", c.potential.nonlinearity);
  out["potential"] = pot;

  ojson in;
  in["kind"] = c.input.kind;
  put(in, "dimension", c.input.dimension);
  put(in, "amplitude", c.input.amplitude);
  put(in, "frequency", c.input.frequency);
  put(in, "phase", c.input.phase);
  put(in, "breakpoints", c.input.breakpoints);
  put(in, "values", c.input.values);
  put(in, "seed", c.input.seed);
  put(in, "bandwidth", c.input.bandwidth);
  put(in, "components", c.input.components);
  put(in, "path", c.input.path);
  out["input"] = in;

  if (c.schedule) {
    const auto& s = *c.schedule;
    ojson sch;
    put(sch, "breakpoints", s.breakpoints);
    put(sch, "period_A", s.period_a);
    put(sch, "period_B", s.period_b);
    put(sch, "count", s.count);
    ojson b;
    b["kind"] = s.b_phase.kind;
    put(b, "rho", s.b_phase.rho);
    put(b, "gamma_bar", s.b_phase.gamma_bar);
    put(b, "epsilon", s.b_phase.epsilon);
    put(b, "linear_bound", s.b_phase.linear_bound);
    if (s.b_phase.parameters) b["parameters"] = cal_json(*s.b_phase.parameters);
    sch["b_phase"] = b;
    sch["reset_mode"] = s.reset_mode;
    put(sch, "tail", s.tail);
    out["schedule"] = sch;
  }

  const auto& r = c.run;
  ojson run;
  run["kind"] = to_string(r.kind);
  run["T"] = r.T;
  run["h"] = r.h;
  ojson cauchy = ojson::object();
  put(cauchy, "q0", r.cauchy.q0);
  put(cauchy, "q1", r.cauchy.q1);
  put(cauchy, "q2", r.cauchy.q2);
  put(cauchy, "q3", r.cauchy.q3);
  put(cauchy, "q0_random_scale", r.cauchy.q0_random_scale);
  put(cauchy, "dimension", r.cauchy.dimension);
  run["cauchy"] = cauchy;
  run["seed"] = r.seed;
  run["output_dir"] = r.output_dir;
  put(run, "thetas", r.thetas);
  put(run, "xi", r.xi);
  put(run, "eta", r.eta);
  put(run, "trials", r.trials);
  put(run, "rhos", r.rhos);
  put(run, "b_duration", r.b_duration);
  out["run"] = run;
  return out;
}

CALParameters resolve_parameters(const ExperimentConfig& c) {
  return c.parameters.raw ? derive(*c.parameters.raw) : *c.parameters.derived;
}

Potential build_potential(const PotentialSpec& s) {
  if (s.kind == "zero") return Potential::zero(s.dimension.value_or(-1));
  if (s.kind == "quadratic_tracking") {
    if (s.weight) {
      const auto& w = *s.weight;
      Eigen::MatrixXd m(static_cast<Eigen::Index>(w.size()),
                        static_cast<Eigen::Index>(w.empty() ? 0 : w.front().size()));
      for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t j = 0; j < w[i].size(); ++j)
          m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w[i][j];
      return Potential::quadratic_tracking(m);
    }
    return Potential::quadratic_tracking(s.dimension.value_or(1), s.scale.value_or(1.0));
  }
  if (s.kind == "linear_regression") return Potential::linear_regression(s.features.value_or(1));
  if (s.kind == "feature_demo")
    return Potential::feature_demo(
        s.input_dim.value_or(1), s.hidden.value_or(1),
        s.nonlinearity.value_or("tanh") == "logistic" ? Nonlinearity::Logistic : Nonlinearity::Tanh);
  throw ConfigError("unknown potential kind '" + s.kind + "'");
}

namespace {

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

InputSignal build_input(const InputSpec& s, const std::filesystem::path& base_dir) {
  if (s.kind == "zero") return InputSignal::zero(s.dimension.value_or(1));
  if (s.kind == "sinusoid") {
    const Eigen::VectorXd amp = to_eigen(*s.amplitude);
    const Eigen::VectorXd phase =
        s.phase ? to_eigen(*s.phase) : Eigen::VectorXd::Zero(amp.size()).eval();
    return InputSignal::sinusoid(amp, to_eigen(*s.frequency), phase);
  }
  if (s.kind == "piecewise_constant") {
    const auto& v = *s.values;
    Eigen::MatrixXd m(static_cast<Eigen::Index>(v.size()),
                      static_cast<Eigen::Index>(v.empty() ? 0 : v.front().size()));
    for (std::size_t i = 0; i < v.size(); ++i)
      m.row(static_cast<Eigen::Index>(i)) = to_eigen(v[i]).transpose();
    return InputSignal::piecewise_constant(*s.breakpoints, m);
  }
  if (s.kind == "smooth_noise")
    return InputSignal::smooth_noise(s.dimension.value_or(1), s.seed.value_or(0),
                                     s.bandwidth.value_or(1.0), s.components.value_or(16));
  if (s.kind == "file") {
    std::filesystem::path p(*s.path);
    if (p.is_relative()) p = base_dir / p;
    return InputSignal::from_file(p);
  }
  throw ConfigError("unknown input kind '" + s.kind + "'");
}

Schedule build_schedule(const std::optional<ScheduleSpec>& spec, double T) {
  if (!spec) return Schedule({}, T);
  if (spec->breakpoints) return Schedule(*spec->breakpoints, T);
  if (spec->period_a) return Schedule::periodic(*spec->period_a, *spec->period_b, *spec->count, T);
  return Schedule({}, T);
}

ScheduleControl build_control(const ScheduleSpec& s, const CALParameters& a_phase) {
  ScheduleControl c;
  c.a_phase = a_phase;
  c.mode = s.reset_mode == "hard_reset" ? ResetMode::HardReset : ResetMode::SimulateB;
  const BPhaseSpec& b = s.b_phase;
  if (b.kind == "explicit") {
    c.b_phase = *b.parameters;
  } else if (b.kind == "adaptive") {
    c.b_phase = AdaptiveRho{b.epsilon.value_or(0.05), b.gamma_bar, b.linear_bound.value_or(false)};
  } else {
    c.b_phase = FixedRho{b.rho.value_or(1.0), b.gamma_bar};
  }
  return c;
}

CauchyData build_cauchy(const ExperimentConfig& c, const Potential& potential) {
  const CauchySpec& s = c.run.cauchy;
  Eigen::VectorXd q0;
  if (s.q0) {
    q0 = to_eigen(*s.q0);
  } else {
    int n = s.dimension.value_or(potential.state_dim() >= 0 ? potential.state_dim() : 1);
    if (n < 1) throw ConfigError("run.cauchy.dimension: must be >= 1");
    q0 = Eigen::VectorXd::Zero(n);
    if (s.q0_random_scale) {
      std::mt19937_64 rng(c.run.seed);
      std::uniform_real_distribution<double> dist(-*s.q0_random_scale, *s.q0_random_scale);
      for (Eigen::Index i = 0; i < n; ++i) q0(i) = dist(rng);
    }
  }
  const auto opt = [&](const std::optional<std::vector<double>>& v) {
    if (!v) return Eigen::VectorXd();
    if (static_cast<Eigen::Index>(v->size()) != q0.size())
      throw ConfigError("run.cauchy: derivative length differs from the state dimension");
    return Eigen::VectorXd(to_eigen(*v));
  };
  return CauchyData::from(q0, opt(s.q1), opt(s.q2), opt(s.q3));
}

}  // namespace cal
