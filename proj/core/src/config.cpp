#include "spherebot/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

#include "spherebot/errors.hpp"

namespace spherebot {

namespace {

using nlohmann::json;

class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) {
      throw ConfigError(where_ + ": expected an object");
    }
  }
  void done() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) {
        throw ConfigError(where_ + ": unknown key '" + key + "'");
      }
    }
  }
  Reader(const Reader&) = delete;
  Reader& operator=(const Reader&) = delete;

  const json& at(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end()) {
      throw ConfigError(where_ + ": missing key '" + key + "'");
    }
    seen_.insert(key);
    return *it;
  }
  std::string path(const std::string& key) const { return where_ + "." + key; }

  double number(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number()) {
      throw ConfigError(path(key) + ": expected a number");
    }
    return v.get<double>();
  }
  int integer(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number_integer()) {
      throw ConfigError(path(key) + ": expected an integer");
    }
    return v.get<int>();
  }
  std::uint64_t u64(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number_unsigned()) {
      throw ConfigError(path(key) + ": expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }
  std::string string(const std::string& key) {
    const json& v = at(key);
    if (!v.is_string()) {
      throw ConfigError(path(key) + ": expected a string");
    }
    return v.get<std::string>();
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

double bound_value(const json& v, double fallback, const std::string& where) {
  if (v.is_null()) {
    return fallback;
  }
  if (!v.is_number()) {
    throw ConfigError(where + ": expected a number or null");
  }
  return v.get<double>();
}

Interval read_interval(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2) {
    throw ConfigError(where + ": expected [lo, hi]");
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {bound_value(v[0], -inf, where), bound_value(v[1], inf, where)};
}

json write_interval(const Interval& b) {
  json out = json::array();
  out.push_back(std::isfinite(b.lo) ? json(b.lo) : json(nullptr));
  out.push_back(std::isfinite(b.hi) ? json(b.hi) : json(nullptr));
  return out;
}

template <std::size_t N>
std::array<double, N> read_array(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != N) {
    throw ConfigError(where + ": expected " + std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    if (!v[i].is_number()) {
      throw ConfigError(where + ": expected numbers");
    }
    out[i] = v[i].get<double>();
  }
  return out;
}

std::map<std::string, double> read_number_map(const json& v, const std::string& where) {
  if (!v.is_object()) {
    throw ConfigError(where + ": expected an object");
  }
  std::map<std::string, double> out;
  for (const auto& [key, value] : v.items()) {
    if (!value.is_number()) {
      throw ConfigError(where + "." + key + ": expected a number");
    }
    out[key] = value.get<double>();
  }
  return out;
}

ModelParams read_model(const json& j) {
  Reader r(j, "model");
  ModelParams p;
  p.m = r.number("m");
  p.m_f = r.number("m_f");
  p.m_s = r.number("m_s");
  p.I_mp = r.number("I_mp");
  p.I_mr = r.number("I_mr");
  p.I_fp = r.number("I_fp");
  p.I_fr = r.number("I_fr");
  p.I_s = r.number("I_s");
  p.I_sr = r.number("I_sr");
  p.R = r.number("R");
  p.l = r.number("l");
  p.zeta = r.number("zeta");
  p.g = r.number("g");
  r.done();
  return p;
}

HtsmcGains read_htsmc(const json& j) {
  Reader r(j, "gains.htsmc");
  HtsmcGains g;
  g.a1 = r.number("a1");
  g.c1 = r.number("c1");
  g.p1 = r.integer("p1");
  g.q1 = r.integer("q1");
  g.a2 = r.number("a2");
  g.c2 = r.number("c2");
  g.p2 = r.integer("p2");
  g.q2 = r.integer("q2");
  g.A = r.number("A");
  g.B = r.number("B");
  g.k = r.number("k");
  g.eps = r.number("eps");
  g.e_sing = r.number("e_sing");
  g.bl_width = r.number("bl_width");
  r.done();
  return g;
}

HsmcGains read_hsmc(const json& j) {
  Reader r(j, "gains.hsmc");
  HsmcGains g;
  g.lambda1 = r.number("lambda1");
  g.lambda2 = r.number("lambda2");
  g.A_v = r.number("A_v");
  g.B_v = r.number("B_v");
  g.k_v = r.number("k_v");
  g.eps_v = r.number("eps_v");
  g.bl_width = r.number("bl_width");
  r.done();
  return g;
}

PidGains read_pid(const json& j) {
  Reader r(j, "gains.pid");
  PidGains g;
  g.k_p = r.number("k_p");
  g.k_i = r.number("k_i");
  g.k_d = r.number("k_d");
  g.integral_clamp = r.number("integral_clamp");
  g.output_clamp = r.number("output_clamp");
  r.done();
  return g;
}

GainsConfig read_gains(const json& j) {
  Reader r(j, "gains");
  GainsConfig g;
  g.htsmc = read_htsmc(r.at("htsmc"));
  g.hsmc = read_hsmc(r.at("hsmc"));
  g.pid = read_pid(r.at("pid"));
  Reader f(r.at("filters"), "gains.filters");
  g.filters.roll_omega = f.number("roll_omega");
  g.filters.velocity_omega = f.number("velocity_omega");
  f.done();
  r.done();
  return g;
}

MpcConfig read_mpc(const json& j) {
  Reader r(j, "mpc");
  MpcConfig c;
  c.N = r.integer("N");
  c.dt = r.number("dt");
  c.Q = read_array<3>(r.at("Q"), "mpc.Q");
  c.Rw = read_array<2>(r.at("R"), "mpc.R");
  {
    Reader b(r.at("x_bounds"), "mpc.x_bounds");
    c.x_bounds[0] = read_interval(b.at("X"), "mpc.x_bounds.X");
    c.x_bounds[1] = read_interval(b.at("Y"), "mpc.x_bounds.Y");
    c.x_bounds[2] = read_interval(b.at("phi"), "mpc.x_bounds.phi");
    b.done();
  }
  {
    Reader b(r.at("u_bounds"), "mpc.u_bounds");
    c.u_bounds[0] = read_interval(b.at("v"), "mpc.u_bounds.v");
    c.u_bounds[1] = read_interval(b.at("q_r"), "mpc.u_bounds.q_r");
    b.done();
  }
  c.max_sqp_iters = r.integer("max_sqp_iters");
  c.kkt_tol = r.number("kkt_tol");
  c.qp_reg = r.number("qp_reg");
  r.done();
  return c;
}

FrictionMode read_friction(const std::string& s) {
  if (s == "centripetal") {
    return FrictionMode::kCentripetalEstimate;
  }
  if (s == "zero") {
    return FrictionMode::kZero;
  }
  throw ConfigError("simulation.friction: expected 'centripetal' or 'zero', got '" + s + "'");
}

std::string friction_name(FrictionMode m) {
  return m == FrictionMode::kZero ? "zero" : "centripetal";
}

SimConfig read_simulation(const json& j) {
  Reader r(j, "simulation");
  SimConfig c;
  c.dt_physics = r.number("dt_physics");
  c.dt_control = r.number("dt_control");
  c.dt_plan = r.number("dt_plan");
  c.tau_max = r.number("tau_max");
  c.friction_mode = read_friction(r.string("friction"));
  c.seed = r.u64("seed");
  Reader n(r.at("noise"), "simulation.noise");
  c.noise.angle_std = n.number("angle_std");
  c.noise.rate_std = n.number("rate_std");
  c.noise.velocity_std = n.number("velocity_std");
  c.noise.position_std = n.number("position_std");
  n.done();
  r.done();
  return c;
}

ExperimentConfig read_experiment(const json& j) {
  Reader r(j, "experiment");
  ExperimentConfig c;
  c.roll.step_time = r.number("step_time");
  c.roll.step_level = r.number("step_level");
  c.roll.interval = r.number("discrete_interval");
  const json& levels = r.at("discrete_levels");
  if (!levels.is_array() || levels.empty()) {
    throw ConfigError("experiment.discrete_levels: expected a non-empty array");
  }
  c.roll.levels.clear();
  for (const json& v : levels) {
    if (!v.is_number()) {
      throw ConfigError("experiment.discrete_levels: expected numbers");
    }
    c.roll.levels.push_back(v.get<double>());
  }
  c.duration = read_number_map(r.at("duration"), "experiment.duration");
  c.speed = read_number_map(r.at("speed"), "experiment.speed");
  c.settle_band = r.number("settle_band");
  c.zero_band = r.number("zero_band");
  c.path_skip = r.number("path_skip");
  r.done();
  return c;
}

json to_json(const Config& c) {
  json j;
  const ModelParams& p = c.model;
  j["model"] = {{"m", p.m},       {"m_f", p.m_f},   {"m_s", p.m_s},   {"I_mp", p.I_mp},
                {"I_mr", p.I_mr}, {"I_fp", p.I_fp}, {"I_fr", p.I_fr}, {"I_s", p.I_s},
                {"I_sr", p.I_sr}, {"R", p.R},       {"l", p.l},       {"zeta", p.zeta},
                {"g", p.g}};
  const HtsmcGains& h = c.gains.htsmc;
  const HsmcGains& v = c.gains.hsmc;
  const PidGains& d = c.gains.pid;
  j["gains"] = {
      {"htsmc",
       {{"a1", h.a1}, {"c1", h.c1}, {"p1", h.p1}, {"q1", h.q1}, {"a2", h.a2}, {"c2", h.c2},
        {"p2", h.p2}, {"q2", h.q2}, {"A", h.A}, {"B", h.B}, {"k", h.k}, {"eps", h.eps},
        {"e_sing", h.e_sing}, {"bl_width", h.bl_width}}},
      {"hsmc",
       {{"lambda1", v.lambda1}, {"lambda2", v.lambda2}, {"A_v", v.A_v}, {"B_v", v.B_v},
        {"k_v", v.k_v}, {"eps_v", v.eps_v}, {"bl_width", v.bl_width}}},
      {"pid",
       {{"k_p", d.k_p}, {"k_i", d.k_i}, {"k_d", d.k_d}, {"integral_clamp", d.integral_clamp},
        {"output_clamp", d.output_clamp}}},
      {"filters",
       {{"roll_omega", c.gains.filters.roll_omega},
        {"velocity_omega", c.gains.filters.velocity_omega}}}};
  const MpcConfig& m = c.mpc;
  j["mpc"] = {{"N", m.N},
              {"dt", m.dt},
              {"Q", m.Q},
              {"R", m.Rw},
              {"x_bounds",
               {{"X", write_interval(m.x_bounds[0])},
                {"Y", write_interval(m.x_bounds[1])},
                {"phi", write_interval(m.x_bounds[2])}}},
              {"u_bounds",
               {{"v", write_interval(m.u_bounds[0])}, {"q_r", write_interval(m.u_bounds[1])}}},
              {"max_sqp_iters", m.max_sqp_iters},
              {"kkt_tol", m.kkt_tol},
              {"qp_reg", m.qp_reg}};
  const SimConfig& s = c.simulation;
  j["simulation"] = {{"dt_physics", s.dt_physics},
                     {"dt_control", s.dt_control},
                     {"dt_plan", s.dt_plan},
                     {"tau_max", s.tau_max},
                     {"friction", friction_name(s.friction_mode)},
                     {"seed", s.seed},
                     {"noise",
                      {{"angle_std", s.noise.angle_std},
                       {"rate_std", s.noise.rate_std},
                       {"velocity_std", s.noise.velocity_std},
                       {"position_std", s.noise.position_std}}}};
  const ExperimentConfig& e = c.experiment;
  j["experiment"] = {{"step_time", e.roll.step_time},
                     {"step_level", e.roll.step_level},
                     {"discrete_interval", e.roll.interval},
                     {"discrete_levels", e.roll.levels},
                     {"duration", e.duration},
                     {"speed", e.speed},
                     {"settle_band", e.settle_band},
                     {"zero_band", e.zero_band},
                     {"path_skip", e.path_skip}};
  return j;
}

}  // namespace

void Config::validate() const {
  model.validate();
  gains.htsmc.validate();
  gains.hsmc.validate();
  gains.pid.validate();
  if (!(gains.filters.roll_omega > 0.0) || !(gains.filters.velocity_omega > 0.0)) {
    throw ConfigError("gains.filters: bandwidths must be positive");
  }
  mpc.validate();
  SimConfig probe = simulation;
  probe.duration = 0.0;
  probe.validate();
  if (std::abs(mpc.dt - simulation.dt_plan) > 1e-12) {
    throw ConfigError("mpc.dt must equal simulation.dt_plan");
  }
  if (!(experiment.settle_band > 0.0) || !(experiment.zero_band > 0.0) ||
      !(experiment.path_skip >= 0.0) || !(experiment.roll.interval > 0.0)) {
    throw ConfigError("experiment: bands and intervals must be positive");
  }
  for (const auto& [name, d] : experiment.duration) {
    if (!(d >= 0.0)) {
      throw ConfigError("experiment.duration." + name + " must be non-negative");
    }
  }
}

Config parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  Config c;
  {
    Reader r(j, "config");
    c.model = read_model(r.at("model"));
    c.gains = read_gains(r.at("gains"));
    c.mpc = read_mpc(r.at("mpc"));
    c.simulation = read_simulation(r.at("simulation"));
    c.experiment = read_experiment(r.at("experiment"));
    r.done();
  }
  c.validate();
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string dump_config(const Config& config) { return to_json(config).dump(2) + "\n"; }

}  // namespace spherebot
