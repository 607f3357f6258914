#include "sqlab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sqlab {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) {
  throw std::invalid_argument(message);
}

void require_keys(const json& obj, const std::string& prefix,
                  const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (allowed.find(item.key()) == allowed.end())
      fail("unknown key: " + prefix + item.key());
  }
}

double get_number(const json& obj, const std::string& prefix,
                  const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) fail("key " + prefix + key + " must be a number");
  return v.get<double>();
}

bool get_bool(const json& obj, const std::string& prefix, const std::string& key,
              bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) fail("key " + prefix + key + " must be a boolean");
  return v.get<bool>();
}

std::uint64_t get_uint(const json& obj, const std::string& prefix,
                       const std::string& key, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned())
    fail("key " + prefix + key + " must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

std::string get_string(const json& obj, const std::string& prefix,
                       const std::string& key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) fail("key " + prefix + key + " must be a string");
  return v.get<std::string>();
}

SweepSpec parse_sweep(const json& obj, const std::string& prefix) {
  require_keys(obj, prefix, {"axes"});
  if (!obj.contains("axes") || !obj.at("axes").is_array())
    fail("key " + prefix + "axes must be an array of axis objects");
  SweepSpec spec;
  std::size_t index = 0;
  for (const auto& axis_json : obj.at("axes")) {
    const std::string axis_prefix =
        prefix + "axes[" + std::to_string(index) + "].";
    if (!axis_json.is_object()) fail(axis_prefix + " must be an object");
    require_keys(axis_json, axis_prefix, {"name", "lo", "hi", "count"});
    SweepAxis axis;
    axis.name = get_string(axis_json, axis_prefix, "name", "");
    if (axis.name.empty()) fail("key " + axis_prefix + "name is required");
    if (!axis_json.contains("lo") || !axis_json.contains("hi"))
      fail("keys " + axis_prefix + "lo and hi are required");
    axis.lo = get_number(axis_json, axis_prefix, "lo", 0.0);
    axis.hi = get_number(axis_json, axis_prefix, "hi", 0.0);
    axis.count = static_cast<std::size_t>(
        get_uint(axis_json, axis_prefix, "count", 0));
    if (axis.count < 1) fail("key " + axis_prefix + "count must be >= 1");
    spec.axes.push_back(axis);
    ++index;
  }
  if (spec.axes.size() > 2) fail("key " + prefix + "axes allows at most 2 axes");
  return spec;
}

}  // namespace

std::string pipeline_name(Pipeline p) {
  switch (p) {
    case Pipeline::chsh: return "chsh";
    case Pipeline::witness: return "witness";
    case Pipeline::evolve: return "evolve";
    case Pipeline::feasibility: return "feasibility";
    case Pipeline::bs_check: return "bs-check";
  }
  return "unknown";
}

SternGerlachConfig default_chsh_config() {
  SternGerlachConfig config;
  config.mass = 1e-19;
  config.gradient = 1e5;
  config.mu = 2.0 * 9.2740100783e-24;
  config.t_prep = 5e-5;
  config.sigma_d = 1e-10;
  config.gamma = 0.0;
  config.window = 0.0;
  return config;
}

CasimirConfig default_witness_config() {
  CasimirConfig config;
  config.radius = 20e-9;
  config.distance = 3.5e-6;
  config.separation = 50e-9;
  config.epsilon_r = 5.7;
  config.tau = 0.01;
  config.mass = 1e-19;
  config.sigma_d = 1e-10;
  config.gamma = 0.0;
  config.window = 0.0;
  config.delay = 0.0;
  return config;
}

FeasibilityInput default_feasibility_input() {
  FeasibilityInput input;
  input.mass = 1e-19;
  input.sigma_d = 1e-10;
  input.separation = 25e-9;
  input.delta_x = 1e-10;
  input.delta_t = 0.0;
  return input;
}

ConfigDocument parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) fail("config root must be a JSON object");
  require_keys(root, "", {"schema_version", "pipeline", "parameters", "seed",
                          "output"});

  const std::string version = get_string(root, "", "schema_version", "");
  if (version != "1") fail("schema_version must be \"1\"");

  const std::string pipeline = get_string(root, "", "pipeline", "");
  ConfigDocument doc;
  if (pipeline == "chsh") doc.pipeline = Pipeline::chsh;
  else if (pipeline == "witness") doc.pipeline = Pipeline::witness;
  else if (pipeline == "evolve") doc.pipeline = Pipeline::evolve;
  else if (pipeline == "feasibility") doc.pipeline = Pipeline::feasibility;
  else if (pipeline == "bs-check") doc.pipeline = Pipeline::bs_check;
  else if (pipeline == "sweep")
    fail("pipeline \"sweep\" is not standalone; add a parameters.sweep block "
         "to a chsh, witness, or feasibility config instead");
  else fail("pipeline must be one of chsh, witness, evolve, feasibility, bs-check");

  doc.seed = get_uint(root, "", "seed", 1);

  if (root.contains("output")) {
    const json& out = root.at("output");
    if (!out.is_object()) fail("key output must be an object");
    require_keys(out, "output.", {"path", "format"});
    doc.output.path = get_string(out, "output.", "path", ".");
    doc.output.format = get_string(out, "output.", "format", "json");
    if (doc.output.format != "json" && doc.output.format != "csv")
      fail("key output.format must be json or csv");
  }

  json params = json::object();
  if (root.contains("parameters")) {
    if (!root.at("parameters").is_object())
      fail("key parameters must be an object");
    params = root.at("parameters");
  }
  const std::string pp = "parameters.";

  switch (doc.pipeline) {
    case Pipeline::chsh: {
      require_keys(params, pp,
                   {"mass_kg", "gradient_T_per_m", "mu_J_per_T", "t_prep_s",
                    "sigma_d_m", "gamma_per_s", "delta_theta_rad", "shots",
                    "sweep"});
      SternGerlachConfig base = default_chsh_config();
      base.mass = get_number(params, pp, "mass_kg", base.mass);
      base.gradient = get_number(params, pp, "gradient_T_per_m", base.gradient);
      base.mu = get_number(params, pp, "mu_J_per_T", base.mu);
      base.t_prep = get_number(params, pp, "t_prep_s", base.t_prep);
      base.sigma_d = get_number(params, pp, "sigma_d_m", base.sigma_d);
      base.gamma = get_number(params, pp, "gamma_per_s", base.gamma);
      base.window = get_number(params, pp, "delta_theta_rad", base.window);
      doc.chsh = base;
      doc.shots = static_cast<std::size_t>(get_uint(params, pp, "shots", 0));
      if (params.contains("sweep")) {
        doc.sweep = parse_sweep(params.at("sweep"), pp + "sweep.");
        doc.has_sweep = true;
      }
      break;
    }
    case Pipeline::witness: {
      require_keys(params, pp,
                   {"radius_m", "distance_m", "separation_m", "epsilon_r",
                    "tau_s", "mass_kg", "sigma_d_m", "gamma_per_s",
                    "delta_theta_rad", "delay_s", "dephase_during_delay",
                    "shots", "forced_phases", "sweep"});
      CasimirConfig base = default_witness_config();
      base.radius = get_number(params, pp, "radius_m", base.radius);
      base.distance = get_number(params, pp, "distance_m", base.distance);
      base.separation = get_number(params, pp, "separation_m", base.separation);
      base.epsilon_r = get_number(params, pp, "epsilon_r", base.epsilon_r);
      base.tau = get_number(params, pp, "tau_s", base.tau);
      base.mass = get_number(params, pp, "mass_kg", base.mass);
      base.sigma_d = get_number(params, pp, "sigma_d_m", base.sigma_d);
      base.gamma = get_number(params, pp, "gamma_per_s", base.gamma);
      base.window = get_number(params, pp, "delta_theta_rad", base.window);
      base.delay = get_number(params, pp, "delay_s", base.delay);
      base.dephase_during_delay =
          get_bool(params, pp, "dephase_during_delay", false);
      if (params.contains("forced_phases")) {
        const json& fp = params.at("forced_phases");
        if (!fp.is_object()) fail("key parameters.forced_phases must be an object");
        require_keys(fp, pp + "forced_phases.", {"dphi01_rad", "dphi10_rad"});
        if (!fp.contains("dphi01_rad") || !fp.contains("dphi10_rad"))
          fail("keys parameters.forced_phases.dphi01_rad and dphi10_rad are "
               "both required");
        base.forced_phases = std::make_pair(
            get_number(fp, pp + "forced_phases.", "dphi01_rad", 0.0),
            get_number(fp, pp + "forced_phases.", "dphi10_rad", 0.0));
      }
      doc.witness = base;
      doc.shots = static_cast<std::size_t>(get_uint(params, pp, "shots", 0));
      if (params.contains("sweep")) {
        doc.sweep = parse_sweep(params.at("sweep"), pp + "sweep.");
        doc.has_sweep = true;
      }
      break;
    }
    case Pipeline::evolve: {
      require_keys(params, pp,
                   {"sigma_d_over_d", "t_over_overlap", "samples",
                    "x_span_sigma", "grid_compare", "grid_n"});
      EvolveParams ev;
      ev.sigma_d_over_d = get_number(params, pp, "sigma_d_over_d",
                                     ev.sigma_d_over_d);
      ev.t_over_overlap = get_number(params, pp, "t_over_overlap",
                                     ev.t_over_overlap);
      ev.samples = static_cast<std::size_t>(
          get_uint(params, pp, "samples", ev.samples));
      ev.x_span_sigma = get_number(params, pp, "x_span_sigma", ev.x_span_sigma);
      ev.grid_compare = get_bool(params, pp, "grid_compare", ev.grid_compare);
      ev.grid_n = static_cast<std::size_t>(
          get_uint(params, pp, "grid_n", ev.grid_n));
      if (ev.samples < 2) fail("key parameters.samples must be >= 2");
      if (!(ev.x_span_sigma > 0.0))
        fail("key parameters.x_span_sigma must be positive");
      doc.evolve = ev;
      break;
    }
    case Pipeline::feasibility: {
      require_keys(params, pp,
                   {"mass_kg", "sigma_d_m", "separation_m", "delta_x_m",
                    "delta_t_s", "sweep"});
      FeasibilityInput base = default_feasibility_input();
      base.mass = get_number(params, pp, "mass_kg", base.mass);
      base.sigma_d = get_number(params, pp, "sigma_d_m", base.sigma_d);
      base.separation = get_number(params, pp, "separation_m", base.separation);
      base.delta_x = get_number(params, pp, "delta_x_m", base.delta_x);
      base.delta_t = get_number(params, pp, "delta_t_s", base.delta_t);
      doc.feas = base;
      if (params.contains("sweep")) {
        doc.sweep = parse_sweep(params.at("sweep"), pp + "sweep.");
        doc.has_sweep = true;
      }
      break;
    }
    case Pipeline::bs_check: {
      require_keys(params, pp, {"theta0_rad", "theta1_rad"});
      doc.bs.theta0 = get_number(params, pp, "theta0_rad", doc.bs.theta0);
      doc.bs.theta1 = get_number(params, pp, "theta1_rad", doc.bs.theta1);
      break;
    }
  }
  return doc;
}

ConfigDocument parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

}  // namespace sqlab
