#include "sqlab/commands.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sqlab/config.hpp"
#include "sqlab/constants.hpp"
#include "sqlab/pipelines.hpp"
#include "sqlab/wavepacket.hpp"

namespace sqlab {

namespace {

constexpr double pi = 3.14159265358979323846;

// ------------------------------------------------------------- formatting

std::string escape_json(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 8);
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

// ordered JSON value tree; doubles rendered by format_double
struct JsonValue {
  enum class Kind { object, array, number, uinteger, string, boolean, null };
  Kind kind = Kind::null;
  double number = 0.0;
  std::uint64_t uinteger = 0;
  bool flag = false;
  std::string text;
  std::vector<std::pair<std::string, JsonValue>> members;
  std::vector<JsonValue> items;

  static JsonValue object() { JsonValue v; v.kind = Kind::object; return v; }
  static JsonValue array() { JsonValue v; v.kind = Kind::array; return v; }
  static JsonValue num(double d) {
    JsonValue v; v.kind = Kind::number; v.number = d; return v;
  }
  static JsonValue uint(std::uint64_t u) {
    JsonValue v; v.kind = Kind::uinteger; v.uinteger = u; return v;
  }
  static JsonValue str(std::string s) {
    JsonValue v; v.kind = Kind::string; v.text = std::move(s); return v;
  }
  static JsonValue boolean(bool b) {
    JsonValue v; v.kind = Kind::boolean; v.flag = b; return v;
  }
  static JsonValue null() { return JsonValue{}; }

  JsonValue& set(const std::string& key, JsonValue value) {
    members.emplace_back(key, std::move(value));
    return members.back().second;
  }
  void push(JsonValue value) { items.push_back(std::move(value)); }
};

void dump_value(const JsonValue& v, std::string& out, int depth) {
  const auto indent = [&out](int d) { out.append(static_cast<size_t>(d) * 2, ' '); };
  switch (v.kind) {
    case JsonValue::Kind::object: {
      if (v.members.empty()) { out += "{}"; return; }
      out += "{\n";
      for (std::size_t i = 0; i < v.members.size(); ++i) {
        indent(depth + 1);
        out += '"';
        out += escape_json(v.members[i].first);
        out += "\": ";
        dump_value(v.members[i].second, out, depth + 1);
        if (i + 1 < v.members.size()) out += ',';
        out += '\n';
      }
      indent(depth);
      out += '}';
      return;
    }
    case JsonValue::Kind::array: {
      if (v.items.empty()) { out += "[]"; return; }
      out += "[\n";
      for (std::size_t i = 0; i < v.items.size(); ++i) {
        indent(depth + 1);
        dump_value(v.items[i], out, depth + 1);
        if (i + 1 < v.items.size()) out += ',';
        out += '\n';
      }
      indent(depth);
      out += ']';
      return;
    }
    case JsonValue::Kind::number:
      out += std::isfinite(v.number) ? format_double(v.number) : "null";
      return;
    case JsonValue::Kind::uinteger:
      out += std::to_string(v.uinteger);
      return;
    case JsonValue::Kind::string:
      out += '"';
      out += escape_json(v.text);
      out += '"';
      return;
    case JsonValue::Kind::boolean:
      out += v.flag ? "true" : "false";
      return;
    case JsonValue::Kind::null:
      out += "null";
      return;
  }
}

std::string dump_json(const JsonValue& v) {
  std::string out;
  dump_value(v, out, 0);
  out += '\n';
  return out;
}

std::string csv_of(const std::vector<std::string>& columns,
                   const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += columns[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

// --------------------------------------------------------------- file io

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open config file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ------------------------------------------------------------ mc helpers

JsonValue mc_json(const McBlock& mc) {
  JsonValue block = JsonValue::object();
  block.set("enabled", JsonValue::boolean(mc.enabled));
  if (!mc.enabled) return block;
  block.set("shots", JsonValue::uint(mc.shots));
  block.set("seed", JsonValue::uint(mc.seed));
  block.set("value", JsonValue::num(mc.value));
  block.set("standard_error", JsonValue::num(mc.se));
  JsonValue terms = JsonValue::object();
  for (std::size_t i = 0; i < mc.term_names.size(); ++i) {
    JsonValue term = JsonValue::object();
    term.set("value", JsonValue::num(mc.term_values[i]));
    term.set("standard_error", JsonValue::num(mc.term_ses[i]));
    terms.set(mc.term_names[i], std::move(term));
  }
  block.set("terms", std::move(terms));
  return block;
}

JsonValue sweep_errors_json(const SweepTable& table) {
  JsonValue errors = JsonValue::array();
  for (std::size_t row = 0; row < table.row_errors.size(); ++row) {
    if (table.row_errors[row].empty()) continue;
    JsonValue entry = JsonValue::object();
    entry.set("row", JsonValue::uint(row));
    entry.set("message", JsonValue::str(table.row_errors[row]));
    errors.push(std::move(entry));
  }
  return errors;
}

struct Artifact {
  std::string name;
  std::string bytes;
};

// ------------------------------------------------------------- pipelines

std::vector<Artifact> execute_chsh(const ConfigDocument& doc, unsigned threads) {
  const ChshReport r = run_sg_chsh(doc.chsh, doc.shots, doc.seed);
  JsonValue root = JsonValue::object();
  root.set("pipeline", JsonValue::str("chsh"));
  root.set("seed", JsonValue::uint(doc.seed));

  JsonValue inputs = JsonValue::object();
  inputs.set("mass_kg", JsonValue::num(doc.chsh.mass));
  inputs.set("gradient_T_per_m", JsonValue::num(doc.chsh.gradient));
  inputs.set("mu_J_per_T", JsonValue::num(doc.chsh.mu));
  inputs.set("t_prep_s", JsonValue::num(doc.chsh.t_prep));
  inputs.set("sigma_d_m", JsonValue::num(doc.chsh.sigma_d));
  inputs.set("gamma_per_s", JsonValue::num(doc.chsh.gamma));
  inputs.set("delta_theta_rad", JsonValue::num(doc.chsh.window));
  inputs.set("shots", JsonValue::uint(doc.shots));
  root.set("inputs", std::move(inputs));

  JsonValue results = JsonValue::object();
  results.set("separation_m", JsonValue::num(r.separation));
  results.set("t_xy_s", JsonValue::num(r.t_xy));
  results.set("gamma_t", JsonValue::num(r.gamma_t));
  results.set("g", JsonValue::num(r.g));
  results.set("chsh_matrix", JsonValue::num(r.chsh_matrix));
  results.set("chsh_closed_form", JsonValue::num(r.chsh_closed_form));
  results.set("path_agreement", JsonValue::num(r.agreement));
  results.set("margin_over_2", JsonValue::num(r.margin_over_2));
  results.set("threshold_delta_theta_rad", JsonValue::num(r.threshold));
  results.set("threshold_over_two_pi", JsonValue::num(r.threshold / (2.0 * pi)));
  results.set("threshold_over_two_pi_reference", JsonValue::num(0.437));
  results.set("window_budget_rad", JsonValue::num(r.window_budget));
  root.set("results", std::move(results));
  root.set("monte_carlo", mc_json(r.mc));

  std::vector<Artifact> artifacts;
  if (doc.has_sweep) {
    const SweepTable table = sweep_chsh(doc.chsh, doc.sweep, threads);
    artifacts.push_back({"chsh_sweep.csv", csv_of(table.columns, table.rows)});
    JsonValue sweep = JsonValue::object();
    sweep.set("csv", JsonValue::str("chsh_sweep.csv"));
    sweep.set("rows", JsonValue::uint(table.rows.size()));
    sweep.set("invalid_rows", sweep_errors_json(table));
    root.set("sweep", std::move(sweep));
  }
  artifacts.insert(artifacts.begin(), {"chsh_report.json", dump_json(root)});
  return artifacts;
}

std::vector<Artifact> execute_witness(const ConfigDocument& doc, unsigned threads) {
  const WitnessReport r = run_casimir_witness(doc.witness, doc.shots, doc.seed);
  JsonValue root = JsonValue::object();
  root.set("pipeline", JsonValue::str("witness"));
  root.set("seed", JsonValue::uint(doc.seed));

  JsonValue inputs = JsonValue::object();
  inputs.set("radius_m", JsonValue::num(doc.witness.radius));
  inputs.set("distance_m", JsonValue::num(doc.witness.distance));
  inputs.set("separation_m", JsonValue::num(doc.witness.separation));
  inputs.set("epsilon_r", JsonValue::num(doc.witness.epsilon_r));
  inputs.set("tau_s", JsonValue::num(doc.witness.tau));
  inputs.set("mass_kg", JsonValue::num(doc.witness.mass));
  inputs.set("sigma_d_m", JsonValue::num(doc.witness.sigma_d));
  inputs.set("gamma_per_s", JsonValue::num(doc.witness.gamma));
  inputs.set("delta_theta_rad", JsonValue::num(doc.witness.window));
  inputs.set("delay_s", JsonValue::num(doc.witness.delay));
  inputs.set("dephase_during_delay",
             JsonValue::boolean(doc.witness.dephase_during_delay));
  inputs.set("shots", JsonValue::uint(doc.shots));
  if (doc.witness.forced_phases) {
    JsonValue forced = JsonValue::object();
    forced.set("dphi01_rad", JsonValue::num(doc.witness.forced_phases->first));
    forced.set("dphi10_rad", JsonValue::num(doc.witness.forced_phases->second));
    inputs.set("forced_phases", std::move(forced));
  } else {
    inputs.set("forced_phases", JsonValue::null());
  }
  root.set("inputs", std::move(inputs));

  JsonValue results = JsonValue::object();
  results.set("interaction_constant_m_per_s",
              JsonValue::num(casimir_constant(doc.witness.epsilon_r)));
  results.set("phi_rad", JsonValue::num(r.phases.phi));
  results.set("dphi01_rad", JsonValue::num(r.phases.dphi01));
  results.set("dphi10_rad", JsonValue::num(r.phases.dphi10));
  results.set("gamma_t", JsonValue::num(r.gamma_t));
  results.set("witness_matrix", JsonValue::num(r.witness_matrix));
  results.set("witness_closed_form", JsonValue::num(r.witness_closed_form));
  results.set("path_agreement", JsonValue::num(r.agreement));
  results.set("concurrence", JsonValue::num(r.concurrence));
  results.set("delayed_witness", JsonValue::num(r.delayed_witness));
  results.set("delay_rel_change", JsonValue::num(r.delay_rel_change));
  root.set("results", std::move(results));
  root.set("monte_carlo", mc_json(r.mc));

  std::vector<Artifact> artifacts;
  if (doc.has_sweep) {
    const SweepTable table = sweep_witness(doc.witness, doc.sweep, threads);
    artifacts.push_back({"witness_sweep.csv", csv_of(table.columns, table.rows)});
    JsonValue sweep = JsonValue::object();
    sweep.set("csv", JsonValue::str("witness_sweep.csv"));
    sweep.set("rows", JsonValue::uint(table.rows.size()));
    sweep.set("invalid_rows", sweep_errors_json(table));
    root.set("sweep", std::move(sweep));
  }
  artifacts.insert(artifacts.begin(), {"witness_report.json", dump_json(root)});
  return artifacts;
}

std::vector<Artifact> execute_evolve(const ConfigDocument& doc) {
  const EvolveParams& ev = doc.evolve;
  // natural parameterization: sigma_d = 1 m, mass = hbar kg
  const double d = 1.0 / ev.sigma_d_over_d;
  const double t = ev.t_over_overlap * 2.0 * d;
  const SpatialState state = symmetric_pair(d, 1.0, constants::hbar, t);
  const double norm = state.norm();
  const double first_peak = fringe_peak(ev.sigma_d_over_d, 1, ev.t_over_overlap);
  const double predicted = 4.0 * pi * ev.t_over_overlap;

  std::vector<std::string> columns{"x_over_sigma_d", "probability_density"};
  std::vector<std::vector<double>> rows;
  rows.reserve(ev.samples);
  const double step = 2.0 * ev.x_span_sigma / static_cast<double>(ev.samples - 1);
  for (std::size_t i = 0; i < ev.samples; ++i) {
    const double x = -ev.x_span_sigma + step * static_cast<double>(i);
    rows.push_back({x, state.density(x) / norm});
  }

  JsonValue grid_block = JsonValue::object();
  grid_block.set("enabled", JsonValue::boolean(ev.grid_compare));
  if (ev.grid_compare) {
    const double sigma_t = evolved_width(1.0, constants::hbar, t);
    const double half_span = 20.0 * std::max(sigma_t, d);
    const SpatialState initial = symmetric_pair(d, 1.0, constants::hbar, 0.0);
    GridState grid = sample_to_grid(initial, -half_span, half_span, ev.grid_n);
    const double norm_before = grid_norm(grid);
    spectral_propagate(grid, t, constants::hbar);
    const double norm_after = grid_norm(grid);
    const GridState analytic = sample_to_grid(state, -half_span, half_span,
                                              ev.grid_n);
    const double l2 = l2_distance(grid, analytic);

    double peak_density = 0.0;
    for (std::size_t j = 0; j < analytic.psi.size(); ++j)
      peak_density = std::max(peak_density, std::norm(analytic.psi[j]));
    double max_diff = 0.0;
    for (std::size_t j = 0; j < grid.psi.size(); ++j)
      max_diff = std::max(max_diff, std::abs(std::norm(grid.psi[j]) -
                                             std::norm(analytic.psi[j])));

    // locate the first positive fringe on the grid with a parabolic vertex
    const double lo = 0.5 * predicted;
    const double hi = 1.5 * predicted;
    std::size_t best = 0;
    double best_val = -1.0;
    for (std::size_t j = 0; j < grid.psi.size(); ++j) {
      const double x = grid.x_at(j);
      if (x < lo || x > hi) continue;
      const double val = std::norm(grid.psi[j]);
      if (val > best_val) { best_val = val; best = j; }
    }
    double grid_peak = grid.x_at(best);
    if (best > 0 && best + 1 < grid.psi.size()) {
      const double ym = std::norm(grid.psi[best - 1]);
      const double y0 = std::norm(grid.psi[best]);
      const double yp = std::norm(grid.psi[best + 1]);
      const double denom = ym - 2.0 * y0 + yp;
      if (denom < 0.0)
        grid_peak += 0.5 * grid.dx * (ym - yp) / denom;
    }

    grid_block.set("n", JsonValue::uint(ev.grid_n));
    grid_block.set("half_span_sigma_d", JsonValue::num(half_span));
    grid_block.set("l2_distance", JsonValue::num(l2));
    grid_block.set("max_density_diff_rel",
                   JsonValue::num(max_diff / peak_density));
    grid_block.set("norm_before", JsonValue::num(norm_before));
    grid_block.set("norm_after", JsonValue::num(norm_after));
    grid_block.set("norm_drift", JsonValue::num(std::abs(norm_after - norm_before)));
    grid_block.set("first_peak_sigma_d", JsonValue::num(grid_peak));

    // third profile column: grid density interpolated at the profile nodes
    columns.push_back("probability_density_grid");
    for (auto& row : rows) {
      const double x = row[0];
      const double pos = (x - grid.x0) / grid.dx;
      const double clamped = std::clamp(pos, 0.0,
                                        static_cast<double>(ev.grid_n - 1));
      const std::size_t j0 = static_cast<std::size_t>(clamped);
      const std::size_t j1 = std::min(j0 + 1, ev.grid_n - 1);
      const double frac = clamped - static_cast<double>(j0);
      const double rho = (1.0 - frac) * std::norm(grid.psi[j0]) +
                         frac * std::norm(grid.psi[j1]);
      row.push_back(rho / norm_after);
    }
  }

  JsonValue root = JsonValue::object();
  root.set("pipeline", JsonValue::str("evolve"));
  root.set("seed", JsonValue::uint(doc.seed));
  JsonValue inputs = JsonValue::object();
  inputs.set("sigma_d_over_d", JsonValue::num(ev.sigma_d_over_d));
  inputs.set("t_over_overlap", JsonValue::num(ev.t_over_overlap));
  inputs.set("samples", JsonValue::uint(ev.samples));
  inputs.set("x_span_sigma", JsonValue::num(ev.x_span_sigma));
  inputs.set("grid_compare", JsonValue::boolean(ev.grid_compare));
  inputs.set("grid_n", JsonValue::uint(ev.grid_n));
  root.set("inputs", std::move(inputs));
  JsonValue results = JsonValue::object();
  results.set("first_peak_sigma_d", JsonValue::num(first_peak));
  results.set("far_field_peak_sigma_d", JsonValue::num(predicted));
  results.set("state_norm", JsonValue::num(norm));
  results.set("profile_csv", JsonValue::str("density_profile.csv"));
  root.set("results", std::move(results));
  root.set("grid_oracle", std::move(grid_block));

  return {{"evolve_report.json", dump_json(root)},
          {"density_profile.csv", csv_of(columns, rows)}};
}

std::vector<Artifact> execute_feasibility(const ConfigDocument& doc,
                                          unsigned threads) {
  const FeasibilityReport r = feasibility(doc.feas);
  JsonValue root = JsonValue::object();
  root.set("pipeline", JsonValue::str("feasibility"));
  root.set("seed", JsonValue::uint(doc.seed));
  JsonValue inputs = JsonValue::object();
  inputs.set("mass_kg", JsonValue::num(doc.feas.mass));
  inputs.set("sigma_d_m", JsonValue::num(doc.feas.sigma_d));
  inputs.set("separation_m", JsonValue::num(doc.feas.separation));
  inputs.set("delta_x_m", JsonValue::num(doc.feas.delta_x));
  inputs.set("delta_t_s", JsonValue::num(doc.feas.delta_t));
  root.set("inputs", std::move(inputs));
  JsonValue results = JsonValue::object();
  results.set("t_xy_s", JsonValue::num(r.t_xy));
  results.set("reference_t_xy_s", JsonValue::num(1e-3));
  results.set("t_z_max_s", JsonValue::num(r.t_z_max));
  results.set("fringe_spacing_m", JsonValue::num(r.fringe_spacing));
  results.set("fringe_spacing_over_sigma_d",
              JsonValue::num(r.fringe_spacing / doc.feas.sigma_d));
  results.set("delta_theta_rad", JsonValue::num(r.delta_theta));
  results.set("chsh_threshold_rad", JsonValue::num(r.chsh_threshold));
  results.set("witness_window_limit_rad", JsonValue::num(r.witness_window_limit));
  results.set("chsh_feasible", JsonValue::boolean(r.chsh_feasible));
  results.set("witness_window_ok", JsonValue::boolean(r.witness_window_ok));
  root.set("results", std::move(results));

  std::vector<Artifact> artifacts;
  if (doc.has_sweep) {
    const SweepTable table = sweep_feasibility(doc.feas, doc.sweep, threads);
    artifacts.push_back({"feasibility_sweep.csv",
                         csv_of(table.columns, table.rows)});
    JsonValue sweep = JsonValue::object();
    sweep.set("csv", JsonValue::str("feasibility_sweep.csv"));
    sweep.set("rows", JsonValue::uint(table.rows.size()));
    sweep.set("invalid_rows", sweep_errors_json(table));
    root.set("sweep", std::move(sweep));
  }
  artifacts.insert(artifacts.begin(),
                   {"feasibility_report.json", dump_json(root)});
  return artifacts;
}

std::vector<Artifact> execute_bs_check(const ConfigDocument& doc) {
  const BeamSplitterReport r = beam_splitter_equivalence(doc.bs.theta0,
                                                         doc.bs.theta1);
  JsonValue root = JsonValue::object();
  root.set("pipeline", JsonValue::str("bs-check"));
  root.set("seed", JsonValue::uint(doc.seed));
  JsonValue inputs = JsonValue::object();
  inputs.set("theta0_rad", JsonValue::num(doc.bs.theta0));
  inputs.set("theta1_rad", JsonValue::num(doc.bs.theta1));
  root.set("inputs", std::move(inputs));
  JsonValue results = JsonValue::object();
  JsonValue re = JsonValue::array();
  JsonValue im = JsonValue::array();
  for (std::size_t row = 0; row < 2; ++row) {
    JsonValue re_row = JsonValue::array();
    JsonValue im_row = JsonValue::array();
    for (std::size_t col = 0; col < 2; ++col) {
      re_row.push(JsonValue::num(r.matrix.at(row, col).real()));
      im_row.push(JsonValue::num(r.matrix.at(row, col).imag()));
    }
    re.push(std::move(re_row));
    im.push(std::move(im_row));
  }
  results.set("matrix_re", std::move(re));
  results.set("matrix_im", std::move(im));
  results.set("unitarity_defect", JsonValue::num(r.unitarity_defect));
  results.set("balanced_splitter_match", JsonValue::num(r.balanced_match));
  results.set("row_overlap_mod", JsonValue::num(r.overlap_mod));
  root.set("results", std::move(results));
  return {{"bs_check_report.json", dump_json(root)}};
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value,
                                 std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw std::runtime_error("digest context allocation failed");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest, &length) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("sha256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

int run_command(const std::string& pipeline, const CliOptions& options) {
  try {
    const auto started = std::chrono::steady_clock::now();
    ConfigDocument doc = parse_config_file(options.config_path);
    if (pipeline_name(doc.pipeline) != pipeline)
      throw std::invalid_argument("config pipeline \"" +
                                  pipeline_name(doc.pipeline) +
                                  "\" does not match subcommand \"" + pipeline +
                                  "\"");
    if (options.seed) doc.seed = *options.seed;
    if (options.shots) doc.shots = *options.shots;
    if (!options.out_dir.empty()) doc.output.path = options.out_dir;

    std::vector<Artifact> artifacts;
    switch (doc.pipeline) {
      case Pipeline::chsh: artifacts = execute_chsh(doc, options.max_threads); break;
      case Pipeline::witness:
        artifacts = execute_witness(doc, options.max_threads);
        break;
      case Pipeline::evolve: artifacts = execute_evolve(doc); break;
      case Pipeline::feasibility:
        artifacts = execute_feasibility(doc, options.max_threads);
        break;
      case Pipeline::bs_check: artifacts = execute_bs_check(doc); break;
    }

    const std::filesystem::path out_dir(doc.output.path);
    std::filesystem::create_directories(out_dir);
    for (const auto& artifact : artifacts)
      write_file(out_dir / artifact.name, artifact.bytes);

    const double duration =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
            .count();

    JsonValue manifest = JsonValue::object();
    manifest.set("schema_version", JsonValue::str("1"));
    manifest.set("pipeline", JsonValue::str(pipeline));
    manifest.set("code_version", JsonValue::str(SQLAB_VERSION));
    manifest.set("seed", JsonValue::uint(doc.seed));
    manifest.set("threads_cap", JsonValue::uint(options.max_threads));
    JsonValue consts = JsonValue::object();
    consts.set("hbar_J_s", JsonValue::num(constants::hbar));
    consts.set("c_m_per_s", JsonValue::num(constants::c_light));
    consts.set("mu_bohr_J_per_T", JsonValue::num(constants::mu_bohr));
    manifest.set("constants", std::move(consts));
    manifest.set("config_snapshot", JsonValue::str(read_file(options.config_path)));
    if (doc.pipeline == Pipeline::witness && doc.witness.forced_phases) {
      JsonValue notes = JsonValue::array();
      notes.push(JsonValue::str(
          "branch phases taken directly from the configuration; epsilon_r "
          "was not used to derive them"));
      manifest.set("notes", std::move(notes));
    }
    JsonValue outputs = JsonValue::array();
    for (const auto& artifact : artifacts) {
      JsonValue entry = JsonValue::object();
      entry.set("file", JsonValue::str(artifact.name));
      entry.set("bytes", JsonValue::uint(artifact.bytes.size()));
      entry.set("sha256", JsonValue::str(sha256_hex(artifact.bytes)));
      outputs.push(std::move(entry));
    }
    manifest.set("outputs", std::move(outputs));
    manifest.set("duration_seconds", JsonValue::num(duration));
    manifest.set("written_utc", JsonValue::str(utc_timestamp()));
    write_file(out_dir / "run_manifest.json", dump_json(manifest));
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace sqlab
