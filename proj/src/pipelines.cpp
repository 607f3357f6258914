#include "sqlab/pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <thread>

#include "sqlab/constants.hpp"
#include "sqlab/rng.hpp"

namespace sqlab {

namespace {

constexpr double pi = 3.14159265358979323846;
const cplx I{0.0, 1.0};

std::vector<WeightedEffect> projective_effects(const ComplexMatrix& setting) {
  const ComplexMatrix id = ComplexMatrix::identity(2);
  return {{(id + setting) * cplx{0.5, 0.0}, 1.0},
          {(id - setting) * cplx{0.5, 0.0}, -1.0}};
}

std::vector<WeightedEffect> window_effects(PauliAxis axis, const PhaseWindow& w) {
  const PovmPair pair = povm_pair(axis, w);
  return {{pair.plus, 1.0}, {pair.minus, -1.0}, {pair.miss, 0.0}};
}

std::vector<WeightedEffect> sign_effects(double epsilon) {
  const auto ops = z_outcome_operators(epsilon);
  return {{ops.first, 1.0}, {ops.second, -1.0}};
}

}  // namespace

// ---------------------------------------------------------------- witness

void validate(const CasimirConfig& config) {
  if (!(config.radius > 0.0) || !(config.distance > 0.0) ||
      !(config.mass > 0.0) || !(config.sigma_d > 0.0))
    throw std::invalid_argument("witness config needs positive R, D, mass, sigma_d");
  if (!(config.separation >= 0.0) || !(config.tau >= 0.0))
    throw std::invalid_argument("witness config needs nonnegative d and tau");
  if (!(config.epsilon_r > 0.0))
    throw std::invalid_argument("witness config needs epsilon_r > 0");
  if (!(config.gamma >= 0.0) || !(config.delay >= 0.0))
    throw std::invalid_argument("witness config needs nonnegative gamma and delay");
  if (!(config.distance - config.separation > 2.0 * config.radius))
    throw std::invalid_argument("witness geometry invalid: D - d must exceed 2R");
  validate(PhaseWindow{config.window});
}

double casimir_constant(double epsilon_r) {
  if (!(epsilon_r > 0.0)) throw std::invalid_argument("epsilon_r must be positive");
  const double ratio = (epsilon_r - 1.0) / (epsilon_r + 2.0);
  return 23.0 * constants::c_light / (4.0 * pi) * ratio * ratio;
}

CasimirPhases casimir_phases(const CasimirConfig& config) {
  validate(config);
  const double k = casimir_constant(config.epsilon_r);
  const double r6 = std::pow(config.radius, 6.0);
  const auto phase_at = [&](double dist) {
    return k * r6 * config.tau / std::pow(dist, 7.0);
  };
  CasimirPhases p;
  p.phi = phase_at(config.distance);
  p.dphi01 = phase_at(config.distance + config.separation) - p.phi;
  p.dphi10 = phase_at(config.distance - config.separation) - p.phi;
  return p;
}

WitnessReport run_casimir_witness(const CasimirConfig& config, std::size_t shots,
                                  std::uint64_t seed) {
  validate(config);
  WitnessReport report;
  report.phases = casimir_phases(config);
  if (config.forced_phases) {
    report.phases.dphi01 = config.forced_phases->first;
    report.phases.dphi10 = config.forced_phases->second;
  }
  report.gamma_t = config.gamma * config.tau;
  const PhaseWindow w{config.window};

  const auto evaluate = [&](double dphi01, double dphi10, double gamma_t) {
    const DensityMatrix pure = casimir_entangled_state(dphi01, dphi10);
    const DensityMatrix mixed = dephase(pure, gamma_t, QubitSlot::both);
    const double matrix = expectation(mixed, witness_operator(w));
    const double closed = witness_analytic(dphi01, dphi10, gamma_t, w);
    if (std::abs(matrix - closed) > 1e-10)
      throw std::runtime_error("witness paths disagree beyond 1e-10");
    return std::pair<double, DensityMatrix>{matrix, mixed};
  };

  const auto base = evaluate(report.phases.dphi01, report.phases.dphi10,
                             report.gamma_t);
  report.witness_matrix = base.first;
  report.witness_closed_form = witness_analytic(report.phases.dphi01,
                                                report.phases.dphi10,
                                                report.gamma_t, w);
  report.agreement = std::abs(report.witness_matrix - report.witness_closed_form);

  // concurrence of the pure state: |sin((dphi01 + dphi10)/2)|
  report.concurrence =
      std::abs(std::sin(0.5 * (report.phases.dphi01 + report.phases.dphi10)));

  // delay penalty: phases keep accumulating over tau + delay; dephasing
  // continues only when explicitly enabled
  const double stretch = config.tau > 0.0
                             ? (config.tau + config.delay) / config.tau
                             : 1.0;
  const double delayed_gamma_t = config.dephase_during_delay
                                     ? config.gamma * (config.tau + config.delay)
                                     : report.gamma_t;
  report.delayed_witness = evaluate(report.phases.dphi01 * stretch,
                                    report.phases.dphi10 * stretch,
                                    delayed_gamma_t)
                               .first;
  if (report.witness_matrix != 0.0)
    report.delay_rel_change = std::abs(report.delayed_witness) /
                                  std::abs(report.witness_matrix) -
                              1.0;

  if (shots > 0) {
    const DensityMatrix& mixed = base.second;
    const auto x_eff = window_effects(PauliAxis::x, w);
    const auto y_eff = window_effects(PauliAxis::y, w);
    // half-line occupancy readout is treated as sharp here; finite-time
    // leakage lives in the codec sampling layer
    const auto z_eff = sign_effects(0.0);
    McBlock mc;
    mc.enabled = true;
    mc.shots = shots;
    mc.seed = seed;
    mc.term_names = {"xx", "zy", "yz"};
    const EstimatorPair exx = sample_product_correlator(
        mixed.rho, x_eff, x_eff, shots, substream(seed, 0).next());
    const EstimatorPair ezy = sample_product_correlator(
        mixed.rho, z_eff, y_eff, shots, substream(seed, 1).next());
    const EstimatorPair eyz = sample_product_correlator(
        mixed.rho, y_eff, z_eff, shots, substream(seed, 2).next());
    mc.term_values = {exx.raw, ezy.raw, eyz.raw};
    mc.term_ses = {exx.raw_se, ezy.raw_se, eyz.raw_se};
    mc.value = 1.0 - exx.raw - ezy.raw - eyz.raw;
    mc.se = std::sqrt(exx.raw_se * exx.raw_se + ezy.raw_se * ezy.raw_se +
                      eyz.raw_se * eyz.raw_se);
    report.mc = mc;
  }
  return report;
}

// ------------------------------------------------------------------- chsh

void validate(const SternGerlachConfig& config) {
  if (!(config.mass > 0.0) || !(config.mu > 0.0) || !(config.t_prep > 0.0) ||
      !(config.sigma_d > 0.0))
    throw std::invalid_argument("chsh config needs positive mass, mu, t_prep, sigma_d");
  if (!(config.gradient >= 0.0))
    throw std::invalid_argument("chsh config needs nonnegative gradient");
  if (!(config.gamma >= 0.0))
    throw std::invalid_argument("chsh config needs nonnegative gamma");
  validate(PhaseWindow{config.window});
}

double sg_separation(const SternGerlachConfig& config) {
  validate(config);
  const double a = config.mu * config.gradient / config.mass;
  return a * config.t_prep * config.t_prep;
}

ChshReport run_sg_chsh(const SternGerlachConfig& config, std::size_t shots,
                       std::uint64_t seed) {
  validate(config);
  ChshReport report;
  report.separation = sg_separation(config);
  if (!(report.separation > 0.0))
    throw std::invalid_argument("chsh run needs a nonzero packet separation");
  report.t_xy = overlap_time(config.sigma_d, config.mass, report.separation);
  report.gamma_t = config.gamma * report.t_xy;
  report.delta_theta = config.window;
  const PhaseWindow w{config.window};
  report.g = g_factor(config.window);

  const DensityMatrix pure = sg_entangled_state();
  const DensityMatrix mixed = dephase(pure, report.gamma_t, QubitSlot::second);
  const ChshSettings settings = chsh_settings(w);
  report.chsh_matrix = chsh_value(mixed, settings.a, settings.a_prime,
                                  settings.b, settings.b_prime);
  report.chsh_closed_form = chsh_analytic(config.window, report.gamma_t);
  report.agreement = std::abs(report.chsh_matrix - report.chsh_closed_form);
  if (report.agreement > 1e-12)
    throw std::runtime_error("chsh paths disagree beyond 1e-12");
  report.margin_over_2 = report.chsh_matrix - 2.0;
  report.threshold = chsh_threshold();
  report.window_budget = report.threshold - config.window;

  if (shots > 0) {
    const auto a_eff = projective_effects(settings.a);
    const auto ap_eff = projective_effects(settings.a_prime);
    const auto b_eff = window_effects(PauliAxis::x, w);
    const auto bp_eff = window_effects(PauliAxis::y, w);
    McBlock mc;
    mc.enabled = true;
    mc.shots = shots;
    mc.seed = seed;
    mc.term_names = {"ab", "abp", "apb", "apbp"};
    const EstimatorPair c1 = sample_product_correlator(
        mixed.rho, a_eff, b_eff, shots, substream(seed, 0).next());
    const EstimatorPair c2 = sample_product_correlator(
        mixed.rho, a_eff, bp_eff, shots, substream(seed, 1).next());
    const EstimatorPair c3 = sample_product_correlator(
        mixed.rho, ap_eff, b_eff, shots, substream(seed, 2).next());
    const EstimatorPair c4 = sample_product_correlator(
        mixed.rho, ap_eff, bp_eff, shots, substream(seed, 3).next());
    mc.term_values = {c1.raw, c2.raw, c3.raw, c4.raw};
    mc.term_ses = {c1.raw_se, c2.raw_se, c3.raw_se, c4.raw_se};
    mc.value = c1.raw + c2.raw + c3.raw - c4.raw;
    mc.se = std::sqrt(c1.raw_se * c1.raw_se + c2.raw_se * c2.raw_se +
                      c3.raw_se * c3.raw_se + c4.raw_se * c4.raw_se);
    report.mc = mc;
  }
  return report;
}

// ------------------------------------------------------------ feasibility

FeasibilityReport feasibility(const FeasibilityInput& input) {
  if (!(input.mass > 0.0) || !(input.sigma_d > 0.0) || !(input.separation > 0.0))
    throw std::invalid_argument("feasibility needs positive mass, sigma_d, separation");
  if (!(input.delta_x > 0.0) || !(input.delta_t >= 0.0))
    throw std::invalid_argument("feasibility needs delta_x > 0 and delta_t >= 0");
  FeasibilityReport report;
  report.t_xy = overlap_time(input.sigma_d, input.mass, input.separation);
  report.t_z_max = 0.1 * report.t_xy;
  report.fringe_spacing = 2.0 * pi * constants::hbar * report.t_xy /
                          (input.mass * input.separation);
  const EncodingSpec spec{input.separation, input.sigma_d, input.mass, 1.0};
  const DetectorSpec central{DetectorKind::theta_detector, 0.0, report.t_xy,
                             input.delta_x, input.delta_t, "central"};
  report.delta_theta = delta_theta_of(spec, central).delta_theta;
  report.chsh_threshold = chsh_threshold();
  report.witness_window_limit = witness_window_limit();
  report.chsh_feasible = report.delta_theta < report.chsh_threshold;
  report.witness_window_ok = report.delta_theta < report.witness_window_limit;
  return report;
}

// --------------------------------------------------- detector equivalence

BeamSplitterReport beam_splitter_equivalence(double theta0, double theta1) {
  const double diff = std::fmod(theta1 - theta0, 2.0 * pi);
  if (std::abs(diff) < 1e-12 || std::abs(std::abs(diff) - 2.0 * pi) < 1e-12)
    throw std::invalid_argument("detector angles coincide; transformation singular");
  BeamSplitterReport report;
  const double inv = 1.0 / std::sqrt(2.0);
  report.matrix = ComplexMatrix::from_rows(
      {{cplx{inv, 0.0}, inv * std::exp(-I * theta0)},
       {cplx{inv, 0.0}, inv * std::exp(-I * theta1)}});

  const ComplexMatrix gram =
      report.matrix * report.matrix.adjoint() - ComplexMatrix::identity(2);
  report.unitarity_defect = gram.max_abs();

  // reference: 50:50 splitter composed with a quarter-wave phase, the
  // detector pair at (-pi/2, +pi/2)
  const ComplexMatrix reference = ComplexMatrix::from_rows(
      {{cplx{inv, 0.0}, cplx{0.0, inv}}, {cplx{inv, 0.0}, cplx{0.0, -inv}}});
  double worst = 0.0;
  for (std::size_t r = 0; r < 2; ++r) {
    const cplx anchor = report.matrix.at(r, 0);
    const cplx phase = reference.at(r, 0) / anchor;
    for (std::size_t col = 0; col < 2; ++col) {
      worst = std::max(worst,
                       std::abs(phase * report.matrix.at(r, col) -
                                reference.at(r, col)));
    }
  }
  report.balanced_match = worst;
  report.overlap_mod = std::abs(std::cos(0.5 * (theta1 - theta0)));
  return report;
}

// ------------------------------------------------------------------ sweep

SweepTable sweep_grid(const SweepSpec& spec,
                      const std::vector<std::string>& value_columns,
                      const std::function<std::vector<double>(
                          const std::vector<double>&)>& eval,
                      unsigned max_threads) {
  if (spec.axes.size() > 2)
    throw std::invalid_argument("sweep supports at most two axes");
  for (const auto& axis : spec.axes) {
    if (axis.count < 1 || axis.count > 10000)
      throw std::invalid_argument("sweep axis " + axis.name +
                                  " needs 1..10000 points");
    if (axis.name.empty()) throw std::invalid_argument("sweep axis needs a name");
  }

  std::vector<std::vector<double>> grids;
  std::size_t total = 1;
  for (const auto& axis : spec.axes) {
    std::vector<double> values(axis.count);
    if (axis.count == 1) {
      values[0] = axis.lo;
    } else {
      const double step = (axis.hi - axis.lo) / static_cast<double>(axis.count - 1);
      for (std::size_t i = 0; i < axis.count; ++i)
        values[i] = axis.lo + step * static_cast<double>(i);
      values.back() = axis.hi;
    }
    total *= axis.count;
    grids.push_back(std::move(values));
  }

  SweepTable table;
  for (const auto& axis : spec.axes) table.columns.push_back(axis.name);
  for (const auto& name : value_columns) table.columns.push_back(name);
  table.rows.assign(total, std::vector<double>());
  table.row_errors.assign(total, std::string());

  const auto run_row = [&](std::size_t row) {
    std::vector<double> point(spec.axes.size());
    std::size_t rem = row;
    for (std::size_t ax = spec.axes.size(); ax-- > 0;) {
      point[ax] = grids[ax][rem % grids[ax].size()];
      rem /= grids[ax].size();
    }
    std::vector<double>& out = table.rows[row];
    out = point;
    try {
      const std::vector<double> values = eval(point);
      if (values.size() != value_columns.size())
        throw std::runtime_error("sweep row produced a short value list");
      out.insert(out.end(), values.begin(), values.end());
    } catch (const std::exception& e) {
      std::string where;
      for (std::size_t ax = 0; ax < spec.axes.size(); ++ax) {
        if (!where.empty()) where += ", ";
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.9g", point[ax]);
        where += spec.axes[ax].name + "=" + buf;
      }
      table.row_errors[row] = where.empty() ? e.what() : where + ": " + e.what();
      out.resize(spec.axes.size() + value_columns.size(),
                 std::numeric_limits<double>::quiet_NaN());
    }
  };

  unsigned threads = max_threads == 0 ? std::thread::hardware_concurrency()
                                      : max_threads;
  if (threads == 0) threads = 1;
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, std::max<std::size_t>(total, 1)));
  if (threads <= 1 || total < 2) {
    for (std::size_t row = 0; row < total; ++row) run_row(row);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t]() {
        for (std::size_t row = t; row < total; row += threads) run_row(row);
      });
    }
    for (auto& th : pool) th.join();
  }
  return table;
}

SweepTable sweep_chsh(const SternGerlachConfig& base, const SweepSpec& spec,
                      unsigned max_threads) {
  for (const auto& axis : spec.axes)
    if (axis.name != "delta_theta_rad" && axis.name != "gamma_per_s")
      throw std::invalid_argument("chsh sweep axis must be delta_theta_rad or "
                                  "gamma_per_s, got " + axis.name);
  const auto eval = [&base, &spec](const std::vector<double>& point) {
    SternGerlachConfig config = base;
    for (std::size_t ax = 0; ax < spec.axes.size(); ++ax) {
      if (spec.axes[ax].name == "delta_theta_rad") config.window = point[ax];
      else config.gamma = point[ax];
    }
    const ChshReport r = run_sg_chsh(config, 0, 0);
    return std::vector<double>{r.delta_theta, r.gamma_t, r.chsh_matrix};
  };
  SweepTable table = sweep_grid(spec, {"delta_theta_rad", "gamma_t", "chsh_value"},
                                eval, max_threads);
  // axis columns duplicate report columns here; keep only the report ones
  table.columns.erase(table.columns.begin(),
                      table.columns.begin() + static_cast<long>(spec.axes.size()));
  for (auto& row : table.rows)
    row.erase(row.begin(), row.begin() + static_cast<long>(spec.axes.size()));
  return table;
}

SweepTable sweep_witness(const CasimirConfig& base, const SweepSpec& spec,
                         unsigned max_threads) {
  for (const auto& axis : spec.axes)
    if (axis.name != "tau_s" && axis.name != "gamma_per_s")
      throw std::invalid_argument("witness sweep axis must be tau_s or "
                                  "gamma_per_s, got " + axis.name);
  const auto eval = [&base, &spec](const std::vector<double>& point) {
    CasimirConfig config = base;
    for (std::size_t ax = 0; ax < spec.axes.size(); ++ax) {
      if (spec.axes[ax].name == "tau_s") config.tau = point[ax];
      else config.gamma = point[ax];
    }
    // forced phases are pinned at the base tau; interaction phases grow
    // linearly with tau, so rescale them along a tau axis
    if (base.forced_phases && base.tau > 0.0 && config.tau != base.tau) {
      const double scale = config.tau / base.tau;
      config.forced_phases = {base.forced_phases->first * scale,
                              base.forced_phases->second * scale};
    }
    const WitnessReport r = run_casimir_witness(config, 0, 0);
    return std::vector<double>{config.tau, r.gamma_t, r.witness_matrix};
  };
  SweepTable table = sweep_grid(spec, {"tau_s", "gamma_t", "witness_value"},
                                eval, max_threads);
  table.columns.erase(table.columns.begin(),
                      table.columns.begin() + static_cast<long>(spec.axes.size()));
  for (auto& row : table.rows)
    row.erase(row.begin(), row.begin() + static_cast<long>(spec.axes.size()));
  return table;
}

SweepTable sweep_feasibility(const FeasibilityInput& base, const SweepSpec& spec,
                             unsigned max_threads) {
  for (const auto& axis : spec.axes)
    if (axis.name != "delta_x_m" && axis.name != "delta_t_s")
      throw std::invalid_argument("feasibility sweep axis must be delta_x_m or "
                                  "delta_t_s, got " + axis.name);
  const auto eval = [&base, &spec](const std::vector<double>& point) {
    FeasibilityInput input = base;
    for (std::size_t ax = 0; ax < spec.axes.size(); ++ax) {
      if (spec.axes[ax].name == "delta_x_m") input.delta_x = point[ax];
      else input.delta_t = point[ax];
    }
    const FeasibilityReport r = feasibility(input);
    return std::vector<double>{input.delta_x, input.delta_t, r.delta_theta};
  };
  SweepTable table = sweep_grid(spec, {"delta_x_m", "delta_t_s", "delta_theta_rad"},
                                eval, max_threads);
  table.columns.erase(table.columns.begin(),
                      table.columns.begin() + static_cast<long>(spec.axes.size()));
  for (auto& row : table.rows)
    row.erase(row.begin(), row.begin() + static_cast<long>(spec.axes.size()));
  return table;
}

}  // namespace sqlab
