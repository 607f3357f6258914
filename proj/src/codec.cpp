#include "sqlab/codec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sqlab/constants.hpp"
#include "sqlab/rng.hpp"

namespace sqlab {

namespace {

constexpr double pi = 3.14159265358979323846;
const cplx I{0.0, 1.0};

double wrap_angle(double th) {
  double w = std::fmod(th, 2.0 * pi);
  if (w <= -pi) w += 2.0 * pi;
  if (w > pi) w -= 2.0 * pi;
  return w;
}

void require_normalized(cplx alpha, cplx beta) {
  const double n = std::norm(alpha) + std::norm(beta);
  if (std::abs(n - 1.0) > 1e-9)
    throw std::invalid_argument("qubit amplitudes must be normalized");
}

double trace_product_real(const ComplexMatrix& a, const ComplexMatrix& b) {
  cplx tr{0.0, 0.0};
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) tr += a.at(i, j) * b.at(j, i);
  return tr.real();
}

}  // namespace

void validate(const EncodingSpec& spec) {
  if (!(spec.d > 0.0) || !(spec.sigma_d > 0.0) || !(spec.mass > 0.0))
    throw std::invalid_argument("encoding needs positive d, sigma_d, mass");
  if (!(spec.min_ratio > 0.0))
    throw std::invalid_argument("encoding ratio floor must be positive");
  if (spec.d < spec.min_ratio * spec.sigma_d)
    throw std::invalid_argument("packet separation below the fidelity floor d >= " +
                                std::to_string(spec.min_ratio) + " sigma_d");
}

SpatialState encode(const EncodingSpec& spec, cplx alpha, cplx beta, double t) {
  validate(spec);
  require_normalized(alpha, beta);
  if (!(t >= 0.0)) throw std::invalid_argument("encode time must be nonnegative");
  GaussianPacket left{alpha, -spec.d / 2.0, 0.0, spec.sigma_d, spec.mass, t};
  GaussianPacket right{beta, spec.d / 2.0, 0.0, spec.sigma_d, spec.mass, t};
  return SpatialState{{left, right}};
}

double theta_of_x(const EncodingSpec& spec, double x, double t) {
  validate(spec);
  if (!(t > 0.0)) throw std::invalid_argument("phase angle needs t > 0");
  return x * spec.mass * spec.d / (constants::hbar * t);
}

double x_of_theta(const EncodingSpec& spec, double theta, double t) {
  validate(spec);
  if (!(t > 0.0)) throw std::invalid_argument("phase angle needs t > 0");
  return theta * constants::hbar * t / (spec.mass * spec.d);
}

double detection_probability(const EncodingSpec& spec, cplx alpha, cplx beta,
                             double theta, double t) {
  validate(spec);
  require_normalized(alpha, beta);
  if (!(t > 0.0)) throw std::invalid_argument("detection density needs t > 0");
  const double k = theta / spec.d;
  const double env = std::exp(-2.0 * k * k * spec.sigma_d * spec.sigma_d);
  const cplx cross_amp = std::conj(alpha) * beta * std::exp(-I * theta);
  const double cross = std::max(0.0, 1.0 + 2.0 * cross_amp.real());
  const double overlap = std::exp(-spec.d * spec.d /
                                  (8.0 * spec.sigma_d * spec.sigma_d));
  const double norm = (constants::hbar * t / (spec.mass * spec.sigma_d)) *
                      std::sqrt(pi / 2.0) *
                      (1.0 + 2.0 * (std::conj(alpha) * beta).real() * overlap);
  return env * cross / norm;
}

void validate(const DetectorSpec& det) {
  if (det.kind == DetectorKind::theta_detector) {
    if (!(det.delta_x > 0.0))
      throw std::invalid_argument("theta detector needs delta_x > 0");
    if (!(det.delta_t >= 0.0))
      throw std::invalid_argument("theta detector needs delta_t >= 0");
    if (!(det.t_meas > 0.0))
      throw std::invalid_argument("theta detector needs t_meas > 0");
  } else {
    if (!(det.t_meas >= 0.0))
      throw std::invalid_argument("z detector needs t_meas >= 0");
    if (det.x_center == 0.0)
      throw std::invalid_argument("z detector needs a signed x_center");
  }
}

PhaseWindow delta_theta_of(const EncodingSpec& spec, const DetectorSpec& det) {
  validate(spec);
  validate(det);
  if (det.kind != DetectorKind::theta_detector)
    throw std::invalid_argument("phase blur is undefined for a z detector");
  const double md_over_ht = spec.mass * spec.d / (constants::hbar * det.t_meas);
  const double blur = md_over_ht * det.delta_x -
                      det.x_center * md_over_ht * det.delta_t / det.t_meas;
  PhaseWindow w{std::abs(blur)};
  validate(w);
  return w;
}

PovmPair povm_pair(PauliAxis axis, const PhaseWindow& window) {
  if (axis == PauliAxis::z)
    throw std::invalid_argument("windowed pair covers axes x and y; use the "
                                "sign-of-position operators for z");
  validate(window);
  PovmPair pair;
  pair.axis = axis;
  pair.g = g_factor(window.delta_theta);
  const ComplexMatrix id = ComplexMatrix::identity(2);
  const ComplexMatrix sig = pauli(axis);
  pair.plus = (id + sig) * cplx{pair.g / 2.0, 0.0};
  pair.minus = (id - sig) * cplx{pair.g / 2.0, 0.0};
  pair.miss = id * cplx{1.0 - pair.g, 0.0};
  return pair;
}

std::pair<ComplexMatrix, ComplexMatrix> z_outcome_operators(double epsilon) {
  if (!(epsilon >= 0.0) || !(epsilon <= 0.5))
    throw std::invalid_argument("leakage must lie in [0, 1/2]");
  const ComplexMatrix left = ComplexMatrix::from_rows(
      {{cplx{1.0 - epsilon, 0.0}, cplx{0.0, 0.0}},
       {cplx{0.0, 0.0}, cplx{epsilon, 0.0}}});
  const ComplexMatrix right = ComplexMatrix::from_rows(
      {{cplx{epsilon, 0.0}, cplx{0.0, 0.0}},
       {cplx{0.0, 0.0}, cplx{1.0 - epsilon, 0.0}}});
  return {left, right};
}

std::pair<ComplexMatrix, ComplexMatrix> z_outcome_operators(
    double t_z, const EncodingSpec& spec) {
  validate(spec);
  if (!(t_z >= 0.0)) throw std::invalid_argument("z readout time must be nonnegative");
  return z_outcome_operators(leakage_epsilon(spec.d, spec.sigma_d, spec.mass, t_z));
}

std::vector<DetectorSpec> canonical_pair(PauliAxis axis, const EncodingSpec& spec,
                                         double t_meas, double delta_x,
                                         double delta_t) {
  validate(spec);
  std::vector<DetectorSpec> dets(2);
  if (axis == PauliAxis::z) {
    dets[0] = {DetectorKind::z_detector, -spec.d / 2.0, t_meas, delta_x, delta_t,
               "z_left"};
    dets[1] = {DetectorKind::z_detector, spec.d / 2.0, t_meas, delta_x, delta_t,
               "z_right"};
  } else {
    const bool is_x = axis == PauliAxis::x;
    const double plus_theta = is_x ? 0.0 : pi / 2.0;
    const double minus_theta = is_x ? pi : -pi / 2.0;
    dets[0] = {DetectorKind::theta_detector, x_of_theta(spec, plus_theta, t_meas),
               t_meas, delta_x, delta_t, is_x ? "x_plus" : "y_plus"};
    dets[1] = {DetectorKind::theta_detector, x_of_theta(spec, minus_theta, t_meas),
               t_meas, delta_x, delta_t, is_x ? "x_minus" : "y_minus"};
  }
  validate(dets[0]);
  validate(dets[1]);
  return dets;
}

namespace {

struct PairLayout {
  PauliAxis axis = PauliAxis::x;
  std::size_t plus_index = 0;   // detector with outcome value +1
  std::size_t minus_index = 1;
  PhaseWindow window{0.0};
  double t_meas = 0.0;
};

PairLayout classify_pair(const EncodingSpec& spec,
                         const std::vector<DetectorSpec>& dets) {
  if (dets.size() != 2)
    throw std::invalid_argument("sampling needs exactly two detectors");
  validate(dets[0]);
  validate(dets[1]);
  if (dets[0].kind != dets[1].kind)
    throw std::invalid_argument("sampling detectors must share a kind");
  PairLayout layout;
  layout.t_meas = dets[0].t_meas;
  if (dets[0].kind == DetectorKind::z_detector) {
    layout.axis = PauliAxis::z;
    if (dets[0].x_center * dets[1].x_center >= 0.0)
      throw std::invalid_argument("z detectors must cover opposite half-lines");
    layout.plus_index = dets[0].x_center < 0.0 ? 0 : 1;
    layout.minus_index = 1 - layout.plus_index;
    return layout;
  }
  if (dets[0].t_meas != dets[1].t_meas)
    throw std::invalid_argument("theta detectors must share a readout time");
  const double th0 = wrap_angle(theta_of_x(spec, dets[0].x_center, dets[0].t_meas));
  const double th1 = wrap_angle(theta_of_x(spec, dets[1].x_center, dets[1].t_meas));
  const double tol = 1e-9;
  auto near = [tol](double a, double b) { return std::abs(a - b) < tol; };
  if ((near(th0, 0.0) && near(std::abs(th1), pi)) ||
      (near(th1, 0.0) && near(std::abs(th0), pi))) {
    layout.axis = PauliAxis::x;
    layout.plus_index = near(th0, 0.0) ? 0 : 1;
  } else if ((near(th0, pi / 2.0) && near(th1, -pi / 2.0)) ||
             (near(th1, pi / 2.0) && near(th0, -pi / 2.0))) {
    layout.axis = PauliAxis::y;
    layout.plus_index = near(th0, pi / 2.0) ? 0 : 1;
  } else {
    throw std::invalid_argument("theta detectors must sit at the canonical "
                                "sites {0, pi} or {+pi/2, -pi/2}");
  }
  layout.minus_index = 1 - layout.plus_index;
  const PhaseWindow w0 = delta_theta_of(spec, dets[0]);
  const PhaseWindow w1 = delta_theta_of(spec, dets[1]);
  if (std::abs(w0.delta_theta - w1.delta_theta) > 1e-12)
    throw std::invalid_argument("theta detectors must share a phase window");
  layout.window = w0;
  return layout;
}

EstimatorPair finalize_counts(std::size_t plus, std::size_t minus,
                              std::size_t miss, std::size_t shots) {
  EstimatorPair e;
  e.plus_count = plus;
  e.minus_count = minus;
  e.miss_count = miss;
  e.shots = shots;
  const std::size_t hits = plus + minus;
  if (hits == 0)
    throw std::runtime_error("no detector hits; conditioned estimator undefined");
  const double ns = static_cast<double>(shots);
  const double nh = static_cast<double>(hits);
  e.raw = (static_cast<double>(plus) - static_cast<double>(minus)) / ns;
  e.conditioned = (static_cast<double>(plus) - static_cast<double>(minus)) / nh;
  const double raw_var = std::max(0.0, nh / ns - e.raw * e.raw);
  e.raw_se = std::sqrt(raw_var / ns);
  e.cond_se = std::sqrt(std::max(0.0, 1.0 - e.conditioned * e.conditioned) / nh);
  return e;
}

}  // namespace

SamplingRun sample_measurements(const ComplexMatrix& rho2,
                                const std::vector<DetectorSpec>& detectors,
                                const EncodingSpec& spec, std::size_t shots,
                                std::uint64_t seed, bool keep_records) {
  if (rho2.dim() != 2) throw std::invalid_argument("qubit sampling needs a 2x2 state");
  if (shots < 1) throw std::invalid_argument("sampling needs at least one shot");
  const PairLayout layout = classify_pair(spec, detectors);

  double p_plus = 0.0;
  double p_minus = 0.0;
  if (layout.axis == PauliAxis::z) {
    const auto ops = z_outcome_operators(layout.t_meas, spec);
    p_plus = trace_product_real(ops.first, rho2);
    p_minus = trace_product_real(ops.second, rho2);
  } else {
    const PovmPair pair = povm_pair(layout.axis, layout.window);
    p_plus = trace_product_real(pair.plus, rho2);
    p_minus = trace_product_real(pair.minus, rho2);
  }
  p_plus = std::clamp(p_plus, 0.0, 1.0);
  p_minus = std::clamp(p_minus, 0.0, 1.0);
  if (p_plus + p_minus > 1.0 + 1e-9)
    throw std::runtime_error("outcome probabilities exceed one");

  SplitMix64 outcome_rng = substream(seed, 0);
  SplitMix64 position_rng = substream(seed, 1);
  SamplingRun run;
  if (keep_records) run.records.reserve(shots);
  std::size_t n_plus = 0;
  std::size_t n_minus = 0;
  std::size_t n_miss = 0;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t s = 0; s < shots; ++s) {
    const double u = outcome_rng.uniform();
    const double jitter = position_rng.uniform() - 0.5;
    int outcome = 0;
    std::string id = "miss";
    double position = nan;
    if (u < p_plus) {
      outcome = 1;
      ++n_plus;
    } else if (u < p_plus + p_minus) {
      outcome = -1;
      ++n_minus;
    } else {
      ++n_miss;
    }
    if (outcome != 0) {
      const DetectorSpec& det =
          detectors[outcome == 1 ? layout.plus_index : layout.minus_index];
      id = det.id;
      position = det.x_center + det.delta_x * jitter;
    }
    if (keep_records) run.records.push_back({s, id, outcome, position});
  }
  run.estimate = finalize_counts(n_plus, n_minus, n_miss, shots);
  return run;
}

SamplingRun sample_measurements(const EncodingSpec& spec, cplx alpha, cplx beta,
                                const std::vector<DetectorSpec>& detectors,
                                std::size_t shots, std::uint64_t seed,
                                bool keep_records) {
  require_normalized(alpha, beta);
  if (shots < 1) throw std::invalid_argument("sampling needs at least one shot");
  const PairLayout layout = classify_pair(spec, detectors);
  const double t = layout.t_meas;
  if (!(t > 0.0))
    throw std::invalid_argument("wavepacket sampling needs a positive readout time");
  const SpatialState state = encode(spec, alpha, beta, t);

  const double sigma_t = evolved_width(spec.sigma_d, spec.mass, t);
  const double half_span = spec.d / 2.0 + 10.0 * sigma_t;
  const std::size_t n = 1u << 16;
  const double dx = 2.0 * half_span / static_cast<double>(n - 1);
  std::vector<double> cdf(n, 0.0);
  double prev = state.density(-half_span);
  for (std::size_t j = 1; j < n; ++j) {
    const double x = -half_span + dx * static_cast<double>(j);
    const double cur = state.density(x);
    cdf[j] = cdf[j - 1] + 0.5 * (prev + cur) * dx;
    prev = cur;
  }
  const double total = cdf.back();
  if (!(total > 0.0)) throw std::runtime_error("detection density integrates to zero");
  for (auto& v : cdf) v /= total;

  SplitMix64 rng = substream(seed, 2);
  SamplingRun run;
  if (keep_records) run.records.reserve(shots);
  std::size_t n_plus = 0;
  std::size_t n_minus = 0;
  std::size_t n_miss = 0;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t s = 0; s < shots; ++s) {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t hi = static_cast<std::size_t>(it - cdf.begin());
    if (hi == 0) hi = 1;
    if (hi >= n) hi = n - 1;
    const double c0 = cdf[hi - 1];
    const double c1 = cdf[hi];
    const double frac = c1 > c0 ? (u - c0) / (c1 - c0) : 0.5;
    const double x = -half_span + dx * (static_cast<double>(hi - 1) + frac);

    int outcome = 0;
    std::string id = "miss";
    if (layout.axis == PauliAxis::z) {
      const bool left = x < 0.0;
      const std::size_t idx = left ? layout.plus_index : layout.minus_index;
      outcome = left ? 1 : -1;
      id = detectors[idx].id;
    } else {
      for (std::size_t di = 0; di < 2; ++di) {
        const DetectorSpec& det = detectors[di];
        if (std::abs(x - det.x_center) <= det.delta_x / 2.0) {
          outcome = di == layout.plus_index ? 1 : -1;
          id = det.id;
          break;
        }
      }
    }
    if (outcome == 1) ++n_plus;
    else if (outcome == -1) ++n_minus;
    else ++n_miss;
    if (keep_records)
      run.records.push_back({s, id, outcome, outcome == 0 ? nan : x});
  }
  run.estimate = finalize_counts(n_plus, n_minus, n_miss, shots);
  return run;
}

EstimatorPair sample_product_correlator(const ComplexMatrix& rho4,
                                        const std::vector<WeightedEffect>& first,
                                        const std::vector<WeightedEffect>& second,
                                        std::size_t shots, std::uint64_t seed) {
  if (rho4.dim() != 4)
    throw std::invalid_argument("product correlator needs a two-qubit state");
  if (first.empty() || second.empty())
    throw std::invalid_argument("effect lists must be nonempty");
  if (shots < 1) throw std::invalid_argument("sampling needs at least one shot");

  std::vector<double> probs;
  std::vector<double> values;
  probs.reserve(first.size() * second.size());
  double total = 0.0;
  for (const auto& a : first) {
    for (const auto& b : second) {
      const double p = trace_product_real(kron(a.op, b.op), rho4);
      if (p < -1e-9) throw std::runtime_error("negative joint outcome probability");
      const double pc = std::max(0.0, p);
      probs.push_back(pc);
      values.push_back(a.value * b.value);
      total += pc;
    }
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::runtime_error("effect lists are not complete: probabilities sum to " +
                             std::to_string(total));

  std::vector<double> cum(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cum[i] = acc;
  }
  cum.back() = 1.0;

  SplitMix64 rng(seed);
  std::size_t n_plus = 0;
  std::size_t n_minus = 0;
  std::size_t n_miss = 0;
  for (std::size_t s = 0; s < shots; ++s) {
    const double u = rng.uniform();
    const auto it = std::lower_bound(cum.begin(), cum.end(), u);
    const std::size_t idx = std::min(static_cast<std::size_t>(it - cum.begin()),
                                     cum.size() - 1);
    const double v = values[idx];
    if (v > 0.5) ++n_plus;
    else if (v < -0.5) ++n_minus;
    else ++n_miss;
  }
  return finalize_counts(n_plus, n_minus, n_miss, shots);
}

}  // namespace sqlab
