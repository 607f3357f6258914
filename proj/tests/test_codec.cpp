#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>

#include "sqlab/codec.hpp"
#include "sqlab/constants.hpp"
#include "sqlab/rng.hpp"

using namespace sqlab;

namespace {

constexpr double pi = 3.14159265358979323846;

// natural-unit spec: sigma_d = 1, d = 50 sigma_d, hbar / m = 1
EncodingSpec natural_spec() {
  EncodingSpec spec;
  spec.d = 50.0;
  spec.sigma_d = 1.0;
  spec.mass = constants::hbar;
  return spec;
}

ComplexMatrix pure_state(cplx alpha, cplx beta) {
  ComplexMatrix rho(2);
  rho.at(0, 0) = alpha * std::conj(alpha);
  rho.at(0, 1) = alpha * std::conj(beta);
  rho.at(1, 0) = beta * std::conj(alpha);
  rho.at(1, 1) = beta * std::conj(beta);
  return rho;
}

template <typename F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + h * i) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("encoding spec enforces the separation floor") {
  CHECK_NOTHROW(validate(natural_spec()));
  EncodingSpec tight = natural_spec();
  tight.d = 49.0;
  CHECK_THROWS_AS(validate(tight), std::invalid_argument);
  tight.min_ratio = 40.0;
  CHECK_NOTHROW(validate(tight));
  EncodingSpec junk = natural_spec();
  junk.mass = 0.0;
  CHECK_THROWS_AS(validate(junk), std::invalid_argument);
}

TEST_CASE("encode produces a normalized two-packet state") {
  const EncodingSpec spec = natural_spec();
  const cplx a{0.6, 0.0};
  const cplx b{0.0, 0.8};
  const SpatialState s = encode(spec, a, b, 30.0);
  CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.packets[0].center == doctest::Approx(-25.0));
  CHECK(s.packets[1].center == doctest::Approx(25.0));
  CHECK_THROWS_AS(encode(spec, cplx{1.0, 0.0}, cplx{1.0, 0.0}, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(encode(spec, a, b, -1.0), std::invalid_argument);
}

TEST_CASE("position to phase angle map") {
  const EncodingSpec spec = natural_spec();
  const double t_ov = overlap_time(spec.sigma_d, spec.mass, spec.d);
  CHECK(t_ov == doctest::Approx(100.0).epsilon(1e-14));
  // at the overlap time theta = x / (2 sigma_d)
  CHECK(theta_of_x(spec, 4.0 * pi, t_ov) == doctest::Approx(2.0 * pi).epsilon(1e-13));
  for (const double theta : {-2.0, 0.0, 0.77, 3.2})
    CHECK(theta_of_x(spec, x_of_theta(spec, theta, t_ov), t_ov) ==
          doctest::Approx(theta).epsilon(1e-13));
  CHECK_THROWS_AS(theta_of_x(spec, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("detection density peaks where the relative phase points") {
  const EncodingSpec spec = natural_spec();
  const double t = overlap_time(spec.sigma_d, spec.mass, spec.d);
  const cplx a{1.0 / std::sqrt(2.0), 0.0};
  const cplx b{0.0, 1.0 / std::sqrt(2.0)};  // (|0> + i|1>)/sqrt(2)

  // density proportional to (1 + sin theta): dark fringe at -pi/2
  const double bright = detection_probability(spec, a, b, pi / 2.0, t);
  const double dark = detection_probability(spec, a, b, -pi / 2.0, t);
  CHECK(dark < 1e-12 * bright);

  double best_theta = 0.0;
  double best = 0.0;
  for (int i = -400; i <= 400; ++i) {
    const double theta = i * pi / 400.0;
    const double p = detection_probability(spec, a, b, theta, t);
    if (p > best) {
      best = p;
      best_theta = theta;
    }
  }
  // envelope pulls the maximum slightly inward from +pi/2
  CHECK(std::abs(best_theta - pi / 2.0) < 0.02);
}

TEST_CASE("detection density integrates to one over position") {
  const EncodingSpec spec = natural_spec();
  const double t = overlap_time(spec.sigma_d, spec.mass, spec.d);
  SplitMix64 rng(909);
  for (int trial = 0; trial < 3; ++trial) {
    const double w = rng.uniform();
    const double chi = rng.uniform() * 2.0 * pi;
    const cplx a{std::sqrt(w), 0.0};
    const cplx b = std::sqrt(1.0 - w) * std::exp(cplx{0.0, chi});
    const auto density = [&](double x) {
      return detection_probability(spec, a, b, theta_of_x(spec, x, t), t);
    };
    CHECK(simpson(density, -400.0, 400.0, 80000) ==
          doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("phase blur of a detector window") {
  const EncodingSpec spec = natural_spec();
  const double t = overlap_time(spec.sigma_d, spec.mass, spec.d);
  DetectorSpec det{DetectorKind::theta_detector, 0.0, t, 0.4, 0.0, "probe"};
  // m d / (hbar t) = 1 / (2 sigma_d) here
  CHECK(delta_theta_of(spec, det).delta_theta == doctest::Approx(0.2).epsilon(1e-13));
  det.x_center = x_of_theta(spec, pi, t);
  det.delta_t = 0.05 * t;
  // timing blur adds x m d dt / (hbar t^2) = theta * dt / t
  CHECK(delta_theta_of(spec, det).delta_theta ==
        doctest::Approx(std::abs(0.2 - pi * 0.05)).epsilon(1e-12));
  DetectorSpec zdet{DetectorKind::z_detector, -1.0, t, 0.0, 0.0, "zl"};
  CHECK_THROWS_AS(delta_theta_of(spec, zdet), std::invalid_argument);
}

TEST_CASE("windowed povm pairs resolve the identity and scale by g") {
  SplitMix64 rng(5522);
  for (int trial = 0; trial < 100; ++trial) {
    const double dt = rng.uniform() * 6.2;
    const PhaseWindow w{dt};
    const PauliAxis axis = trial % 2 ? PauliAxis::x : PauliAxis::y;
    const PovmPair pair = povm_pair(axis, w);
    CHECK((pair.plus + pair.minus + pair.miss - ComplexMatrix::identity(2))
              .max_abs() < 1e-12);
    for (const ComplexMatrix* e : {&pair.plus, &pair.minus, &pair.miss}) {
      const auto eig = hermitian_eigenvalues(*e);
      CHECK(eig.front() > -1e-12);
      CHECK(eig.back() < 1.0 + 1e-12);
    }
    // raw outcome difference reproduces g times the Pauli expectation
    const double width = rng.uniform();
    const cplx alpha{std::sqrt(width), 0.0};
    const cplx beta = std::sqrt(1.0 - width) *
                      std::exp(cplx{0.0, rng.uniform() * 2.0 * pi});
    const ComplexMatrix rho = pure_state(alpha, beta);
    const cplx diff = ((pair.plus - pair.minus) * rho).trace();
    const cplx ideal = (pauli(axis) * rho).trace();
    CHECK(std::abs(diff - cplx{pair.g, 0.0} * ideal) < 1e-12);
  }
  CHECK_THROWS_AS(povm_pair(PauliAxis::z, PhaseWindow{0.1}), std::invalid_argument);
}

TEST_CASE("half-line readout operators") {
  const auto ops = z_outcome_operators(0.02);
  CHECK((ops.first + ops.second - ComplexMatrix::identity(2)).max_abs() < 1e-15);
  const ComplexMatrix diff = ops.first - ops.second;
  CHECK((diff - pauli(PauliAxis::z) * cplx{1.0 - 0.04, 0.0}).max_abs() < 1e-15);
  CHECK_THROWS_AS(z_outcome_operators(-0.01), std::invalid_argument);
  CHECK_THROWS_AS(z_outcome_operators(0.51), std::invalid_argument);

  // time-resolved form pulls the leakage from the spread law
  const EncodingSpec spec = natural_spec();
  const double t_z = 0.1 * overlap_time(spec.sigma_d, spec.mass, spec.d);
  const auto timed = z_outcome_operators(t_z, spec);
  CHECK(timed.first.at(1, 1).real() ==
        doctest::Approx(4.7215219305617117e-07).epsilon(1e-9));
}

TEST_CASE("canonical detector pairs sit at the fringe sites") {
  const EncodingSpec spec = natural_spec();
  const double t = overlap_time(spec.sigma_d, spec.mass, spec.d);
  const auto xs = canonical_pair(PauliAxis::x, spec, t, 0.4, 0.0);
  CHECK(xs[0].id == "x_plus");
  CHECK(xs[0].x_center == doctest::Approx(0.0));
  CHECK(xs[1].id == "x_minus");
  CHECK(theta_of_x(spec, xs[1].x_center, t) == doctest::Approx(pi).epsilon(1e-13));
  const auto ys = canonical_pair(PauliAxis::y, spec, t, 0.4, 0.0);
  CHECK(theta_of_x(spec, ys[0].x_center, t) == doctest::Approx(pi / 2).epsilon(1e-13));
  CHECK(theta_of_x(spec, ys[1].x_center, t) == doctest::Approx(-pi / 2).epsilon(1e-13));
  const auto zs = canonical_pair(PauliAxis::z, spec, t, 0.0, 0.0);
  CHECK(zs[0].x_center < 0.0);
  CHECK(zs[1].x_center > 0.0);
  CHECK(zs[0].kind == DetectorKind::z_detector);
}

TEST_CASE("qubit-level sampling converges to the windowed expectations") {
  const EncodingSpec spec = natural_spec();
  const double t = overlap_time(spec.sigma_d, spec.mass, spec.d);
  const cplx alpha{std::sqrt(0.5), 0.0};
  const cplx beta = std::sqrt(0.5) * std::exp(cplx{0.0, pi / 3.0});
  const ComplexMatrix rho = pure_state(alpha, beta);  // <sx> = 0.5, <sy> ~ 0.866

  const auto dets = canonical_pair(PauliAxis::x, spec, t, 0.4, 0.0);
  const SamplingRun run = sample_measurements(rho, dets, spec, 40000, 11);
  const double g = g_factor(0.2);
  CHECK(std::abs(run.estimate.conditioned - 0.5) < 4.0 * run.estimate.cond_se);
  CHECK(std::abs(run.estimate.raw - g * 0.5) < 4.0 * run.estimate.raw_se);
  CHECK(run.estimate.plus_count + run.estimate.minus_count +
            run.estimate.miss_count ==
        run.estimate.shots);
  // the miss rate reflects the window acceptance 1 - g
  const double miss_frac = static_cast<double>(run.estimate.miss_count) / 40000.0;
  CHECK(miss_frac == doctest::Approx(1.0 - g).epsilon(0.25));

  const auto ys = canonical_pair(PauliAxis::y, spec, t, 0.4, 0.0);
  const SamplingRun yrun = sample_measurements(rho, ys, spec, 40000, 12);
  CHECK(std::abs(yrun.estimate.conditioned - std::sin(pi / 3.0)) <
        4.0 * yrun.estimate.cond_se);
}

TEST_CASE("sampling is reproducible for a fixed seed") {
  const EncodingSpec spec = natural_spec();
  const double t = overlap_time(spec.sigma_d, spec.mass, spec.d);
  const ComplexMatrix rho = pure_state(cplx{1.0, 0.0}, cplx{0.0, 0.0});
  const auto dets = canonical_pair(PauliAxis::x, spec, t, 0.4, 0.0);
  const SamplingRun a = sample_measurements(rho, dets, spec, 5000, 77, true);
  const SamplingRun b = sample_measurements(rho, dets, spec, 5000, 77, true);
  CHECK(a.estimate.raw == b.estimate.raw);
  CHECK(a.records.size() == 5000);
  REQUIRE(b.records.size() == 5000);
  for (std::size_t i = 0; i < 200; ++i) {
    CHECK(a.records[i].outcome == b.records[i].outcome);
    if (a.records[i].outcome != 0)
      CHECK(a.records[i].position == b.records[i].position);
    else
      CHECK(std::isnan(a.records[i].position));
  }
  const SamplingRun c = sample_measurements(rho, dets, spec, 5000, 78);
  CHECK(a.estimate.plus_count != c.estimate.plus_count);
}

TEST_CASE("wavepacket-level sampling reproduces the qubit picture") {
  const EncodingSpec spec = natural_spec();
  const double t = overlap_time(spec.sigma_d, spec.mass, spec.d);
  const cplx alpha{std::sqrt(0.5), 0.0};
  const cplx beta = std::sqrt(0.5) * std::exp(cplx{0.0, pi / 3.0});

  const auto dets = canonical_pair(PauliAxis::x, spec, t, 0.4, 0.0);
  const SamplingRun run = sample_measurements(spec, alpha, beta, dets, 200000, 5);
  // windowed site readout carries a small far-field contract error on top
  // of the shot noise at this separation
  CHECK(std::abs(run.estimate.conditioned - 0.5) <
        4.0 * run.estimate.cond_se + 0.016);

  // a pure |0> points every z shot at the left detector up to leakage
  const auto zs = canonical_pair(PauliAxis::z, spec, 0.1 * t, 0.0, 0.0);
  const SamplingRun zrun =
      sample_measurements(spec, cplx{1.0, 0.0}, cplx{0.0, 0.0}, zs, 20000, 6);
  CHECK(zrun.estimate.conditioned > 0.999);
  CHECK(zrun.estimate.miss_count == 0);
}

TEST_CASE("sampling rejects malformed detector pairs") {
  const EncodingSpec spec = natural_spec();
  const double t = overlap_time(spec.sigma_d, spec.mass, spec.d);
  const ComplexMatrix rho = pure_state(cplx{1.0, 0.0}, cplx{0.0, 0.0});
  auto dets = canonical_pair(PauliAxis::x, spec, t, 0.4, 0.0);
  dets[1].x_center += 1.0;  // knock the minus site off the fringe
  CHECK_THROWS_AS(sample_measurements(rho, dets, spec, 100, 1),
                  std::invalid_argument);
  auto mixed_kinds = canonical_pair(PauliAxis::x, spec, t, 0.4, 0.0);
  mixed_kinds[1].kind = DetectorKind::z_detector;
  mixed_kinds[1].x_center = 1.0;
  CHECK_THROWS_AS(sample_measurements(rho, mixed_kinds, spec, 100, 1),
                  std::invalid_argument);
  auto window_mismatch = canonical_pair(PauliAxis::x, spec, t, 0.4, 0.0);
  window_mismatch[1].delta_x = 0.5;
  CHECK_THROWS_AS(sample_measurements(rho, window_mismatch, spec, 100, 1),
                  std::invalid_argument);
}

TEST_CASE("product correlator sampling") {
  // uncorrelated pure product state: <A x B> = <A><B>
  const cplx plus{1.0 / std::sqrt(2.0), 0.0};
  const ComplexMatrix rho_a = pure_state(plus, plus);                // <sx> = 1
  const ComplexMatrix rho_b = pure_state(cplx{std::sqrt(0.8), 0.0},
                                         cplx{std::sqrt(0.2), 0.0});  // <sx> = 0.8
  const ComplexMatrix rho4 = kron(rho_a, rho_b);

  const PovmPair pa = povm_pair(PauliAxis::x, PhaseWindow{0.0});
  const PovmPair pb = povm_pair(PauliAxis::x, PhaseWindow{0.5});
  const std::vector<WeightedEffect> ea{{pa.plus, 1.0}, {pa.minus, -1.0},
                                       {pa.miss, 0.0}};
  const std::vector<WeightedEffect> eb{{pb.plus, 1.0}, {pb.minus, -1.0},
                                       {pb.miss, 0.0}};
  const EstimatorPair est = sample_product_correlator(rho4, ea, eb, 50000, 99);
  const double expected_raw = 1.0 * pb.g * 0.8;  // g_a = 1
  CHECK(std::abs(est.raw - expected_raw) < 4.0 * est.raw_se);

  // incomplete effect lists are rejected
  const std::vector<WeightedEffect> partial{{pb.plus, 1.0}, {pb.minus, -1.0}};
  CHECK_THROWS_AS(sample_product_correlator(rho4, ea, partial, 100, 1),
                  std::runtime_error);

  // identical seeds replay identical counts
  const EstimatorPair again = sample_product_correlator(rho4, ea, eb, 50000, 99);
  CHECK(est.plus_count == again.plus_count);
  CHECK(est.minus_count == again.minus_count);
}
