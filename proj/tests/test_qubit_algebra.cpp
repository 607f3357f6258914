#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <utility>

#include "sqlab/qubit_algebra.hpp"
#include "sqlab/rng.hpp"

using namespace sqlab;

namespace {
constexpr double pi = 3.14159265358979323846;
constexpr double sqrt2 = 1.4142135623730951;
}  // namespace

TEST_CASE("pauli matrices satisfy the algebra") {
  const ComplexMatrix x = pauli(PauliAxis::x);
  const ComplexMatrix y = pauli(PauliAxis::y);
  const ComplexMatrix z = pauli(PauliAxis::z);
  const ComplexMatrix id = ComplexMatrix::identity(2);

  CHECK((x * x - id).max_abs() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK((y * y - id).max_abs() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK((z * z - id).max_abs() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::abs(x.trace()) < 1e-15);
  CHECK(std::abs(y.trace()) < 1e-15);
  CHECK(std::abs(z.trace()) < 1e-15);
  // xy = iz and the anticommutator vanishes
  CHECK((x * y - z * cplx{0.0, 1.0}).max_abs() < 1e-15);
  CHECK((x * y + y * x).max_abs() < 1e-15);
  CHECK(x.is_hermitian(1e-15));
  CHECK(y.is_hermitian(1e-15));
  CHECK(z.is_hermitian(1e-15));
}

TEST_CASE("g_factor values and shape") {
  CHECK(g_factor(0.0) == 1.0);
  CHECK(g_factor(1e-12) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g_factor(0.2) == doctest::Approx(0.9983341664682815).epsilon(1e-14));
  CHECK(g_factor(0.5) == doctest::Approx(0.9896158370180917).epsilon(1e-14));
  CHECK(g_factor(pi) == doctest::Approx(2.0 / pi).epsilon(1e-14));

  double prev = g_factor(0.0);
  for (int i = 1; i <= 200; ++i) {
    const double cur = g_factor(i * (2.0 * pi - 1e-9) / 200.0);
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK_THROWS_AS(g_factor(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(g_factor(2.0 * pi), std::invalid_argument);
}

TEST_CASE("phase window validation") {
  CHECK_NOTHROW(validate(PhaseWindow{0.0}));
  CHECK_NOTHROW(validate(PhaseWindow{6.28}));
  CHECK_THROWS_AS(validate(PhaseWindow{-0.01}), std::invalid_argument);
  CHECK_THROWS_AS(validate(PhaseWindow{2.0 * pi}), std::invalid_argument);
}

TEST_CASE("effective pauli is g sigma; z readout is not a window operator") {
  const PhaseWindow w{0.7};
  const double g = g_factor(0.7);
  CHECK((effective_pauli(PauliAxis::x, w) - pauli(PauliAxis::x) * cplx{g, 0.0})
            .max_abs() < 1e-15);
  CHECK((effective_pauli(PauliAxis::y, w) - pauli(PauliAxis::y) * cplx{g, 0.0})
            .max_abs() < 1e-15);
  CHECK_THROWS_AS(effective_pauli(PauliAxis::z, w), std::invalid_argument);
}

TEST_CASE("make_density rejects unphysical matrices") {
  ComplexMatrix ok(2);
  ok.at(0, 0) = 0.5;
  ok.at(1, 1) = 0.5;
  ok.at(0, 1) = 0.5;
  ok.at(1, 0) = 0.5;
  CHECK_NOTHROW(make_density(ok, "plus"));

  ComplexMatrix bad_trace(2);
  bad_trace.at(0, 0) = 0.7;
  bad_trace.at(1, 1) = 0.5;
  CHECK_THROWS_AS(make_density(bad_trace, ""), std::invalid_argument);

  ComplexMatrix not_hermitian(2);
  not_hermitian.at(0, 0) = 0.5;
  not_hermitian.at(1, 1) = 0.5;
  not_hermitian.at(0, 1) = cplx{0.2, 0.1};
  not_hermitian.at(1, 0) = cplx{0.2, 0.1};
  CHECK_THROWS_AS(make_density(not_hermitian, ""), std::invalid_argument);

  ComplexMatrix negative(2);
  negative.at(0, 0) = 0.5;
  negative.at(1, 1) = 0.5;
  negative.at(0, 1) = 0.7;
  negative.at(1, 0) = 0.7;
  CHECK_THROWS_AS(make_density(negative, ""), std::invalid_argument);
}

TEST_CASE("dephase scales coherences and keeps the state physical") {
  const DensityMatrix pure = casimir_entangled_state(0.3, -0.8);
  const DensityMatrix same = dephase(pure, 0.0, QubitSlot::both);
  double diff = 0.0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      diff = std::max(diff, std::abs(same.rho.at(r, c) - pure.rho.at(r, c)));
  CHECK(diff < 1e-15);

  const double gt = 0.37;
  const DensityMatrix mixed = dephase(pure, gt, QubitSlot::both);
  CHECK(std::abs(mixed.rho.trace() - cplx{1.0, 0.0}) < 1e-12);
  CHECK(mixed.rho.is_hermitian(1e-12));
  const auto eig = hermitian_eigenvalues(mixed.rho);
  CHECK(eig.front() > -1e-12);

  // basis index bit 1 = first slot, bit 0 = second slot; elements where only
  // one slot differs decay e^{-gt}, both slots e^{-2 gt}
  const double one = std::exp(-gt);
  const double two = std::exp(-2.0 * gt);
  CHECK(std::abs(mixed.rho.at(0, 1) - pure.rho.at(0, 1) * one) < 1e-14);
  CHECK(std::abs(mixed.rho.at(0, 2) - pure.rho.at(0, 2) * one) < 1e-14);
  CHECK(std::abs(mixed.rho.at(0, 3) - pure.rho.at(0, 3) * two) < 1e-14);
  CHECK(std::abs(mixed.rho.at(1, 2) - pure.rho.at(1, 2) * two) < 1e-14);
  CHECK(std::abs(mixed.rho.at(1, 3) - pure.rho.at(1, 3) * one) < 1e-14);

  // single-slot variants leave the other slot's coherence untouched
  const DensityMatrix first = dephase(pure, gt, QubitSlot::first);
  CHECK(std::abs(first.rho.at(0, 1) - pure.rho.at(0, 1)) < 1e-15);
  CHECK(std::abs(first.rho.at(0, 2) - pure.rho.at(0, 2) * one) < 1e-14);
  const DensityMatrix second = dephase(pure, gt, QubitSlot::second);
  CHECK(std::abs(second.rho.at(0, 1) - pure.rho.at(0, 1) * one) < 1e-14);
  CHECK(std::abs(second.rho.at(0, 2) - pure.rho.at(0, 2)) < 1e-15);

  CHECK_THROWS_AS(dephase(pure, -0.1, QubitSlot::both), std::invalid_argument);
}

TEST_CASE("spin-path singlet-like state has the right matrix elements") {
  const DensityMatrix rho = sg_entangled_state();
  CHECK(std::abs(rho.rho.trace() - cplx{1.0, 0.0}) < 1e-15);
  const std::pair<int, int> half[] = {{1, 1}, {1, 2}, {2, 1}, {2, 2}};
  for (const auto& [r, c] : half)
    CHECK(std::abs(rho.rho.at(r, c) - cplx{0.5, 0.0}) < 1e-15);
  const std::pair<int, int> zero[] = {{0, 0}, {0, 3}, {3, 0}, {3, 3}};
  for (const auto& [r, c] : zero)
    CHECK(std::abs(rho.rho.at(r, c)) < 1e-15);
}

TEST_CASE("phase-interaction state is pure and correctly phased") {
  const double p01 = 0.41, p10 = -1.3;
  const DensityMatrix rho = casimir_entangled_state(p01, p10);
  CHECK(std::abs(rho.rho.trace() - cplx{1.0, 0.0}) < 1e-14);
  CHECK(std::abs((rho.rho * rho.rho).trace() - cplx{1.0, 0.0}) < 1e-13);
  const cplx e01 = std::exp(cplx{0.0, p01});
  const cplx e10 = std::exp(cplx{0.0, p10});
  CHECK(std::abs(rho.rho.at(1, 0) - 0.25 * e01) < 1e-14);
  CHECK(std::abs(rho.rho.at(2, 0) - 0.25 * e10) < 1e-14);
  CHECK(std::abs(rho.rho.at(1, 2) - 0.25 * e01 * std::conj(e10)) < 1e-14);
}

TEST_CASE("expectation guards observable shape") {
  const DensityMatrix rho = sg_entangled_state();
  ComplexMatrix skew(4);
  skew.at(0, 1) = cplx{0.0, 1.0};
  CHECK_THROWS_AS(expectation(rho, skew), std::invalid_argument);
  CHECK_THROWS_AS(expectation(rho, pauli(PauliAxis::x)), std::invalid_argument);
}

TEST_CASE("ideal chsh reaches the quantum bound on both paths") {
  const PhaseWindow w{0.0};
  const ChshSettings s = chsh_settings(w);
  const double matrix = chsh_value(sg_entangled_state(), s.a, s.a_prime, s.b, s.b_prime);
  CHECK(matrix == doctest::Approx(2.0 * sqrt2).epsilon(1e-13));
  CHECK(chsh_analytic(0.0, 0.0) == doctest::Approx(2.0 * sqrt2).epsilon(1e-15));
  CHECK(std::abs(matrix - chsh_analytic(0.0, 0.0)) < 1e-12);
}

TEST_CASE("chsh matrix path equals the closed form over random settings") {
  SplitMix64 rng(20240816);
  for (int trial = 0; trial < 100; ++trial) {
    const double dt = rng.uniform() * 3.0;
    const double gt = rng.uniform() * 2.0;
    const PhaseWindow w{dt};
    const ChshSettings s = chsh_settings(w);
    const DensityMatrix mixed = dephase(sg_entangled_state(), gt, QubitSlot::second);
    const double matrix = chsh_value(mixed, s.a, s.a_prime, s.b, s.b_prime);
    CHECK(std::abs(matrix - chsh_analytic(dt, gt)) < 1e-12);
  }
}

TEST_CASE("chsh threshold window") {
  const double thr = chsh_threshold();
  CHECK(std::abs(thr - 2.783114756503021) < 5e-9);
  CHECK(std::abs(g_factor(thr) - 1.0 / sqrt2) < 1e-9);
  CHECK(std::abs(thr / (2.0 * pi) - 0.4429464706894525) < 1e-9);
  // the classical boundary: value is above 2 just inside, below just outside
  CHECK(chsh_analytic(thr - 1e-6, 0.0) > 2.0);
  CHECK(chsh_analytic(thr + 1e-6, 0.0) < 2.0);
}

TEST_CASE("witness window limit is the root of g = sqrt(2) - 1") {
  const double lim = witness_window_limit();
  CHECK(std::abs(lim - 4.185502958110077) < 5e-9);
  CHECK(std::abs(g_factor(lim) - (sqrt2 - 1.0)) < 1e-9);
  // just inside the limit the best-case witness dips below zero
  const double g_in = g_factor(lim - 1e-4);
  CHECK(1.0 - g_in * g_in - 2.0 * g_in < 0.0);
  const double g_out = g_factor(lim + 1e-4);
  CHECK(1.0 - g_out * g_out - 2.0 * g_out > 0.0);
}

TEST_CASE("witness operator structure") {
  const PhaseWindow w{0.9};
  const ComplexMatrix op = witness_operator(w);
  CHECK(op.is_hermitian(1e-14));
  const double g = g_factor(0.9);
  const ComplexMatrix rebuilt =
      ComplexMatrix::identity(4) -
      kron(effective_pauli(PauliAxis::x, w), effective_pauli(PauliAxis::x, w)) -
      kron(pauli(PauliAxis::z), effective_pauli(PauliAxis::y, w)) -
      kron(effective_pauli(PauliAxis::y, w), pauli(PauliAxis::z));
  CHECK((op - rebuilt).max_abs() < 1e-14);
  // z slot carries no window factor: the zy block scales with g, not g^2
  CHECK(std::abs(op.at(0, 1).imag() - g) < 1e-14);
}

TEST_CASE("witness matrix path equals the closed form over random tuples") {
  SplitMix64 rng(77001);
  for (int trial = 0; trial < 100; ++trial) {
    const double p01 = (rng.uniform() - 0.5) * 2.0 * pi;
    const double p10 = (rng.uniform() - 0.5) * 2.0 * pi;
    const double gt = rng.uniform() * 1.5;
    const double dt = rng.uniform() * 4.0;
    const PhaseWindow w{dt};
    const DensityMatrix mixed =
        dephase(casimir_entangled_state(p01, p10), gt, QubitSlot::both);
    const double matrix = expectation(mixed, witness_operator(w));
    const double closed = witness_analytic(p01, p10, gt, w);
    CHECK(std::abs(matrix - closed) < 1e-10);
  }
}

TEST_CASE("witness detects the reference phase pair") {
  const PhaseWindow w{0.0};
  const DensityMatrix rho = casimir_entangled_state(0.036, -0.032);
  const double value = expectation(rho, witness_operator(w));
  CHECK(value == doctest::Approx(-0.0028421309342701734).epsilon(1e-10));
  CHECK(value < 0.0);
}

TEST_CASE("equal pi phases give a separable state the witness cannot flag") {
  // dphi01 = dphi10 = pi factorizes: (|0> - |1>) x (|0> - |1>) up to phase
  const DensityMatrix rho = casimir_entangled_state(pi, pi);
  SplitMix64 rng(5150);
  for (int trial = 0; trial < 40; ++trial) {
    const double dt = rng.uniform() * 6.2;
    const double value = expectation(rho, witness_operator(PhaseWindow{dt}));
    CHECK(value >= -1e-12);
  }
}

TEST_CASE("quarter-pi-pair phases maximize the violation") {
  const DensityMatrix rho = casimir_entangled_state(pi / 2.0, pi / 2.0);
  const double value = expectation(rho, witness_operator(PhaseWindow{0.0}));
  CHECK(value == doctest::Approx(-2.0).epsilon(1e-13));
}

TEST_CASE("zero phases never look entangled") {
  const DensityMatrix rho = casimir_entangled_state(0.0, 0.0);
  SplitMix64 rng(31337);
  for (int trial = 0; trial < 40; ++trial) {
    const double dt = rng.uniform() * 6.2;
    const double gt = rng.uniform() * 2.0;
    const DensityMatrix mixed = dephase(rho, gt, QubitSlot::both);
    CHECK(expectation(mixed, witness_operator(PhaseWindow{dt})) >= -1e-12);
  }
}
