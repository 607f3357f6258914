#include "sqlab/qubit_algebra.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace sqlab {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr cplx I{0.0, 1.0};
}  // namespace

void validate(const PhaseWindow& w) {
  if (!(w.delta_theta >= 0.0) || w.delta_theta >= two_pi)
    throw std::invalid_argument("phase window must satisfy 0 <= delta_theta < 2*pi");
}

DensityMatrix make_density(ComplexMatrix rho, std::string label) {
  if (std::abs(rho.trace() - cplx{1.0}) > 1e-9)
    throw std::invalid_argument("density matrix trace must be 1");
  if (!rho.is_hermitian(1e-9)) throw std::invalid_argument("density matrix must be Hermitian");
  for (double ev : hermitian_eigenvalues(rho))
    if (ev < -1e-10) throw std::invalid_argument("density matrix must be positive semidefinite");
  return DensityMatrix{std::move(rho), std::move(label)};
}

ComplexMatrix pauli(PauliAxis axis) {
  switch (axis) {
    case PauliAxis::x:
      return ComplexMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}});
    case PauliAxis::y:
      return ComplexMatrix::from_rows({{0.0, -I}, {I, 0.0}});
    case PauliAxis::z:
      return ComplexMatrix::from_rows({{1.0, 0.0}, {0.0, -1.0}});
  }
  throw std::invalid_argument("unknown Pauli axis");
}

double g_factor(double delta_theta) {
  if (!(delta_theta >= 0.0) || delta_theta >= two_pi)
    throw std::invalid_argument("g_factor domain is [0, 2*pi)");
  if (delta_theta < 1e-8) {
    // sin(x/2)*(2/x) = 1 - x^2/24 + O(x^4); below 1e-8 the correction is
    // under 1e-17, so return the analytic limit.
    return 1.0;
  }
  return 2.0 * std::sin(delta_theta / 2.0) / delta_theta;
}

ComplexMatrix effective_pauli(PauliAxis axis, const PhaseWindow& w) {
  validate(w);
  if (axis == PauliAxis::z)
    throw std::invalid_argument(
        "z readout is a half-line measurement with no fringe window; "
        "see z_outcome_operators");
  return pauli(axis) * cplx{g_factor(w.delta_theta)};
}

DensityMatrix dephase(const DensityMatrix& rho, double gamma_t, QubitSlot slot) {
  if (!(gamma_t >= 0.0)) throw std::invalid_argument("gamma_t must be >= 0");
  const double f = std::exp(-gamma_t);
  ComplexMatrix m = rho.rho;
  const int dim = m.dim();
  auto slot_bits = [dim](int index) -> std::pair<int, int> {
    if (dim == 2) return {0, index};
    return {index >> 1, index & 1};
  };
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      auto [r1, r2] = slot_bits(r);
      auto [c1, c2] = slot_bits(c);
      double factor = 1.0;
      const bool first_differs = r1 != c1;
      const bool second_differs = r2 != c2;
      switch (slot) {
        case QubitSlot::first:
          if (first_differs) factor = f;
          break;
        case QubitSlot::second:
          if (second_differs) factor = f;
          break;
        case QubitSlot::both:
          if (first_differs) factor *= f;
          if (second_differs) factor *= f;
          break;
      }
      m.at(r, c) *= factor;
    }
  }
  return make_density(std::move(m), rho.label);
}

DensityMatrix sg_entangled_state() {
  // (|up,1> + |down,0>)/sqrt(2) in the basis {up0, up1, down0, down1}.
  ComplexMatrix m(4);
  m.at(1, 1) = 0.5;
  m.at(1, 2) = 0.5;
  m.at(2, 1) = 0.5;
  m.at(2, 2) = 0.5;
  return make_density(std::move(m), "sg_pair");
}

DensityMatrix casimir_entangled_state(double dphi01, double dphi10) {
  const cplx v[4] = {0.5, 0.5 * std::exp(I * dphi01), 0.5 * std::exp(I * dphi10), 0.5};
  ComplexMatrix m(4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m.at(r, c) = v[r] * std::conj(v[c]);
  return make_density(std::move(m), "phase_pair");
}

double expectation(const DensityMatrix& rho, const ComplexMatrix& obs) {
  if (obs.dim() != rho.rho.dim()) throw std::invalid_argument("observable dimension mismatch");
  if (!obs.is_hermitian(1e-9)) throw std::invalid_argument("observable must be Hermitian");
  const cplx t = (obs * rho.rho).trace();
  if (std::abs(t.imag()) > 1e-10)
    throw std::runtime_error("expectation has a non-negligible imaginary residue");
  return t.real();
}

double chsh_value(const DensityMatrix& rho4, const ComplexMatrix& a, const ComplexMatrix& a_prime,
                  const ComplexMatrix& b, const ComplexMatrix& b_prime) {
  if (rho4.rho.dim() != 4) throw std::invalid_argument("chsh_value expects a two-qubit state");
  const double ab = expectation(rho4, kron(a, b));
  const double abp = expectation(rho4, kron(a, b_prime));
  const double apb = expectation(rho4, kron(a_prime, b));
  const double apbp = expectation(rho4, kron(a_prime, b_prime));
  return std::abs(ab + abp + apb - apbp);
}

ChshSettings chsh_settings(const PhaseWindow& w) {
  validate(w);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  ComplexMatrix tx = pauli(PauliAxis::x);
  ComplexMatrix ty = pauli(PauliAxis::y);
  return ChshSettings{(tx + ty) * cplx{inv_sqrt2}, (tx - ty) * cplx{inv_sqrt2},
                      effective_pauli(PauliAxis::x, w), effective_pauli(PauliAxis::y, w)};
}

double chsh_analytic(double delta_theta, double gamma_t) {
  if (!(gamma_t >= 0.0)) throw std::invalid_argument("gamma_t must be >= 0");
  return 2.0 * std::sqrt(2.0) * std::abs(g_factor(delta_theta)) * std::exp(-gamma_t);
}

namespace {

// g is strictly decreasing on the domain, so plain bisection suffices.
double g_inverse(double target) {
  double lo = 1e-12, hi = two_pi - 1e-12;
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    (g_factor(mid) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double chsh_threshold() {
  return g_inverse(1.0 / std::sqrt(2.0));
}

double witness_window_limit() {
  return g_inverse(std::sqrt(2.0) - 1.0);
}

ComplexMatrix witness_operator(const PhaseWindow& w) {
  validate(w);
  const ComplexMatrix gx = effective_pauli(PauliAxis::x, w);
  const ComplexMatrix gy = effective_pauli(PauliAxis::y, w);
  const ComplexMatrix z = pauli(PauliAxis::z);  // half-line readout: exact
  ComplexMatrix wit = ComplexMatrix::identity(4) - kron(gx, gx) - kron(z, gy) - kron(gy, z);
  return wit;
}

double witness_analytic(double dphi01, double dphi10, double gamma_t, const PhaseWindow& w) {
  validate(w);
  if (!(gamma_t >= 0.0)) throw std::invalid_argument("gamma_t must be >= 0");
  const double g = g_factor(w.delta_theta);
  return 1.0 - 0.5 * std::exp(-2.0 * gamma_t) * g * g * (1.0 + std::cos(dphi10 - dphi01)) -
         std::exp(-gamma_t) * g * (std::sin(dphi10) + std::sin(dphi01));
}

}  // namespace sqlab
