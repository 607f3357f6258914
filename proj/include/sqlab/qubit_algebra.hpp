#pragma once

#include <string>

#include "sqlab/complex_matrix.hpp"

// Operator algebra of the spatial qubit under windowed fringe detection.
//
// Conventions used throughout:
//   |0> is the packet on the left half-line (center -d/2), |1> on the right.
//   A fringe state |theta> = |0> + e^{i theta}|1>; detectors sit at fixed
//   phase angles theta and accept a window of width delta_theta around it.
//   Two-particle bases are ordered first-factor-major: the spin (x) spatial
//   pair as {up 0, up 1, down 0, down 1}, two spatial qubits as
//   {00, 01, 10, 11}.
namespace sqlab {

enum class PauliAxis { x, y, z };

// Which qubit slot of a register dephasing acts on. For the spin (x) spatial
// pair the spatial qubit is the *second* slot; for the two-mass register both
// slots are spatial qubits.
enum class QubitSlot { first, second, both };

// Detector acceptance window in phase angle, radians. Valid range [0, 2*pi).
struct PhaseWindow {
  double delta_theta = 0.0;
};
void validate(const PhaseWindow& w);

// Hermitian, unit-trace, positive-semidefinite matrix plus a free-form label.
struct DensityMatrix {
  ComplexMatrix rho;
  std::string label;
};

// Validates the three density-matrix properties (trace within 1e-9 of one,
// hermiticity 1e-9, eigenvalues >= -1e-10) and throws otherwise.
DensityMatrix make_density(ComplexMatrix rho, std::string label);

ComplexMatrix pauli(PauliAxis axis);

// Fringe-visibility factor of a detector window: (2/x) sin(x/2), the mean of
// e^{i theta} over a window of width x. Analytic limit g(0) = 1; g is
// strictly decreasing on [0, 2*pi) with g <= 1. Domain error outside.
double g_factor(double delta_theta);

// Window-averaged Pauli operator g(delta_theta) * sigma_{x|y}. The z
// operator is read out from half-line occupancy, not a fringe window, so
// axis z is a domain error here (see codec z_outcome_operators).
ComplexMatrix effective_pauli(PauliAxis axis, const PhaseWindow& w);

// Scales coherences of the chosen qubit slot by e^{-gamma_t}; elements where
// both slots differ pick up e^{-2 gamma_t} under QubitSlot::both. gamma_t is
// the accumulated dimensionless exposure (rate times time), >= 0.
DensityMatrix dephase(const DensityMatrix& rho, double gamma_t, QubitSlot slot);

// (|up,1> + |down,0>)/sqrt(2) as a density matrix, spin (x) spatial order.
DensityMatrix sg_entangled_state();

// Pure state (1/2)(|00> + e^{i dphi01}|01> + e^{i dphi10}|10> + |11>) of two
// spatial qubits after a phase-accumulating interaction.
DensityMatrix casimir_entangled_state(double dphi01, double dphi10);

// Tr(obs * rho). The imaginary residue must be below 1e-10 (numeric failure
// otherwise); obs must be Hermitian and dimensions must match.
double expectation(const DensityMatrix& rho, const ComplexMatrix& obs);

// |<A B> + <A B'> + <A' B> - <A' B'>| with A,A' on the first qubit and B,B'
// on the second, each a Hermitian 2x2 observable.
double chsh_value(const DensityMatrix& rho4, const ComplexMatrix& a, const ComplexMatrix& a_prime,
                  const ComplexMatrix& b, const ComplexMatrix& b_prime);

// The standard optimal settings: A = (tau_x + tau_y)/sqrt(2) and
// A' = (tau_x - tau_y)/sqrt(2) on the spin (normalized so eigenvalues are
// +-1, as a CHSH setting requires), B and B' the window-averaged x and y
// operators on the spatial qubit.
struct ChshSettings {
  ComplexMatrix a, a_prime, b, b_prime;
};
ChshSettings chsh_settings(const PhaseWindow& w);

// Closed form 2*sqrt(2) * |g(delta_theta)| * e^{-gamma_t} for the dephased
// pair measured at the optimal settings.
double chsh_analytic(double delta_theta, double gamma_t);

// Window width where the CHSH value crosses 2, i.e. |g| = 1/sqrt(2):
// bisection root of g(x) - 1/sqrt(2) on (0, 2*pi), tolerance 1e-9.
double chsh_threshold();

// Largest window for which the witness can still go negative over the phase
// choices: root of g^2 + 2g = 1, i.e. g = sqrt(2) - 1. Same bisection.
double witness_window_limit();

// I(x)I - gx(x)gx - gz(x)gy - gy(x)gz where gx, gy are window-averaged and
// gz is exact (half-line readout carries no fringe window).
ComplexMatrix witness_operator(const PhaseWindow& w);

// Closed form for <witness_operator> on the dephased phase-interaction state:
// 1 - (1/2) e^{-2 gamma_t} g^2 (1 + cos(dphi10 - dphi01))
//   - e^{-gamma_t} g (sin(dphi10) + sin(dphi01)).
double witness_analytic(double dphi01, double dphi10, double gamma_t, const PhaseWindow& w);

}  // namespace sqlab
