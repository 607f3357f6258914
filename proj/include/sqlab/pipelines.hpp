#pragma once

// end-to-end experiment pipelines: the spin-position CHSH run, the two-mass
// phase-entanglement witness run, the feasibility calculator, the detector
// beam-splitter equivalence check, and a deterministic sweep engine.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sqlab/codec.hpp"
#include "sqlab/qubit_algebra.hpp"

namespace sqlab {

// ---------------------------------------------------------------- witness

struct CasimirConfig {
  double radius = 0.0;      // sphere radius R [m]
  double distance = 0.0;    // center separation D [m]
  double separation = 0.0;  // superposition size d [m], may be 0
  double epsilon_r = 1.0;   // relative permittivity
  double tau = 0.0;         // entangling time [s], may be 0
  double mass = 0.0;        // [kg]
  double sigma_d = 0.0;     // packet width [m]
  double gamma = 0.0;       // dephasing rate [1/s]
  double window = 0.0;      // phase blur delta_theta [rad]
  double delay = 0.0;       // gap between the z and x/y readouts [s]
  bool dephase_during_delay = false;
  // overrides the geometric phases (dphi01, dphi10) when set
  std::optional<std::pair<double, double>> forced_phases;
};

void validate(const CasimirConfig& config);

// interaction constant (23 c / 4 pi) ((eps - 1) / (eps + 2))^2 [m/s]
double casimir_constant(double epsilon_r);

struct CasimirPhases {
  double phi = 0.0;     // common phase k R^6 tau / D^7
  double dphi01 = 0.0;  // (D + d) branch minus common
  double dphi10 = 0.0;  // (D - d) branch minus common
};

CasimirPhases casimir_phases(const CasimirConfig& config);

// shared monte-carlo block for pipeline reports
struct McBlock {
  bool enabled = false;
  std::size_t shots = 0;
  std::uint64_t seed = 0;
  double value = 0.0;  // raw-estimator combination
  double se = 0.0;     // root-sum-square of term standard errors
  std::vector<std::string> term_names;
  std::vector<double> term_values;
  std::vector<double> term_ses;
};

struct WitnessReport {
  CasimirPhases phases;
  double gamma_t = 0.0;
  double witness_matrix = 0.0;       // Tr(W rho) on the dephased state
  double witness_closed_form = 0.0;  // direct formula
  double agreement = 0.0;            // |matrix - closed form|
  double concurrence = 0.0;          // of the pure pre-dephasing state
  double delayed_witness = 0.0;      // phases accumulated over tau + delay
  double delay_rel_change = 0.0;     // |delayed|/|base| - 1
  McBlock mc;
};

// computes phases, evaluates the witness along both algebra paths (must
// agree within 1e-10, else throws std::runtime_error), applies the delay
// penalty, and optionally estimates the witness by seeded sampling.
WitnessReport run_casimir_witness(const CasimirConfig& config, std::size_t shots,
                                  std::uint64_t seed);

// ------------------------------------------------------------------- chsh

struct SternGerlachConfig {
  double mass = 0.0;      // [kg]
  double gradient = 0.0;  // field gradient [T/m], may be 0
  double mu = 0.0;        // magnetic moment [J/T]
  double t_prep = 0.0;    // gradient-on time [s]
  double sigma_d = 0.0;   // packet width [m]
  double gamma = 0.0;     // dephasing rate [1/s]
  double window = 0.0;    // phase blur delta_theta [rad]
};

void validate(const SternGerlachConfig& config);

// kinematic order-of-magnitude separation d = a t_prep^2, a = mu grad / m
double sg_separation(const SternGerlachConfig& config);

struct ChshReport {
  double separation = 0.0;   // [m]
  double t_xy = 0.0;         // overlap readout time [s]
  double gamma_t = 0.0;
  double delta_theta = 0.0;
  double g = 0.0;
  double chsh_matrix = 0.0;
  double chsh_closed_form = 0.0;  // 2 sqrt(2) g exp(-gamma t)
  double agreement = 0.0;
  double margin_over_2 = 0.0;     // matrix value minus the classical bound
  double threshold = 0.0;         // delta_theta where the value hits 2
  double window_budget = 0.0;     // threshold - delta_theta
  McBlock mc;
};

// builds the spin-position pair, dephases the spatial slot over the overlap
// flight, evaluates the CHSH combination along both paths (must agree within
// 1e-12, else throws std::runtime_error), and optionally samples it.
ChshReport run_sg_chsh(const SternGerlachConfig& config, std::size_t shots,
                       std::uint64_t seed);

// ------------------------------------------------------------ feasibility

struct FeasibilityInput {
  double mass = 0.0;        // [kg]
  double sigma_d = 0.0;     // [m]
  double separation = 0.0;  // d [m]
  double delta_x = 0.0;     // detector position resolution [m]
  double delta_t = 0.0;     // detector timing resolution [s]
};

struct FeasibilityReport {
  double t_xy = 0.0;            // 2 sigma_d m d / hbar [s]
  double t_z_max = 0.0;         // 0.1 t_xy [s]
  double fringe_spacing = 0.0;  // 2 pi hbar t_xy / (m d) = 4 pi sigma_d [m]
  double delta_theta = 0.0;     // blur at the central detector [rad]
  double chsh_threshold = 0.0;
  double witness_window_limit = 0.0;
  bool chsh_feasible = false;      // delta_theta below the chsh threshold
  bool witness_window_ok = false;  // delta_theta below the witness limit
};

FeasibilityReport feasibility(const FeasibilityInput& input);

// --------------------------------------------------- detector equivalence

struct BeamSplitterReport {
  ComplexMatrix matrix{2};          // rows are the detector bra vectors
  double unitarity_defect = 0.0;    // max |U U^dag - I|
  double balanced_match = 0.0;      // distance to the 50:50 + quarter-phase
                                    // reference, minimized over row phases
  double overlap_mod = 0.0;         // |cos((theta1 - theta0)/2)|
};

// the basis transformation realized by a detector pair at (theta0, theta1);
// coincident angles (mod 2 pi) are singular and rejected.
BeamSplitterReport beam_splitter_equivalence(double theta0, double theta1);

// ------------------------------------------------------------------ sweep

struct SweepAxis {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;  // inclusive linspace; count == 1 pins lo
};

struct SweepSpec {
  std::vector<SweepAxis> axes;  // at most 2, each at most 10^4 points
};

struct SweepTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // row-major over the axis grid
  std::vector<std::string> row_errors;    // empty string when the row is valid
};

// evaluates eval(axis values) -> value columns over the grid; rows that
// throw are flagged with the message and NaN values. max_threads == 0 uses
// the hardware count; evaluation order is deterministic by row index.
SweepTable sweep_grid(const SweepSpec& spec,
                      const std::vector<std::string>& value_columns,
                      const std::function<std::vector<double>(
                          const std::vector<double>&)>& eval,
                      unsigned max_threads);

// pipeline sweeps with self-describing tables. axis names are restricted to
// the emitted columns: chsh {delta_theta_rad, gamma_per_s}, witness {tau_s,
// gamma_per_s}, feasibility {delta_x_m, delta_t_s}.
SweepTable sweep_chsh(const SternGerlachConfig& base, const SweepSpec& spec,
                      unsigned max_threads);
SweepTable sweep_witness(const CasimirConfig& base, const SweepSpec& spec,
                         unsigned max_threads);
SweepTable sweep_feasibility(const FeasibilityInput& base, const SweepSpec& spec,
                             unsigned max_threads);

}  // namespace sqlab
