#pragma once

// bridge between wavepackets and qubits: amplitude encoding into a packet
// pair, the position-to-phase-angle map theta = x m d / (hbar t), detector
// windows as POVM elements scaled by g(delta_theta), and finite-shot
// sampling of measurement outcomes.
//
// conventions: |0> is the LEFT packet at -d/2; |theta> = |0> + e^{i theta}|1>
// up to normalization; a position readout at theta realizes that basis.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sqlab/qubit_algebra.hpp"
#include "sqlab/wavepacket.hpp"

namespace sqlab {

struct EncodingSpec {
  double d = 0.0;        // packet separation [m]
  double sigma_d = 0.0;  // packet width [m]
  double mass = 0.0;     // [kg]
  double min_ratio = 50.0;  // fidelity floor: require d >= min_ratio * sigma_d
};

void validate(const EncodingSpec& spec);

// alpha |0> + beta |1> as two packets released at rest and evolved to t
SpatialState encode(const EncodingSpec& spec, cplx alpha, cplx beta, double t);

double theta_of_x(const EncodingSpec& spec, double x, double t);
double x_of_theta(const EncodingSpec& spec, double theta, double t);

// far-field detection density at the position mapped to theta, normalized
// over x: P propto exp(-2 k^2 sigma_d^2) (1 + 2 Re(conj(alpha) beta
// e^{-i theta})) with k = theta / d. units 1/m.
double detection_probability(const EncodingSpec& spec, cplx alpha, cplx beta,
                             double theta, double t);

enum class DetectorKind { z_detector, theta_detector };

struct DetectorSpec {
  DetectorKind kind = DetectorKind::theta_detector;
  double x_center = 0.0;  // [m]; for z detectors only the sign matters
  double t_meas = 0.0;    // [s]
  double delta_x = 0.0;   // position resolution [m]
  double delta_t = 0.0;   // timing resolution [s]
  std::string id;
};

void validate(const DetectorSpec& det);

// phase blur |m d dx / (hbar t) - x m d dt / (hbar t^2)| of a theta detector
PhaseWindow delta_theta_of(const EncodingSpec& spec, const DetectorSpec& det);

// top-hat window POVM for axis x or y. effects are (g/2)(I +- sigma_axis)
// so the outcome-difference expectation is g <sigma_axis>; miss = (1-g) I
// completes the set.
struct PovmPair {
  ComplexMatrix plus{2};
  ComplexMatrix minus{2};
  ComplexMatrix miss{2};
  double g = 1.0;
  PauliAxis axis = PauliAxis::x;
};

PovmPair povm_pair(PauliAxis axis, const PhaseWindow& window);

// sign-of-position effects on the qubit at readout time t_z. first = left
// half-line (value +1, where |0> sits), second = right (value -1). the
// leakage eps = leakage_epsilon(d, sigma_d, m, t_z) mixes them:
// left = (1-eps)|0><0| + eps|1><1|, so left - right = (1 - 2 eps) sigma_z.
std::pair<ComplexMatrix, ComplexMatrix> z_outcome_operators(double epsilon);
std::pair<ComplexMatrix, ComplexMatrix> z_outcome_operators(
    double t_z, const EncodingSpec& spec);

struct MeasurementRecord {
  std::size_t shot = 0;
  std::string detector_id;
  int outcome = 0;         // +1, -1, or 0 for a miss
  double position = 0.0;   // [m]; NaN on a miss
};

struct EstimatorPair {
  double raw = 0.0;          // (N+ - N-) / shots, estimates g <sigma>
  double conditioned = 0.0;  // (N+ - N-) / (N+ + N-), estimates <sigma>
  double raw_se = 0.0;
  double cond_se = 0.0;
  std::size_t plus_count = 0;
  std::size_t minus_count = 0;
  std::size_t miss_count = 0;
  std::size_t shots = 0;
};

struct SamplingRun {
  EstimatorPair estimate;
  std::vector<MeasurementRecord> records;  // filled only when requested
};

// the two detectors realizing a Pauli axis: theta detectors at {0, pi}
// (x), {+pi/2, -pi/2} (y), or half-line z detectors. the +1 outcome is the
// first entry (theta = 0, theta = +pi/2, or the left half-line).
std::vector<DetectorSpec> canonical_pair(PauliAxis axis, const EncodingSpec& spec,
                                         double t_meas, double delta_x,
                                         double delta_t);

// qubit-level sampling: outcomes drawn from the exact Born probabilities of
// {E+, E-, miss}; sampled positions are placed uniformly inside the hit
// detector window (informational only).
SamplingRun sample_measurements(const ComplexMatrix& rho2,
                                const std::vector<DetectorSpec>& detectors,
                                const EncodingSpec& spec, std::size_t shots,
                                std::uint64_t seed, bool keep_records = false);

// wavepacket-level sampling: positions drawn from the exact two-packet
// density by inverse transform on a fine grid, then binned against the
// detector windows. z detectors bin by sign of position.
SamplingRun sample_measurements(const EncodingSpec& spec, cplx alpha, cplx beta,
                                const std::vector<DetectorSpec>& detectors,
                                std::size_t shots, std::uint64_t seed,
                                bool keep_records = false);

// joint sampling of a two-qubit state against outcome-valued effect lists
// (values +1/-1 for hits, 0 for misses). the product of the two outcome
// values feeds the same raw/conditioned estimators as above.
struct WeightedEffect {
  ComplexMatrix op{2};
  double value = 0.0;
};

EstimatorPair sample_product_correlator(const ComplexMatrix& rho4,
                                        const std::vector<WeightedEffect>& first,
                                        const std::vector<WeightedEffect>& second,
                                        std::size_t shots, std::uint64_t seed);

}  // namespace sqlab
