#pragma once

// free gaussian wavepacket dynamics, closed form plus a spectral grid
// propagator used as an independent cross-check.
//
// packet form: psi(x) = A * (2 pi s0^2)^{-1/4} * sqrt(s0^2 / c(t))
//                * exp(-(x-xc)^2/(4 c(t)) + i k0 (x-xc) + i hbar k0^2 t/(2 m))
// with c(t) = s0^2 + i hbar t / (2 m) and xc(t) = xc(0) + hbar k0 t / m.
// evolve() composes exactly: evolving by dt then asking for values matches
// the closed form at t + dt to machine precision.

#include <complex>
#include <cstddef>
#include <vector>

#include "sqlab/complex_matrix.hpp"

namespace sqlab {

struct GaussianPacket {
  cplx amplitude{1.0, 0.0};
  double center = 0.0;    // xc at current time [m]
  double momentum = 0.0;  // wavenumber k0 [1/m]
  double sigma0 = 1.0;    // width at t = 0 [m]
  double mass = 1.0;      // [kg]
  double time = 0.0;      // elapsed free evolution [s]

  cplx complex_width() const;  // c(t) = sigma0^2 + i hbar t / (2 m)
  cplx value(double x) const;
  double width() const;  // sqrt(var) of |psi|^2
  void evolve(double dt);
};

// spread law sigma(t) = sigma0 * sqrt(1 + (hbar t / (2 m sigma0^2))^2)
double evolved_width(double sigma0, double mass, double t);

// time at which two packets separated by d overlap after release:
// 2 * sigma_d * m * d / hbar
double overlap_time(double sigma_d, double mass, double d);

// <a|b> = integral conj(psi_a) psi_b dx, exact gaussian integral
cplx packet_overlap(const GaussianPacket& a, const GaussianPacket& b);

// superposition of packets; norm computed from pairwise overlaps
struct SpatialState {
  std::vector<GaussianPacket> packets;

  cplx value(double x) const;
  double density(double x) const;  // |value|^2, not normalized
  double norm() const;             // integral of density
};

// two equal-weight packets at -d/2 and +d/2, zero momentum, released at
// t = 0 and evolved to time t. amplitudes 1/sqrt(2) each.
SpatialState symmetric_pair(double d, double sigma_d, double mass, double t);

// probability mass of a single packet centered at -d/2 leaking past x = 0:
// 0.5 * erfc((d/2) / (sqrt(2) sigma_t)) with sigma_t the evolved width
double leakage_epsilon(double d, double sigma_t);
double leakage_epsilon(double d, double sigma_d, double mass, double t);

// position of the index-th interference maximum at x > 0 for the symmetric
// pair, in units of sigma_d. sigma_d_over_d is the width-to-separation
// ratio, valid on (0, 0.1]; time is given in units of the overlap time.
// bracket is [(index-0.5), (index+0.5)] * (2 pi hbar t / (m d)); a
// 512-point scan locates the lobe and golden-section refines it well below
// 1e-4 sigma_d. throws std::runtime_error if no interior maximum exists.
double fringe_peak(double sigma_d_over_d, int index, double t_over_overlap);
double first_fringe_peak(double sigma_d_over_d, double t_over_overlap = 1.0);

// width manipulation by alternating trap frequencies: n full cycles between
// omega1 and a slower omega2 scale sigma0 by (omega2/omega1)^n.
struct SqueezeSpec {
  double omega1 = 0.0;  // faster trap [rad/s]
  double omega2 = 0.0;  // slower trap [rad/s], omega2 < omega1
  int n = 0;            // cycle count
  double gamma_squeeze_budget = 0.0;  // decoherence rate during protocol [1/s]
};

struct SqueezeReport {
  double factor = 1.0;    // width scale (omega2/omega1)^n
  double duration = 0.0;  // protocol time n/omega1 + n/omega2
  bool budget_ok = true;  // gamma_squeeze_budget * duration < 0.1
};

double squeeze_factor(const SqueezeSpec& spec);
double squeeze_duration(const SqueezeSpec& spec);
SqueezeReport squeeze_report(const SqueezeSpec& spec);

// returns the packet with sigma0 scaled by the squeeze factor and the clock
// restarted, ready for free spreading; center and momentum are kept.
GaussianPacket squeeze(const GaussianPacket& p, const SqueezeSpec& spec);

// uniform grid snapshot of a wavefunction
struct GridState {
  double x0 = 0.0;  // first node
  double dx = 0.0;
  std::vector<cplx> psi;

  double x_at(std::size_t j) const { return x0 + dx * static_cast<double>(j); }
};

GridState sample_to_grid(const SpatialState& s, double x_min, double x_max,
                         std::size_t n);

// split-step-free spectral propagation: psi <- ifft(exp(-i hbar k^2 dt/(2m))
// fft(psi)). requires negligible boundary amplitude (max edge value below
// 1e-8 of the peak), else throws std::runtime_error.
void spectral_propagate(GridState& g, double dt, double mass);

double grid_norm(const GridState& g);      // trapezoid of |psi|^2
double grid_mean(const GridState& g);      // position mean under |psi|^2
double grid_variance(const GridState& g);  // position variance
double l2_distance(const GridState& a, const GridState& b);

// trapezoid mass of |psi|^2 on nodes with x >= x_lo (half weight at the
// first included node and at the last node). x_lo should be a grid node
// for exact splits.
double probability_above(const GridState& g, double x_lo);

}  // namespace sqlab
