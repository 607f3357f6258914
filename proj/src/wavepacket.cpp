#include "sqlab/wavepacket.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

#include "sqlab/constants.hpp"

namespace sqlab {

namespace {

constexpr double pi = 3.14159265358979323846;
const cplx I{0.0, 1.0};

void require_packet(const GaussianPacket& p) {
  if (!(p.sigma0 > 0.0)) throw std::invalid_argument("packet sigma0 must be positive");
  if (!(p.mass > 0.0)) throw std::invalid_argument("packet mass must be positive");
  if (!(p.time >= 0.0)) throw std::invalid_argument("packet time must be nonnegative");
}

}  // namespace

cplx GaussianPacket::complex_width() const {
  return cplx{sigma0 * sigma0, constants::hbar * time / (2.0 * mass)};
}

cplx GaussianPacket::value(double x) const {
  require_packet(*this);
  const cplx c = complex_width();
  const double s2 = sigma0 * sigma0;
  const cplx norm = std::pow(2.0 * pi * s2, -0.25) * std::sqrt(cplx{s2, 0.0} / c);
  const double u = x - center;
  const double phase_t = constants::hbar * momentum * momentum * time / (2.0 * mass);
  return amplitude * norm * std::exp(-u * u / (4.0 * c) + I * (momentum * u + phase_t));
}

double GaussianPacket::width() const {
  return evolved_width(sigma0, mass, time);
}

void GaussianPacket::evolve(double dt) {
  require_packet(*this);
  if (!(time + dt >= 0.0)) throw std::invalid_argument("evolve would make time negative");
  center += constants::hbar * momentum * dt / mass;
  time += dt;
}

double evolved_width(double sigma0, double mass, double t) {
  if (!(sigma0 > 0.0) || !(mass > 0.0))
    throw std::invalid_argument("spread law needs positive sigma0 and mass");
  const double r = constants::hbar * t / (2.0 * mass * sigma0 * sigma0);
  return sigma0 * std::sqrt(1.0 + r * r);
}

double overlap_time(double sigma_d, double mass, double d) {
  if (!(sigma_d > 0.0) || !(mass > 0.0) || !(d > 0.0))
    throw std::invalid_argument("overlap time needs positive sigma_d, mass, d");
  return 2.0 * sigma_d * mass * d / constants::hbar;
}

cplx packet_overlap(const GaussianPacket& a, const GaussianPacket& b) {
  require_packet(a);
  require_packet(b);
  const cplx ca = std::conj(a.complex_width());
  const cplx cb = b.complex_width();
  const double sa2 = a.sigma0 * a.sigma0;
  const double sb2 = b.sigma0 * b.sigma0;
  const cplx na = std::conj(std::pow(2.0 * pi * sa2, -0.25) *
                            std::sqrt(cplx{sa2, 0.0} / a.complex_width()));
  const cplx nb = std::pow(2.0 * pi * sb2, -0.25) * std::sqrt(cplx{sb2, 0.0} / cb);
  const cplx pa = 1.0 / (4.0 * ca);
  const cplx pb = 1.0 / (4.0 * cb);
  const cplx p = pa + pb;
  const cplx q = 2.0 * pa * a.center + 2.0 * pb * b.center +
                 I * (b.momentum - a.momentum);
  const cplx r = -pa * a.center * a.center - pb * b.center * b.center +
                 I * (a.momentum * a.center - b.momentum * b.center);
  const double pha = constants::hbar * a.momentum * a.momentum * a.time / (2.0 * a.mass);
  const double phb = constants::hbar * b.momentum * b.momentum * b.time / (2.0 * b.mass);
  const cplx phase = std::exp(I * (phb - pha));
  return std::conj(a.amplitude) * b.amplitude * na * nb * phase *
         std::sqrt(pi / p) * std::exp(q * q / (4.0 * p) + r);
}

cplx SpatialState::value(double x) const {
  cplx v{0.0, 0.0};
  for (const auto& p : packets) v += p.value(x);
  return v;
}

double SpatialState::density(double x) const {
  return std::norm(value(x));
}

double SpatialState::norm() const {
  cplx total{0.0, 0.0};
  for (const auto& a : packets)
    for (const auto& b : packets) total += packet_overlap(a, b);
  if (std::abs(total.imag()) > 1e-12 * std::max(1.0, std::abs(total.real())))
    throw std::runtime_error("state norm has a nonreal residue");
  return total.real();
}

SpatialState symmetric_pair(double d, double sigma_d, double mass, double t) {
  if (!(d > 0.0)) throw std::invalid_argument("pair separation must be positive");
  const double amp = 1.0 / std::sqrt(2.0);
  GaussianPacket left{cplx{amp, 0.0}, -d / 2.0, 0.0, sigma_d, mass, t};
  GaussianPacket right{cplx{amp, 0.0}, d / 2.0, 0.0, sigma_d, mass, t};
  return SpatialState{{left, right}};
}

double leakage_epsilon(double d, double sigma_t) {
  if (!(d > 0.0) || !(sigma_t > 0.0))
    throw std::invalid_argument("leakage needs positive separation and width");
  return 0.5 * std::erfc((d / 2.0) / (std::sqrt(2.0) * sigma_t));
}

double leakage_epsilon(double d, double sigma_d, double mass, double t) {
  return leakage_epsilon(d, evolved_width(sigma_d, mass, t));
}

double fringe_peak(double sigma_d_over_d, int index, double t_over_overlap) {
  if (!(sigma_d_over_d > 0.0) || !(sigma_d_over_d <= 0.1))
    throw std::invalid_argument("width-to-separation ratio must be in (0, 0.1]");
  if (index < 1) throw std::invalid_argument("fringe index starts at 1");
  if (!(t_over_overlap > 0.0)) throw std::invalid_argument("time must be positive");
  // natural parameterization: sigma_d = 1 m, mass = hbar kg so hbar/m = 1
  const double d = 1.0 / sigma_d_over_d;
  const double t = t_over_overlap * 2.0 * d;  // overlap_time(1, hbar, d) = 2 d here
  const SpatialState s = symmetric_pair(d, 1.0, constants::hbar, t);
  const double spacing = 2.0 * pi * t / d;  // 2 pi hbar t / (m d)
  const double lo = (static_cast<double>(index) - 0.5) * spacing;
  const double hi = (static_cast<double>(index) + 0.5) * spacing;

  const std::size_t scan_n = 512;
  const double step = (hi - lo) / static_cast<double>(scan_n);
  double best_x = lo;
  double best_f = -1.0;
  for (std::size_t j = 0; j <= scan_n; ++j) {
    const double x = lo + step * static_cast<double>(j);
    const double f = s.density(x);
    if (f > best_f) {
      best_f = f;
      best_x = x;
    }
  }
  if (best_x <= lo + 0.5 * step || best_x >= hi - 0.5 * step)
    throw std::runtime_error("no interior fringe maximum in bracket");

  double a = best_x - step;
  double b = best_x + step;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = s.density(x1);
  double f2 = s.density(x2);
  while (b - a > 1e-10) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = s.density(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = s.density(x1);
    }
  }
  return (a + b) / 2.0;
}

double first_fringe_peak(double sigma_d_over_d, double t_over_overlap) {
  return fringe_peak(sigma_d_over_d, 1, t_over_overlap);
}

double squeeze_factor(const SqueezeSpec& spec) {
  if (!(spec.omega2 > 0.0) || !(spec.omega1 > spec.omega2))
    throw std::invalid_argument("squeeze needs omega1 > omega2 > 0");
  if (spec.n < 1) throw std::invalid_argument("squeeze needs at least one cycle");
  if (!(spec.gamma_squeeze_budget >= 0.0))
    throw std::invalid_argument("squeeze budget rate must be nonnegative");
  return std::pow(spec.omega2 / spec.omega1, spec.n);
}

double squeeze_duration(const SqueezeSpec& spec) {
  squeeze_factor(spec);  // validation
  const double n = static_cast<double>(spec.n);
  return n / spec.omega1 + n / spec.omega2;
}

SqueezeReport squeeze_report(const SqueezeSpec& spec) {
  SqueezeReport r;
  r.factor = squeeze_factor(spec);
  r.duration = squeeze_duration(spec);
  r.budget_ok = spec.gamma_squeeze_budget * r.duration < 0.1;
  return r;
}

GaussianPacket squeeze(const GaussianPacket& p, const SqueezeSpec& spec) {
  require_packet(p);
  GaussianPacket out = p;
  out.sigma0 = p.sigma0 * squeeze_factor(spec);
  out.time = 0.0;
  return out;
}

GridState sample_to_grid(const SpatialState& s, double x_min, double x_max,
                         std::size_t n) {
  if (!(x_max > x_min)) throw std::invalid_argument("grid span must be positive");
  if (n < 2 || (n & (n - 1)) != 0)
    throw std::invalid_argument("grid size must be a power of two >= 2");
  GridState g;
  g.x0 = x_min;
  g.dx = (x_max - x_min) / static_cast<double>(n);
  g.psi.resize(n);
  for (std::size_t j = 0; j < n; ++j) g.psi[j] = s.value(g.x_at(j));
  return g;
}

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

void spectral_propagate(GridState& g, double dt, double mass) {
  const std::size_t n = g.psi.size();
  if (n < 2) throw std::invalid_argument("grid too small to propagate");
  if (!(mass > 0.0)) throw std::invalid_argument("mass must be positive");

  double peak = 0.0;
  for (const auto& v : g.psi) peak = std::max(peak, std::abs(v));
  const double edge = std::max(std::abs(g.psi.front()), std::abs(g.psi.back()));
  if (peak > 0.0 && edge > 1e-8 * peak)
    throw std::runtime_error("wavefunction reaches the grid boundary; enlarge the span");

  std::vector<cplx> freq(n);
  auto* in = reinterpret_cast<fftw_complex*>(g.psi.data());
  auto* out = reinterpret_cast<fftw_complex*>(freq.data());
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fwd = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_1d(static_cast<int>(n), out, in, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (fwd == nullptr || bwd == nullptr) throw std::runtime_error("fftw plan creation failed");
  fftw_execute(fwd);

  const double dk = 2.0 * pi / (static_cast<double>(n) * g.dx);
  for (std::size_t j = 0; j < n; ++j) {
    const double jj = (j < n / 2) ? static_cast<double>(j)
                                  : static_cast<double>(j) - static_cast<double>(n);
    const double k = dk * jj;
    freq[j] *= std::exp(cplx{0.0, -constants::hbar * k * k * dt / (2.0 * mass)});
  }
  fftw_execute(bwd);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& v : g.psi) v *= scale;
}

namespace {

// trapezoid over the full grid with half weight at both ends
double trapezoid(const GridState& g, const std::vector<double>& f) {
  double sum = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double w = (j == 0 || j + 1 == f.size()) ? 0.5 : 1.0;
    sum += w * f[j];
  }
  return sum * g.dx;
}

}  // namespace

double grid_norm(const GridState& g) {
  std::vector<double> f(g.psi.size());
  for (std::size_t j = 0; j < f.size(); ++j) f[j] = std::norm(g.psi[j]);
  return trapezoid(g, f);
}

double grid_mean(const GridState& g) {
  std::vector<double> f(g.psi.size());
  for (std::size_t j = 0; j < f.size(); ++j) f[j] = g.x_at(j) * std::norm(g.psi[j]);
  return trapezoid(g, f) / grid_norm(g);
}

double grid_variance(const GridState& g) {
  const double mu = grid_mean(g);
  std::vector<double> f(g.psi.size());
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double u = g.x_at(j) - mu;
    f[j] = u * u * std::norm(g.psi[j]);
  }
  return trapezoid(g, f) / grid_norm(g);
}

double l2_distance(const GridState& a, const GridState& b) {
  if (a.psi.size() != b.psi.size() || a.dx != b.dx || a.x0 != b.x0)
    throw std::invalid_argument("grids must share nodes for a distance");
  double sum = 0.0;
  for (std::size_t j = 0; j < a.psi.size(); ++j) {
    const double w = (j == 0 || j + 1 == a.psi.size()) ? 0.5 : 1.0;
    sum += w * std::norm(a.psi[j] - b.psi[j]);
  }
  return std::sqrt(sum * a.dx);
}

double probability_above(const GridState& g, double x_lo) {
  const std::size_t n = g.psi.size();
  std::size_t first = n;
  for (std::size_t j = 0; j < n; ++j) {
    if (g.x_at(j) >= x_lo) {
      first = j;
      break;
    }
  }
  if (first >= n) return 0.0;
  double sum = 0.0;
  for (std::size_t j = first; j < n; ++j) {
    const double w = (j == first || j + 1 == n) ? 0.5 : 1.0;
    sum += w * std::norm(g.psi[j]);
  }
  return sum * g.dx;
}

}  // namespace sqlab
