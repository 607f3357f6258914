#pragma once

// Single authoritative constants table; every module pulls from here.
// 2018 CODATA recommended values, SI.
namespace sqlab::constants {

inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double c_light = 299792458.0;       // m / s
inline constexpr double mu_bohr = 9.2740100783e-24;  // J / T

}  // namespace sqlab::constants
