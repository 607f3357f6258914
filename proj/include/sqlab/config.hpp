#pragma once

// strict JSON experiment configs: unknown keys are rejected by dotted path,
// values are type-checked, missing parameters fall back to the documented
// defaults shipped with the example configs.

#include <cstdint>
#include <optional>
#include <string>

#include "sqlab/pipelines.hpp"

namespace sqlab {

enum class Pipeline { chsh, witness, evolve, feasibility, bs_check };

std::string pipeline_name(Pipeline p);

struct OutputSpec {
  std::string path = ".";
  std::string format = "json";  // json | csv (csv adds nothing today; both
                                // reports are json, tables are always csv)
};

struct EvolveParams {
  double sigma_d_over_d = 0.02;
  double t_over_overlap = 1.0;
  std::size_t samples = 2048;   // density profile rows
  double x_span_sigma = 30.0;   // profile covers [-span, +span] in sigma_d
  bool grid_compare = false;    // run the spectral oracle alongside
  std::size_t grid_n = 16384;   // oracle grid size, power of two
};

struct BsCheckParams {
  double theta0 = -1.5707963267948966;  // -pi/2
  double theta1 = 1.5707963267948966;   // +pi/2
};

struct ConfigDocument {
  Pipeline pipeline = Pipeline::chsh;
  std::uint64_t seed = 1;
  OutputSpec output;

  SternGerlachConfig chsh;
  CasimirConfig witness;
  EvolveParams evolve;
  FeasibilityInput feas;
  BsCheckParams bs;

  std::size_t shots = 0;  // monte carlo shots for chsh / witness
  SweepSpec sweep;
  bool has_sweep = false;
};

// documented defaults, also used by the shipped example configs
SternGerlachConfig default_chsh_config();
CasimirConfig default_witness_config();
FeasibilityInput default_feasibility_input();

// throws std::invalid_argument with a dotted key path on schema violations
ConfigDocument parse_config_text(const std::string& text);
ConfigDocument parse_config_file(const std::string& path);

}  // namespace sqlab
