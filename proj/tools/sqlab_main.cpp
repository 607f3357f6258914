#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "sqlab/commands.hpp"

namespace {

// SQLAB_THREADS caps sweep parallelism; absent or empty means no cap
bool parse_thread_cap(unsigned& cap) {
  const char* raw = std::getenv("SQLAB_THREADS");
  if (raw == nullptr || *raw == '\0') { cap = 0; return true; }
  char* end = nullptr;
  const unsigned long value = std::strtoul(raw, &end, 10);
  if (end == raw || *end != '\0' || value == 0 || value > 4096) return false;
  cap = static_cast<unsigned>(value);
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"single-particle spatial-qubit experiment toolkit"};
  app.require_subcommand(1);

  const char* names[] = {"chsh", "witness", "evolve", "feasibility", "bs-check"};
  const char* blurbs[] = {
      "entangled spin-path correlation experiment",
      "two-particle entanglement witness experiment",
      "free wavepacket spreading and interference profile",
      "timing and detector-window feasibility summary",
      "detector-pair beam-splitter equivalence check",
  };

  std::string chosen;
  sqlab::CliOptions options;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> shots;
  for (int i = 0; i < 5; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], blurbs[i]);
    sub->add_option("--config", options.config_path, "path to a JSON config")
        ->required();
    sub->add_option("--out", options.out_dir, "output directory (default: config value)");
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--shots", shots, "override the Monte Carlo shot count");
    sub->callback([&chosen, name = names[i]] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  options.seed = seed;
  options.shots = shots;
  if (!parse_thread_cap(options.max_threads)) {
    std::cerr << "config error: SQLAB_THREADS must be a positive integer\n";
    return 2;
  }
  return sqlab::run_command(chosen, options);
}
