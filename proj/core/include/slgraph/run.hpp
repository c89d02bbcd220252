#ifndef SLGRAPH_RUN_HPP
#define SLGRAPH_RUN_HPP

#include <cstdint>
#include <iosfwd>
#include <string>

#include "slgraph/bracketing.hpp"

namespace slg {

enum class Command { Spectrum, Krein, Bracket, Asymptotics, Oracle, VerifyAll };

// Exit codes of run(): 0 success, 1 I/O, 2 validation, 3 hypothesis
// violation (positivity), 4 gated invariant failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitHypothesis = 3;
inline constexpr int kExitInvariant = 4;

struct RunConfig {
  Command command = Command::Spectrum;
  std::string input;
  std::string out_dir = ".";
  int mesh_override = 0;        // 0 = keep the file's meshes
  int truncation = 20;          // largest half-range Gram truncation
  double window_lo = -50.0;
  double window_hi = 50.0;
  bool window_set = false;
  double tol_bracket = -1.0;    // < 0 = automatic
  int probes = 100;
  std::uint64_t seed = 0;
  NondSign nond_sign = NondSign::Form;
  int fit_lo = 5, fit_hi = 30;  // asymptotics fit range
  bool dump_matrices = false;
};

/// Executes one CLI command: reads the graph, dispatches the computation and
/// writes the fixed-name reports under out_dir. Progress lines go to `out`,
/// machine-readable error JSON to `err`. Returns the exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace slg

#endif
