#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace gluepour {

enum class SolverChoice { Dbgp, Convex, Both };

struct RunConfig {
  std::string subcommand;
  std::filesystem::path scenario;
  std::filesystem::path policy;
  SolverChoice solver = SolverChoice::Dbgp;
  /// Tolerance for validation / certification; each command has its default.
  std::optional<double> tol;
  std::size_t max_iterations = 100000;
  bool clip = false;
  bool report = false;
  std::filesystem::path out;
  double eps_min = 0.0;
  double eps_max = 1.0;
  std::size_t steps = 11;
  std::size_t epochs = 5;
  std::optional<std::uint64_t> seed;
};

/// Exit codes shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUncertified = 2;

int cmd_solve(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_sweep_epsilon(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_validate(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_certify(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_generate(const RunConfig& c, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace gluepour
