#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "domelimit/config.hpp"

namespace dome {

enum ExitCode : int {
  kExitOk = 0,
  kExitInfeasible = 2,
  kExitUnbounded = 3,
  kExitCertificate = 4,
  kExitConfig = 5,
  kExitNumerical = 6,
};

// Command-line overrides; unset fields keep the config's values.
struct CliOverrides {
  std::optional<std::string> out_dir;
  std::optional<int> jobs;
  std::optional<double> amplitude;
  bool export_program = false;
  bool verbose = false;
};

RunConfig apply_overrides(RunConfig cfg, const CliOverrides& o);

// Comment lines that open every CSV: title, units, settings hash, config echo.
std::string csv_preamble(const RunConfig& cfg, const std::string& title);

void write_convergence_csv(std::ostream& os, const RunConfig& cfg,
                           const std::vector<ConvergenceCell>& cells);
void write_sweep_csv(std::ostream& os, const RunConfig& cfg, const std::vector<SweepPoint>& pts);

int exit_code(const LimitResult& r);

int cmd_solve(const RunConfig& cfg, std::ostream& log);
int cmd_study(const RunConfig& cfg, std::ostream& log);

int cli_main(int argc, char** argv);

}  // namespace dome
