#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "ness_chain/run_config.hpp"

namespace ness::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,
  kExitQuadrature = 3,
  kExitIdentity = 4,
};

/// Computes one report and writes it to cfg.output (or `out` when empty).
int cmd_currents(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// One CSV row per grid point, first axis outermost.
std::string sweep_csv(const RunConfig& cfg, std::size_t threads, int* failed_points = nullptr);
int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err);

struct IdentityCheck {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool quadrature = false;  // failure stems from quadrature rather than algebra
};

std::vector<IdentityCheck> run_identity_suite(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace ness::cli
