#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace c1vol::cli {

struct RunConfig {
  std::string command;
  std::string volume;
  int generic = 0;  // valency of random wedge volumes; 0 = use --volume
  std::string p = "3", r = "admissible", k = "0", L = "0";
  int samples = 5;
  std::uint64_t seed = 1;
  std::string mode = "auto";
  std::string kernel = "mds";
  std::string target = "builtin:cos-sin-cos";
  std::string out;
  double tol_rank = 1e-9;
  long max_dim = 50000;
  int audit_samples = 100;
};

enum ExitCode { ok = 0, validation_failure = 1, usage_error = 2 };

/// "3", "3..5" or "3,5,7".
std::vector<int> parse_range(const std::string& text);

/// Regularities for degree p: every admissible value when spec is "admissible".
std::vector<int> regularities(const std::string& spec, int p);

/// Worker count from C1VOL_THREADS, at least 1.
int worker_count();

int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_gluing(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_dim(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_basis(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_fit(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches; returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace c1vol::cli
