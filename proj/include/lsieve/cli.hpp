#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lsieve::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kCacheDirEnv = "LSIEVE_CACHE_DIR";

enum class ExitCode : int { kOk = 0, kUsage = 1, kAssertion = 2 };

enum class Format { kJson, kCsv };

struct RunConfig {
  std::string subcommand;
  std::optional<std::int64_t> Q;
  std::optional<std::int64_t> q_min;
  std::optional<std::int64_t> q_max;
  int k = 2;
  std::optional<std::int64_t> N;
  double epsilon = 0.0;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  Format format = Format::kJson;
  std::string cache_dir;
  std::string out;
  std::string method = "fast";    // spacing
  std::string alpha = "1/7";      // weyl
  std::int64_t tail = 1000;       // poisson
  bool values = false;            // gauss: include character values
  unsigned threads = 0;
};

struct ParseResult {
  std::optional<RunConfig> config;
  int exit_code = 0;  // meaningful when config is empty (help or usage error)
};

/// Parses argv. Help prints to `out` and yields exit 0; malformed input prints
/// a one-line message to `err` and yields exit 1. The cache directory falls
/// back to $LSIEVE_CACHE_DIR.
ParseResult parse_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Runs one subcommand. The report goes to `out` unless config.out names a
/// file; diagnostics go to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_args then run.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lsieve::cli
