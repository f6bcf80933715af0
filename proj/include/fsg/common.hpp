#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#define FSG_VERSION "0.1.0"

namespace fsg {

// Exit-code contract shared with the CLI: 2 config, 3 I/O, 4 numerical.
class Error : public std::runtime_error {
public:
  Error(const std::string& msg, int exit_code)
      : std::runtime_error(msg), exit_code_(exit_code) {}
  int exit_code() const { return exit_code_; }

private:
  int exit_code_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg, 2) {}
};
struct IoError : Error {
  explicit IoError(const std::string& msg) : Error(msg, 3) {}
};
struct NumericError : Error {
  explicit NumericError(const std::string& msg) : Error(msg, 4) {}
};

struct OracleCapExceeded : ConfigError {
  explicit OracleCapExceeded(const std::string& msg) : ConfigError(msg) {}
};
struct InvalidConfig : ConfigError {
  explicit InvalidConfig(const std::string& msg) : ConfigError(msg) {}
};
struct InvalidPartition : ConfigError {
  explicit InvalidPartition(const std::string& msg) : ConfigError(msg) {}
};
struct EmptyOrIsolated : ConfigError {
  explicit EmptyOrIsolated(const std::string& msg) : ConfigError(msg) {}
};
struct IsolatedVertex : ConfigError {
  explicit IsolatedVertex(const std::string& msg) : ConfigError(msg) {}
};
struct LengthMismatch : ConfigError {
  explicit LengthMismatch(const std::string& msg) : ConfigError(msg) {}
};
struct TooFewPoints : ConfigError {
  explicit TooFewPoints(const std::string& msg) : ConfigError(msg) {}
};
struct UnsupportedFormat : IoError {
  explicit UnsupportedFormat(const std::string& msg) : IoError(msg) {}
};
struct AccuracyUnreachable : NumericError {
  explicit AccuracyUnreachable(const std::string& msg) : NumericError(msg) {}
};
struct NoConvergence : NumericError {
  explicit NoConvergence(const std::string& msg) : NumericError(msg) {}
};
struct DegenerateInput : NumericError {
  explicit DegenerateInput(const std::string& msg) : NumericError(msg) {}
};

// Worker pool size used by parallel helpers. 0 = hardware concurrency.
void set_worker_count(unsigned n);
unsigned worker_count();

// Runs fn(i) for i in [begin, end). Items must be independent.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn);

// Runs fn(block, lo, hi) over a fixed number of blocks so that callers can
// combine per-block partial results in block order, independent of the
// worker count.
void parallel_blocks(std::size_t n_items, std::size_t n_blocks,
                     const std::function<void(std::size_t, std::size_t,
                                              std::size_t)>& fn);

// Chunked variant of parallel_for: fn(lo, hi) on contiguous ranges.
void parallel_chunks(std::size_t begin, std::size_t end,
                     const std::function<void(std::size_t, std::size_t)>& fn);

double now_seconds();

// Peak resident set size in bytes (0 if unavailable).
std::size_t peak_rss_bytes();

}  // namespace fsg
