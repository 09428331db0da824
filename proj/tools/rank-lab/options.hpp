#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ranklab/stats.hpp"

namespace ranklab::cli {

/// Accepts integers written in scientific notation ("1e6") and rewrites
/// them as plain integers before CLI11 converts the value.
CLI::Validator integer_text();

/// Comma-separated lists; throw std::invalid_argument on bad tokens.
std::vector<double> parse_reals(const std::string& text, const std::string& what);
std::vector<std::int64_t> parse_counts(const std::string& text, const std::string& what);
double parse_real(const std::string& text, const std::string& what);
std::int64_t parse_count(const std::string& text, const std::string& what);

/// argv with the key=value lines of every `--config FILE` spliced in right
/// after the subcommand name, as --key=value tokens. Explicit flags come
/// later on the command line and win (options use TakeLast).
std::vector<std::string> splice_config(int argc, char** argv);

/// Settings every subcommand shares.
struct Common {
  std::uint64_t seed = 1;
  int workers = 1;
  std::int64_t chunk_size = 4096;
  std::string out;
  std::string config;
  std::set<std::string> given; // long names of options set to a non-default value

  ParallelConfig parallel() const { return {seed, 0, workers, chunk_size}; }
};

void add_common(CLI::App& sub, Common& common, const std::string& default_out);

/// key=value echo of every option of `sub` (explicit or default), readable
/// back through --config.
std::string config_echo(const CLI::App& sub);

} // namespace ranklab::cli
