#pragma once

#include <cstdint>
#include <string>

#include "options.hpp"

namespace ranklab::cli {

/// Everything a command prints goes to `summary`; the caller echoes it to
/// stdout and next to the CSV.
struct Outcome {
  int exit_code = 0;
  std::string summary;
};

struct MlambdaArgs {
  std::string dist = "exp:1";
  double lambda = 0.0;
  double p = 1.0;
  std::int64_t samples = 100000;
  double margin = 0.0;
  std::int64_t hard_cap = 10'000'000;
  bool far_field = true;
  bool verdict = false;
  bool tail = false;
};

struct AnProbArgs {
  std::string n = "1000";
  std::string eps = "0.1";
  std::int64_t trials = 100000;
};

struct RobbinsArgs {
  std::string rule = "memoryless";
  std::string theta = "2,1,0";
  std::int64_t index = 1;
  double prob = 0.5;
  std::string n = "1000";
  double p = 1.0;
  std::int64_t trials = 100000;
  std::string mode = "auto";
  bool optimize = false;
  std::int64_t search_n = 0;
  std::int64_t search_trials = 0;
  std::int64_t budget = 60;
};

struct DpRankArgs {
  std::string n = "50";
  std::int64_t trials = 0;
};

struct DpFullArgs {
  std::int64_t n = 2;
  std::int64_t grid = 10000;
  std::int64_t trials = 0;
};

struct PoissonArgs {
  std::string boundary = "recip:2.0";
  double scap = 50.0;
  double p = 1.0;
  std::int64_t trials = 100000;
  std::string tune;
};

struct VerifyArgs {
  std::string suite;
  std::int64_t trials = 100000;
  std::string p = "1,2";
  std::string lambda;
  std::string eps = "0.1";
  std::string n;
  std::int64_t sigma_max = 100;
  std::string dist = "exp:1";
  std::string theta = "2,1,0";
  std::int64_t m_samples = 0;
};

Outcome run_mlambda(const MlambdaArgs& a, const Common& c);
Outcome run_an_prob(const AnProbArgs& a, const Common& c);
Outcome run_robbins(const RobbinsArgs& a, const Common& c);
Outcome run_dp_rank(const DpRankArgs& a, const Common& c);
Outcome run_dp_full(const DpFullArgs& a, const Common& c);
Outcome run_poisson(const PoissonArgs& a, const Common& c);
Outcome run_verify(const VerifyArgs& a, const Common& c);

} // namespace ranklab::cli
