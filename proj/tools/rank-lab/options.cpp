#include "options.hpp"

#include <cmath>
#include <stdexcept>

namespace ranklab::cli {

namespace {

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = text.find(',', start);
    out.push_back(CLI::detail::trim_copy(text.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

} // namespace

double parse_real(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v))
    throw std::invalid_argument(what + ": '" + text + "' is not a finite number");
  return v;
}

std::int64_t parse_count(const std::string& text, const std::string& what) {
  const double v = parse_real(text, what);
  if (v != std::floor(v) || std::abs(v) > 9.0e15)
    throw std::invalid_argument(what + ": '" + text + "' is not an integer");
  return static_cast<std::int64_t>(v);
}

std::vector<double> parse_reals(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& t : split(text)) out.push_back(parse_real(t, what));
  return out;
}

std::vector<std::int64_t> parse_counts(const std::string& text, const std::string& what) {
  std::vector<std::int64_t> out;
  for (const auto& t : split(text)) out.push_back(parse_count(t, what));
  return out;
}

CLI::Validator integer_text() {
  return CLI::Validator(
      [](std::string& value) -> std::string {
        try {
          value = std::to_string(parse_count(value, "value"));
        } catch (const std::invalid_argument& e) {
          return e.what();
        }
        return {};
      },
      "INT", "integer");
}

std::vector<std::string> splice_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  if (args.size() < 2) return args;
  std::vector<std::string> files;
  for (std::size_t i = 2; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) files.push_back(args[i + 1]);
    else if (args[i].rfind("--config=", 0) == 0) files.push_back(args[i].substr(9));
  }
  std::vector<std::string> injected;
  for (const auto& f : files) {
    for (const auto& item : CLI::ConfigINI().from_file(f)) {
      if (!item.parents.empty())
        throw CLI::ConversionError("config file " + f + ": sections are not supported (" + item.fullname() + ")");
      if (item.name == "config") continue;
      std::string value;
      for (std::size_t i = 0; i < item.inputs.size(); ++i) value += (i ? "," : "") + item.inputs[i];
      injected.push_back("--" + item.name + "=" + value);
    }
  }
  args.insert(args.begin() + 2, injected.begin(), injected.end());
  return args;
}

void add_common(CLI::App& sub, Common& common, const std::string& default_out) {
  common.out = default_out;
  sub.add_option("--config", common.config, "key=value file; explicit flags override it");
  sub.add_option("--seed", common.seed, "root seed")->transform(integer_text());
  sub.add_option("--workers", common.workers, "worker threads (results do not depend on it)")
      ->check(CLI::Range(1, 1024))
      ->transform(integer_text());
  sub.add_option("--chunk-size", common.chunk_size, "trials per random stream")
      ->check(CLI::Range(std::int64_t{1}, std::int64_t{1} << 40))
      ->transform(integer_text());
  sub.add_option("--out", common.out, "CSV output path");
}

std::string config_echo(const CLI::App& sub) {
  std::string text;
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help" || name == "config") continue;
    std::string value;
    if (opt->get_expected_min() == 0) {
      value = opt->count() > 0 && opt->as<bool>() ? "true" : "false";
    } else if (opt->count() > 0) {
      value = opt->results().back();
    } else {
      value = opt->get_default_str();
    }
    if (value.find_first_of(",\" #;") != std::string::npos || value.empty()) value = "\"" + value + "\"";
    text += name + "=" + value + "\n";
  }
  return text;
}

} // namespace ranklab::cli
