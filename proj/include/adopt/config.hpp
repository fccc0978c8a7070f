#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "adopt/date.hpp"
#include "adopt/ingest.hpp"

namespace adopt {

struct Config {
  std::string base_url = "https://huggingface.co";
  std::filesystem::path store = "store";
  std::filesystem::path registry;
  std::filesystem::path aliases;  // empty: built-in alias table
  std::optional<Date> splice_date;
  FetchPolicy fetch;
  double iqr_multiplier = 2.5;
  int timeout_seconds = 30;
};

// Lines of "key = value"; '#' starts a comment. Unknown keys and bad values
// throw Usage naming the line.
void apply_config_text(Config& config, std::string_view content);
void apply_config_file(Config& config, const std::filesystem::path& path);

// ADOPT_BASE_URL, ADOPT_STORE, ADOPT_REGISTRY, ADOPT_ALIASES.
using EnvLookup = std::function<std::optional<std::string>(const char*)>;
void apply_env(Config& config, const EnvLookup& lookup);
std::optional<std::string> process_env(const char* name);

// Sets one key, as from the file form.
void set_config_value(Config& config, std::string_view key, std::string_view value);

}  // namespace adopt
