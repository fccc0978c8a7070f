#include "adopt/config.hpp"

#include <charconv>
#include <chrono>
#include <cstdlib>

#include <fmt/format.h>

#include "adopt/csv.hpp"
#include "adopt/error.hpp"

namespace adopt {

namespace {

[[noreturn]] void fail(const std::string& message) { throw Error(ErrorKind::Usage, "config", message); }

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    fail(fmt::format("{}: '{}' is not a number", key, value));
  }
  return out;
}

std::chrono::milliseconds parse_ms(std::string_view key, std::string_view value) {
  const auto ms = parse_number<long long>(key, value);
  if (ms < 0) fail(fmt::format("{} must be non-negative", key));
  return std::chrono::milliseconds(ms);
}

}  // namespace

void set_config_value(Config& config, std::string_view key, std::string_view raw) {
  const std::string value = trim(raw);
  if (key == "base_url") {
    config.base_url = value;
  } else if (key == "store") {
    config.store = value;
  } else if (key == "registry") {
    config.registry = value;
  } else if (key == "aliases") {
    config.aliases = value;
  } else if (key == "splice_date") {
    const auto date = parse_date(value);
    if (!date) fail(fmt::format("splice_date: invalid date '{}'", value));
    config.splice_date = *date;
  } else if (key == "max_parallel") {
    const auto n = parse_number<int>(key, value);
    if (n < 1) fail("max_parallel must be at least 1");
    config.fetch.max_parallel = static_cast<std::size_t>(n);
  } else if (key == "retry_limit") {
    const auto n = parse_number<int>(key, value);
    if (n < 0) fail("retry_limit must be non-negative");
    config.fetch.retry_limit = n;
  } else if (key == "min_request_interval_ms") {
    config.fetch.min_request_interval = parse_ms(key, value);
  } else if (key == "backoff_base_ms") {
    config.fetch.backoff_base = parse_ms(key, value);
  } else if (key == "iqr_multiplier") {
    const auto k = parse_number<double>(key, value);
    if (!(k > 0)) fail("iqr_multiplier must be positive");
    config.iqr_multiplier = k;
  } else if (key == "timeout_seconds") {
    const auto n = parse_number<int>(key, value);
    if (n < 1) fail("timeout_seconds must be at least 1");
    config.timeout_seconds = n;
  } else {
    fail(fmt::format("unknown key '{}'", key));
  }
}

void apply_config_text(Config& config, std::string_view content) {
  std::size_t line_no = 0;
  for (const auto& raw : split(content, '\n')) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(fmt::format("line {}: expected key = value", line_no));
    try {
      set_config_value(config, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const Error& e) {
      fail(fmt::format("line {}: {}", line_no, e.detail()));
    }
  }
}

void apply_config_file(Config& config, const std::filesystem::path& path) {
  std::string content;
  try {
    content = read_file(path);
  } catch (const Error& e) {
    fail(e.detail());
  }
  apply_config_text(config, content);
}

void apply_env(Config& config, const EnvLookup& lookup) {
  if (auto v = lookup("ADOPT_BASE_URL")) config.base_url = *v;
  if (auto v = lookup("ADOPT_STORE")) config.store = *v;
  if (auto v = lookup("ADOPT_REGISTRY")) config.registry = *v;
  if (auto v = lookup("ADOPT_ALIASES")) config.aliases = *v;
}

std::optional<std::string> process_env(const char* name) {
  const char* value = std::getenv(name);
  if (value == nullptr || *value == '\0') return std::nullopt;
  return std::string(value);
}

}  // namespace adopt
