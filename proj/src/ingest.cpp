#include "adopt/ingest.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <httplib.h>

#include "adopt/csv.hpp"
#include "adopt/error.hpp"

namespace adopt {

namespace {

constexpr std::string_view kModule = "ingest";

bool is_retryable(const HttpResponse& response) {
  return response.status == 0 || response.status == 429 || response.status >= 500;
}

// Serializes request starts so that consecutive starts are spaced by at least
// the configured interval, across all workers.
class RequestPacer {
 public:
  explicit RequestPacer(std::chrono::milliseconds interval) : interval_(interval) {}

  std::chrono::steady_clock::time_point acquire() {
    std::lock_guard lock(mutex_);
    auto now = std::chrono::steady_clock::now();
    if (started_ && now < last_ + interval_) {
      std::this_thread::sleep_until(last_ + interval_);
      now = std::chrono::steady_clock::now();
    }
    started_ = true;
    last_ = now;
    starts_.push_back(now);
    return now;
  }

  std::vector<std::chrono::steady_clock::time_point> starts() const {
    std::lock_guard lock(mutex_);
    return starts_;
  }

 private:
  std::chrono::milliseconds interval_;
  mutable std::mutex mutex_;
  bool started_ = false;
  std::chrono::steady_clock::time_point last_{};
  std::vector<std::chrono::steady_clock::time_point> starts_;
};

struct Outcome {
  std::optional<SnapshotPoint> point;
  std::optional<FetchFailure> failure;
  std::string field;
};

}  // namespace

HttpHubTransport::HttpHubTransport(std::string base_url, std::chrono::seconds timeout)
    : base_url_(std::move(base_url)), timeout_(timeout) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

HttpResponse HttpHubTransport::get(const std::string& path) {
  httplib::Client client(base_url_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_follow_location(true);
  auto result = client.Get(path);
  if (!result) return {0, {}, httplib::to_string(result.error())};
  return {result->status, result->body, {}};
}

std::string model_api_path(std::string_view model_id) {
  // The default response carries only the trailing 30-day count.
  return fmt::format("/api/models/{}?expand%5B%5D=downloadsAllTime&expand%5B%5D=downloads", model_id);
}

std::string_view to_string(FetchFailureCause cause) {
  switch (cause) {
    case FetchFailureCause::NotFound: return "not_found";
    case FetchFailureCause::HttpStatus: return "http_status";
    case FetchFailureCause::Transport: return "transport";
    case FetchFailureCause::Parse: return "parse";
  }
  return "unknown";
}

ParsedDownloads parse_downloads_body(std::string_view body) {
  const auto json = nlohmann::json::parse(body, nullptr, false);
  if (json.is_discarded() || !json.is_object()) {
    throw Error(ErrorKind::Format, std::string(kModule), "response body is not a JSON object");
  }
  for (const char* field : {"downloadsAllTime", "downloads"}) {
    const auto it = json.find(field);
    if (it == json.end()) continue;
    if (!it->is_number_integer()) {
      throw Error(ErrorKind::Format, std::string(kModule), fmt::format("field '{}' is not an integer", field));
    }
    const auto value = it->get<std::int64_t>();
    if (value < 0) {
      throw Error(ErrorKind::Format, std::string(kModule),
                  fmt::format("field '{}' is negative ({})", field, value));
    }
    return {value, field};
  }
  throw Error(ErrorKind::Format, std::string(kModule), "response has no downloads field");
}

FetchResult fetch_snapshots(std::span<const std::string> model_ids, const FetchPolicy& policy,
                            HubTransport& transport, Date run_date) {
  if (policy.max_parallel == 0) {
    throw Error(ErrorKind::Validation, std::string(kModule), "max_parallel must be at least 1");
  }
  std::vector<Outcome> outcomes(model_ids.size());
  RequestPacer pacer(policy.min_request_interval);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> in_flight{0};
  std::atomic<std::size_t> peak{0};

  auto fetch_one = [&](std::size_t index) {
    const std::string& id = model_ids[index];
    Outcome& outcome = outcomes[index];
    HttpResponse response;
    int attempts = 0;
    while (true) {
      ++attempts;
      pacer.acquire();
      const std::size_t now_in_flight = ++in_flight;
      std::size_t seen = peak.load();
      while (now_in_flight > seen && !peak.compare_exchange_weak(seen, now_in_flight)) {
      }
      response = transport.get(model_api_path(id));
      --in_flight;
      if (!is_retryable(response) || attempts > policy.retry_limit) break;
      std::this_thread::sleep_for(policy.backoff_base * (1LL << std::min(attempts - 1, 16)));
    }

    if (response.status == 200) {
      try {
        const auto parsed = parse_downloads_body(response.body);
        outcome.point = SnapshotPoint{id, run_date, parsed.downloads};
        outcome.field = parsed.field;
      } catch (const Error& e) {
        outcome.failure = FetchFailure{id, FetchFailureCause::Parse, 200, attempts, e.detail()};
      }
      return;
    }
    FetchFailure failure{id, FetchFailureCause::HttpStatus, response.status, attempts, response.error};
    if (response.status == 404) {
      failure.cause = FetchFailureCause::NotFound;
      failure.detail = "model missing on hub";
    } else if (response.status == 0) {
      failure.cause = FetchFailureCause::Transport;
    } else if (failure.detail.empty()) {
      failure.detail = fmt::format("HTTP {}", response.status);
    }
    outcome.failure = std::move(failure);
  };

  const std::size_t workers = std::min(policy.max_parallel, model_ids.size());
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < model_ids.size(); i = next++) fetch_one(i);
      });
    }
  }

  FetchResult result;
  for (auto& outcome : outcomes) {
    if (outcome.point) {
      result.report.field_used[outcome.point->model_id] = outcome.field;
      result.points.push_back(std::move(*outcome.point));
    }
    if (outcome.failure) result.report.failures.push_back(std::move(*outcome.failure));
  }
  std::sort(result.points.begin(), result.points.end(),
            [](const auto& a, const auto& b) { return a.model_id < b.model_id; });
  std::sort(result.report.failures.begin(), result.report.failures.end(),
            [](const auto& a, const auto& b) { return a.model_id < b.model_id; });
  result.report.request_starts = pacer.starts();
  result.report.peak_in_flight = peak.load();
  return result;
}

HistoryImport import_history(std::string_view content, const Registry* registry) {
  const CsvTable table = parse_csv(content);
  const auto id_col = table.column("model_id");
  const auto month_col = table.column("month");
  const auto value_col = table.column("cumulative_downloads");
  if (!id_col || !month_col || !value_col) {
    throw Error(ErrorKind::Format, std::string(kModule),
                "history header must be model_id,month,cumulative_downloads");
  }

  HistoryImport out;
  std::map<std::string, Date, std::less<>> last_month;
  for (const auto& row : table.rows) {
    const std::string id{table.cell(row, id_col)};
    auto fail = [&](std::string message) { out.report.errors.push_back({row.line, id, std::move(message)}); };
    if (!is_valid_model_id(id)) {
      fail("invalid model id");
      continue;
    }
    const auto month = parse_date(table.cell(row, month_col));
    if (!month || month_start(*month) != *month) {
      fail(fmt::format("month '{}' is not a YYYY-MM-01 label", table.cell(row, month_col)));
      continue;
    }
    const auto text = table.cell(row, value_col);
    std::int64_t value = -1;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || value < 0) {
      fail(fmt::format("invalid cumulative_downloads '{}'", text));
      continue;
    }
    if (const auto it = last_month.find(id); it != last_month.end()) {
      if (*month == it->second) {
        fail(fmt::format("duplicate month {}", format_date(*month)));
        continue;
      }
      if (*month < it->second) {
        fail(fmt::format("non-monotone month sequence: {} after {}", format_date(*month),
                         format_date(it->second)));
        continue;
      }
    }
    last_month[id] = *month;
    if (registry != nullptr && !registry->contains(id)) {
      out.report.warnings.push_back({row.line, id, "model not in registry; kept"});
    }
    out.rows.push_back({id, *month, value});
  }
  return out;
}

std::vector<SnapshotPoint> to_points(std::span<const HistoricalMonthly> rows) {
  std::vector<SnapshotPoint> points;
  points.reserve(rows.size());
  for (const auto& row : rows) points.push_back({row.model_id, row.month, row.cumulative_downloads});
  return points;
}

}  // namespace adopt
