#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adopt/date.hpp"
#include "adopt/registry.hpp"
#include "adopt/store.hpp"

namespace adopt {

struct FetchPolicy {
  std::size_t max_parallel = 8;
  int retry_limit = 3;  // retries after the first attempt, for 429/5xx/transport failures
  std::chrono::milliseconds min_request_interval{50};
  std::chrono::milliseconds backoff_base{200};  // doubled on each retry
};

struct HttpResponse {
  int status = 0;  // 0 means the request never completed
  std::string body;
  std::string error;
};

// GET against the hub. Implementations must be safe to call concurrently.
class HubTransport {
 public:
  virtual ~HubTransport() = default;
  virtual HttpResponse get(const std::string& path) = 0;
};

// cpp-httplib backed transport; one connection per request.
class HttpHubTransport : public HubTransport {
 public:
  explicit HttpHubTransport(std::string base_url,
                            std::chrono::seconds timeout = std::chrono::seconds{30});
  HttpResponse get(const std::string& path) override;

 private:
  std::string base_url_;
  std::chrono::seconds timeout_;
};

std::string model_api_path(std::string_view model_id);

struct ParsedDownloads {
  std::int64_t downloads = 0;
  std::string field;  // "downloadsAllTime" or "downloads"
};

// Prefers the all-time counter when the body carries it. Throws Format when
// neither field is a non-negative integer.
ParsedDownloads parse_downloads_body(std::string_view body);

enum class FetchFailureCause { NotFound, HttpStatus, Transport, Parse };

std::string_view to_string(FetchFailureCause cause);

struct FetchFailure {
  std::string model_id;
  FetchFailureCause cause = FetchFailureCause::Transport;
  int http_status = 0;
  int attempts = 0;
  std::string detail;
};

struct FetchReport {
  std::vector<FetchFailure> failures;            // sorted by model_id
  std::map<std::string, std::string> field_used;  // model_id -> JSON field read
  std::vector<std::chrono::steady_clock::time_point> request_starts;  // in issue order
  std::size_t peak_in_flight = 0;
};

struct FetchResult {
  std::vector<SnapshotPoint> points;  // sorted by model_id, all stamped run_date
  FetchReport report;
};

// Bounded-parallel fetch. Never more than max_parallel requests in flight and
// consecutive request starts are at least min_request_interval apart. A 404
// marks the model missing; 429/5xx/transport failures are retried with
// exponential backoff up to retry_limit; bodies without a valid count are
// parse failures. Partial success is normal.
FetchResult fetch_snapshots(std::span<const std::string> model_ids, const FetchPolicy& policy,
                            HubTransport& transport, Date run_date);

struct HistoricalMonthly {
  std::string model_id;
  Date month{};  // first-of-month label
  std::int64_t cumulative_downloads = 0;

  friend bool operator==(const HistoricalMonthly&, const HistoricalMonthly&) = default;
};

struct HistoryImport {
  std::vector<HistoricalMonthly> rows;
  ValidationReport report;
};

// CSV "model_id,month,cumulative_downloads" with month as YYYY-MM-01. Per
// model, months must strictly increase in file order; repeats and regressions
// are row errors. Ids missing from the registry are kept with a warning.
HistoryImport import_history(std::string_view content, const Registry* registry = nullptr);

std::vector<SnapshotPoint> to_points(std::span<const HistoricalMonthly> rows);

}  // namespace adopt
