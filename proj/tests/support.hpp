#pragma once

#include <stdlib.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

#include "adopt/date.hpp"
#include "adopt/error.hpp"
#include "adopt/timeseries.hpp"

namespace test {

// Kind of the adopt::Error thrown by f, if any.
template <typename F>
std::optional<adopt::ErrorKind> thrown_kind(F&& f) {
  try {
    f();
  } catch (const adopt::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(ADOPT_FIXTURE_DIR) / name; }

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void spit(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << content;
}

class TempDir {
 public:
  TempDir() {
    std::string pattern = (std::filesystem::temp_directory_path() / "adopt-test-XXXXXX").string();
    path_ = ::mkdtemp(pattern.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// "429K", "1.3M", "2.4M" -> integer count.
inline double parse_abbrev(const std::string& text) {
  double scale = 1;
  std::string digits = text;
  switch (text.back()) {
    case 'K': scale = 1e3; digits.pop_back(); break;
    case 'M': scale = 1e6; digits.pop_back(); break;
    case 'B': scale = 1e9; digits.pop_back(); break;
    default: break;
  }
  return std::round(std::stod(digits) * scale);
}

// Half-width of the rounding interval implied by how a count was printed.
inline double abbrev_halfwidth(const std::string& text) {
  const auto dot = text.find('.');
  const std::size_t decimals = dot == std::string::npos ? 0 : text.size() - dot - 2;
  double unit = text.back() == 'K' ? 1e3 : text.back() == 'M' ? 1e6 : 1;
  return 0.5 * unit * std::pow(10.0, -static_cast<double>(decimals));
}

struct CaseRow {
  std::string bucket;
  std::string model;
  int t = 0;
  std::string downloads_text;
  double downloads = 0;
  double score = 0;
};

inline std::vector<CaseRow> load_case_rows() {
  std::vector<CaseRow> rows;
  std::istringstream in(slurp(fixture("ram_table.csv")));
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    rows.push_back({f[0], f[1], std::stoi(f[2]), f[3], parse_abbrev(f[3]), std::stod(f[4])});
  }
  return rows;
}

// k-th smallest (0-based) by counting, no sorting.
inline double order_statistic(const std::vector<double>& v, std::size_t k) {
  for (const double candidate : v) {
    std::size_t less = 0, equal = 0;
    for (const double x : v) {
      if (x < candidate) ++less;
      if (x == candidate) ++equal;
    }
    if (less <= k && k < less + equal) return candidate;
  }
  return NAN;
}

// Hyndman-Fan type 7 via order statistics.
inline double quantile_oracle(const std::vector<double>& v, double p) {
  const double h = (static_cast<double>(v.size()) - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double a = order_statistic(v, lo);
  if (lo + 1 >= v.size()) return a;
  const double b = order_statistic(v, lo + 1);
  return a + (h - static_cast<double>(lo)) * (b - a);
}

// Cumulative daily series with noisy but spike-free increments.
inline adopt::DownloadSeries smooth_series(std::mt19937_64& rng, const std::string& id, adopt::Date start,
                                           int days, double base) {
  std::uniform_real_distribution<double> jitter(0.8, 1.2);
  adopt::DownloadSeries s{id, {}};
  std::int64_t total = static_cast<std::int64_t>(base);
  for (int d = 0; d < days; ++d) {
    total += static_cast<std::int64_t>(std::llround(base * jitter(rng)));
    s.points.push_back({adopt::add_days(start, d), total});
  }
  return s;
}

// Local hub stand-in serving /api/models/<org>/<name> from a handler.
class StubHub {
 public:
  using Handler = std::function<void(const std::string& id, httplib::Response&)>;

  explicit StubHub(Handler handler) : handler_(std::move(handler)) {
    server_.Get(R"(/api/models/([^/]+/[^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      handler_(req.matches[1], res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubHub() {
    server_.stop();
    thread_.join();
  }
  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  Handler handler_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace test
