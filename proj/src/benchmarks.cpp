#include "adopt/benchmarks.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>

#include <fmt/format.h>

#include "adopt/csv.hpp"
#include "adopt/error.hpp"

namespace adopt {

namespace {

constexpr std::string_view kModule = "benchmarks";

[[noreturn]] void fail(ErrorKind kind, const std::string& message) { throw Error(kind, std::string(kModule), message); }

double parse_number(std::string_view text, std::size_t line) {
  const std::string s = trim(text);
  double value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) {
    fail(ErrorKind::Format, fmt::format("line {}: '{}' is not a finite number", line, text));
  }
  return value;
}

// Shared row walk for the three "<date>,model_id,<value>" inputs.
void for_each_row(std::string_view content, std::string_view date_column, std::string_view value_column,
                  const std::function<void(std::size_t, Date, const std::string&, std::string_view)>& fn) {
  const CsvTable table = parse_csv(content);
  const auto date_col = table.column(date_column);
  const auto id_col = table.column("model_id");
  const auto value_col = table.column(value_column);
  if (!date_col || !id_col || !value_col) {
    fail(ErrorKind::Format, fmt::format("header must be {},model_id,{}", date_column, value_column));
  }
  for (const auto& row : table.rows) {
    std::string date_text{table.cell(row, date_col)};
    if (date_column == "month" && date_text.size() == 7) date_text += "-01";
    const auto date = parse_date(date_text);
    const std::string id{table.cell(row, id_col)};
    if (!date) fail(ErrorKind::Format, fmt::format("line {}: invalid date '{}'", row.line, table.cell(row, date_col)));
    if (!is_valid_model_id(id)) fail(ErrorKind::Format, fmt::format("line {}: invalid model id '{}'", row.line, id));
    fn(row.line, *date, id, table.cell(row, value_col));
  }
}

}  // namespace

Date default_elo_cutover() { return make_date(2025, 5, 19); }

EloObservation adjust_elo(EloObservation obs, Date cutover, double shift) {
  if (obs.adjusted) {
    fail(ErrorKind::Validation, fmt::format("{} on {} already adjusted", obs.model_id, format_date(obs.observed_at)));
  }
  if (obs.observed_at < cutover) obs.elo += shift;
  obs.adjusted = true;
  return obs;
}

std::vector<FrontierPoint> elo_frontier(std::span<const EloObservation> observations, Region region) {
  std::map<Date, FrontierPoint> best;
  for (const auto& obs : observations) {
    if (obs.region != region) continue;
    if (!obs.adjusted) {
      fail(ErrorKind::Validation, fmt::format("{} on {} has not been adjusted", obs.model_id,
                                              format_date(obs.observed_at)));
    }
    if (!std::isfinite(obs.elo)) fail(ErrorKind::Validation, "non-finite Elo rating");
    auto [it, inserted] = best.try_emplace(obs.observed_at, FrontierPoint{obs.observed_at, obs.elo, obs.model_id});
    auto& point = it->second;
    // Ties resolve to the smaller id so the holder does not depend on input order.
    if (!inserted && (obs.elo > point.elo || (obs.elo == point.elo && obs.model_id < point.model_id))) {
      point.elo = obs.elo;
      point.model_id = obs.model_id;
    }
  }
  std::vector<FrontierPoint> frontier;
  for (const auto& [date, point] : best) {
    if (!frontier.empty() && point.elo <= frontier.back().elo) {
      frontier.push_back({date, frontier.back().elo, frontier.back().model_id});
    } else {
      frontier.push_back(point);
    }
  }
  return frontier;
}

Date index_trend_start() { return make_date(2024, 4, 1); }

LinearFit fit_ols(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail(ErrorKind::Validation, "x and y differ in length");
  const std::size_t n = x.size();
  if (n < 2) fail(ErrorKind::InsufficientData, "linear fit needs at least two points");
  double mean_x = 0, mean_y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mean_x) * (x[i] - mean_x);
    sxy += (x[i] - mean_x) * (y[i] - mean_y);
  }
  if (sxx == 0) fail(ErrorKind::Domain, "degenerate fit: all x values are equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  double sse = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    sse += r * r;
  }
  fit.residual_rms = std::sqrt(sse / static_cast<double>(n));
  fit.points = n;
  return fit;
}

LinearFit fit_linear_trend(std::span<const IndexObservation> observations, Region region) {
  std::map<Date, double> top;
  for (const auto& obs : observations) {
    if (obs.region != region || obs.observed_at < index_trend_start()) continue;
    if (!std::isfinite(obs.score)) fail(ErrorKind::Validation, "non-finite index score");
    auto [it, inserted] = top.try_emplace(obs.observed_at, obs.score);
    if (!inserted) it->second = std::max(it->second, obs.score);
  }
  if (top.size() < 2) {
    fail(ErrorKind::InsufficientData,
         fmt::format("{}: need at least two dates on or after 2024-04-01, have {}", to_string(region), top.size()));
  }
  const Date epoch = top.begin()->first;
  std::vector<double> x, y;
  for (const auto& [date, score] : top) {
    x.push_back(days_between(epoch, date));
    y.push_back(score);
  }
  LinearFit fit = fit_ols(x, y);
  fit.epoch = epoch;
  return fit;
}

TokenShare token_share(std::span<const TokenShareRecord> records, TokenGrouping group_by, Date month) {
  TokenShare out;
  std::int64_t total = 0;
  for (const auto& r : records) {
    if (month_start(r.month) != month_start(month)) continue;
    if (r.tokens < 0) fail(ErrorKind::Validation, fmt::format("{}: negative token count", r.model_id));
    const std::string group = group_by == TokenGrouping::Region ? std::string(to_string(r.region)) : r.organization;
    out.tokens[group] += r.tokens;
    total += r.tokens;
  }
  if (total == 0) {
    out.tokens.clear();
    return out;
  }
  for (const auto& [group, tokens] : out.tokens) {
    out.shares[group] = static_cast<double>(tokens) / static_cast<double>(total);
  }
  return out;
}

Attribution attribute_model(std::string_view model_id, const Registry* registry, const OrgDirectory& directory) {
  if (registry != nullptr) {
    if (const auto* record = registry->find(model_id)) return {record->organization, record->region};
  }
  const std::string ns = model_namespace(model_id);
  return {directory.canonical(ns), directory.region_of(ns)};
}

std::vector<EloObservation> load_arena(std::string_view content, const Registry* registry,
                                       const OrgDirectory& directory) {
  std::vector<EloObservation> out;
  for_each_row(content, "date", "elo", [&](std::size_t line, Date date, const std::string& id, std::string_view v) {
    out.push_back({id, attribute_model(id, registry, directory).region, date, parse_number(v, line), false});
  });
  return out;
}

std::vector<IndexObservation> load_index(std::string_view content, const Registry* registry,
                                         const OrgDirectory& directory) {
  std::vector<IndexObservation> out;
  for_each_row(content, "date", "score", [&](std::size_t line, Date date, const std::string& id, std::string_view v) {
    out.push_back({id, attribute_model(id, registry, directory).region, date, parse_number(v, line)});
  });
  return out;
}

std::vector<TokenShareRecord> load_tokens(std::string_view content, const Registry* registry,
                                          const OrgDirectory& directory) {
  std::vector<TokenShareRecord> out;
  std::map<Date, std::size_t> per_month;
  for_each_row(content, "month", "tokens", [&](std::size_t line, Date month, const std::string& id, std::string_view v) {
    std::int64_t tokens = -1;
    const std::string s = trim(v);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), tokens);
    if (ec != std::errc{} || ptr != s.data() + s.size() || tokens < 0) {
      fail(ErrorKind::Format, fmt::format("line {}: invalid token count '{}'", line, v));
    }
    if (++per_month[month_start(month)] > 10) {
      fail(ErrorKind::Validation, fmt::format("line {}: more than 10 models listed for {}", line, format_month(month)));
    }
    const Attribution who = attribute_model(id, registry, directory);
    out.push_back({month_start(month), id, who.organization, who.region, tokens});
  });
  return out;
}

}  // namespace adopt
