#include "adopt/report.hpp"

#include <algorithm>
#include <iostream>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "adopt/benchmarks.hpp"
#include "adopt/csv.hpp"
#include "adopt/derivatives.hpp"
#include "adopt/error.hpp"
#include "adopt/series.hpp"

namespace adopt {

namespace {

constexpr std::string_view kModule = "report";

[[noreturn]] void fail(ErrorKind kind, const std::string& message) { throw Error(kind, std::string(kModule), message); }

constexpr std::array<std::string_view, 9> kKindNames{
    "region_downloads", "org_downloads", "size_distribution", "derivative_share", "token_share",
    "elo_frontier",     "index_trend",   "ram_reference",     "ram_trajectory",
};

Cell text(std::string s) { return {std::move(s), false}; }
Cell number(std::int64_t v) { return {fmt::format("{}", v), true}; }
Cell fixed(double v, int digits) { return {fmt::format("{:.{}f}", v, digits), true}; }

bool by_region(const ReportSpec& spec) { return spec.group_by.empty() || spec.group_by == "region"; }

bool needs_store(ReportKind kind) {
  switch (kind) {
    case ReportKind::RegionDownloads:
    case ReportKind::OrgDownloads:
    case ReportKind::SizeDistribution:
    case ReportKind::RamReference:
    case ReportKind::RamTrajectory:
      return true;
    default:
      return false;
  }
}

bool needs_input(ReportKind kind) {
  return kind == ReportKind::DerivativeShare || kind == ReportKind::TokenShare || kind == ReportKind::EloFrontier ||
         kind == ReportKind::IndexTrend;
}

const Registry& require_registry(const ReportContext& ctx) {
  if (ctx.registry == nullptr) fail(ErrorKind::Usage, "a registry is required for this report");
  return *ctx.registry;
}

const SnapshotStore& require_store(const ReportContext& ctx) {
  if (ctx.store == nullptr) fail(ErrorKind::Usage, "a store is required for this report");
  return *ctx.store;
}

const OrgDirectory& directory_of(const ReportContext& ctx) {
  return ctx.directory != nullptr ? *ctx.directory : OrgDirectory::builtin();
}

const Config& config_of(const ReportContext& ctx) {
  static const Config defaults;
  return ctx.config != nullptr ? *ctx.config : defaults;
}

std::string load_input(const ReportSpec& spec) { return read_file(spec.input); }

Table downloads_by_group(const ReportSpec& spec, const ReportContext& ctx, bool region) {
  const Registry& registry = require_registry(ctx);
  PreparedSeries prepared = prepare_series(registry, require_store(ctx), config_of(ctx));
  std::map<std::string, std::string> group_map;
  std::vector<MonthlySeries> list;
  for (const auto& record : registry.records()) {
    if (region && record.region == Region::Other) continue;
    group_map[record.model_id] = region ? std::string(to_string(record.region)) : record.organization;
    list.push_back(prepared.monthly.at(record.model_id));
  }
  const auto groups = aggregate_group(list, group_map);

  const std::string group_column = region ? "region" : "organization";
  Table table;
  table.columns = {"month", group_column, "cumulative_downloads"};
  table.plot = {group_column, "month", {"cumulative_downloads"}};
  table.warnings = std::move(prepared.warnings);
  std::map<std::pair<Date, std::string>, std::int64_t> cells;
  for (const auto& [group, series] : groups) {
    for (const auto& p : series.points) {
      if (spec.range.contains(p.label)) cells[{p.label, group}] = p.value;
    }
  }
  for (const auto& [key, value] : cells) {
    table.rows.push_back({text(format_month(key.first)), text(key.second), number(value)});
  }
  return table;
}

Table size_distribution(const ReportSpec& spec, const ReportContext& ctx) {
  const Registry& registry = require_registry(ctx);
  PreparedSeries prepared = prepare_series(registry, require_store(ctx), config_of(ctx));
  std::map<SizeBucket, std::int64_t> totals;
  std::int64_t total = 0;
  for (const auto& record : registry.records()) {
    std::int64_t latest = 0;
    for (const auto& p : prepared.monthly.at(record.model_id).points) {
      if (spec.range.to && p.label > *spec.range.to) break;
      latest = p.value;
    }
    totals[record.bucket()] += latest;
    total += latest;
  }
  Table table;
  table.columns = {"bucket", "downloads", "share"};
  table.plot = {"", "bucket", {"share"}};
  table.warnings = std::move(prepared.warnings);
  if (total == 0) table.warnings.push_back("no downloads recorded; shares are zero");
  for (const SizeBucket bucket : kAllBuckets) {
    const std::int64_t d = totals[bucket];
    const double share = total > 0 ? static_cast<double>(d) / static_cast<double>(total) : 0.0;
    table.rows.push_back({text(std::string(to_string(bucket))), number(d), fixed(share, 6)});
  }
  return table;
}

std::vector<Date> months_to_report(const ReportSpec& spec, const std::set<Date>& available) {
  if (spec.month) return {month_start(*spec.month)};
  std::vector<Date> out;
  for (const Date m : available) {
    if (spec.range.contains(m)) out.push_back(m);
  }
  return out;
}

Table derivative_report(const ReportSpec& spec, const ReportContext& ctx) {
  const Registry& registry = require_registry(ctx);
  const DerivativeLoad load = load_derivatives(load_input(spec));
  if (!load.report.ok()) {
    const auto& e = load.report.errors.front();
    fail(ErrorKind::Validation, fmt::format("{}: line {}: {} ({} row error(s))", spec.input.string(), e.line,
                                            e.message, load.report.errors.size()));
  }
  const auto filtered = filter_derivatives(load.records, registry);
  std::set<Date> months;
  for (const auto& a : filtered.accepted) months.insert(month_start(a.record.created_at));

  Table table;
  const std::string group_column = by_region(spec) ? "region" : "organization";
  table.columns = {"month", group_column, "count", "share"};
  table.plot = {group_column, "month", {"share"}};
  for (const auto& w : load.report.warnings) {
    table.warnings.push_back(fmt::format("line {}: {}: {}", w.line, w.id, w.message));
  }
  for (const auto& [cause, count] : filtered.rejected) {
    table.warnings.push_back(fmt::format("rejected {} derivative(s): {}", count, to_string(cause)));
  }
  const auto grouping = by_region(spec) ? DerivativeGrouping::Region : DerivativeGrouping::Organization;
  for (const Date month : months_to_report(spec, months)) {
    for (const auto& [group, s] : derivative_share(filtered.accepted, registry, grouping, month)) {
      table.rows.push_back({text(format_month(month)), text(group), number(static_cast<std::int64_t>(s.count)),
                            fixed(s.share, 6)});
    }
  }
  return table;
}

Table token_report(const ReportSpec& spec, const ReportContext& ctx) {
  const auto records = load_tokens(load_input(spec), ctx.registry, directory_of(ctx));
  std::set<Date> months;
  for (const auto& r : records) months.insert(r.month);

  Table table;
  const std::string group_column = by_region(spec) ? "region" : "organization";
  table.columns = {"month", group_column, "tokens", "share"};
  table.plot = {group_column, "month", {"share"}};
  table.warnings.push_back("token shares cover only the top 10 models listed per month");
  const auto grouping = by_region(spec) ? TokenGrouping::Region : TokenGrouping::Organization;
  for (const Date month : months_to_report(spec, months)) {
    const TokenShare share = token_share(records, grouping, month);
    if (share.shares.empty()) table.warnings.push_back(fmt::format("{}: no tokens recorded", format_month(month)));
    for (const auto& [group, value] : share.shares) {
      table.rows.push_back({text(format_month(month)), text(group), number(share.tokens.at(group)), fixed(value, 6)});
    }
  }
  return table;
}

constexpr std::array<Region, 3> kPlottedRegions{Region::USA, Region::China, Region::Europe};

Table frontier_report(const ReportSpec& spec, const ReportContext& ctx) {
  auto observations = load_arena(load_input(spec), ctx.registry, directory_of(ctx));
  std::size_t shifted = 0;
  for (auto& obs : observations) {
    const double before = obs.elo;
    obs = adjust_elo(std::move(obs));
    if (obs.elo != before) ++shifted;
  }
  Table table;
  table.columns = {"region", "date", "elo", "model_id"};
  table.plot = {"region", "date", {"elo"}};
  table.warnings.push_back(fmt::format("{} rating(s) before {} shifted by +{}", shifted,
                                       format_date(default_elo_cutover()), kEloShift));
  for (const Region region : kPlottedRegions) {
    for (const auto& p : elo_frontier(observations, region)) {
      if (!spec.range.contains(p.date)) continue;
      table.rows.push_back({text(std::string(to_string(region))), text(format_date(p.date)), fixed(p.elo, 1),
                            text(p.model_id)});
    }
  }
  return table;
}

Table trend_report(const ReportSpec& spec, const ReportContext& ctx) {
  auto observations = load_index(load_input(spec), ctx.registry, directory_of(ctx));
  std::erase_if(observations, [&](const IndexObservation& o) { return !spec.range.contains(o.observed_at); });
  Table table;
  table.columns = {"region", "date", "top_score", "trend"};
  table.plot = {"region", "date", {"top_score", "trend"}};
  for (const Region region : kPlottedRegions) {
    std::map<Date, double> top;
    for (const auto& o : observations) {
      if (o.region != region || o.observed_at < index_trend_start()) continue;
      auto [it, inserted] = top.try_emplace(o.observed_at, o.score);
      if (!inserted) it->second = std::max(it->second, o.score);
    }
    if (top.size() < 2) {
      if (!top.empty()) table.warnings.push_back(fmt::format("{}: too few dates for a trend", to_string(region)));
      continue;
    }
    const LinearFit fit = fit_linear_trend(observations, region);
    table.warnings.push_back(fmt::format("{}: slope {:.6f}/day, intercept {:.4f} at {}, rms {:.4f}, {} dates",
                                         to_string(region), fit.slope, fit.intercept, format_date(fit.epoch),
                                         fit.residual_rms, fit.points));
    for (const auto& [date, score] : top) {
      const double trend = fit.intercept + fit.slope * days_between(fit.epoch, date);
      table.rows.push_back({text(std::string(to_string(region))), text(format_date(date)), fixed(score, 4),
                            fixed(trend, 4)});
    }
  }
  return table;
}

Date latest_observation(const SeriesMap& series) {
  std::optional<Date> latest;
  for (const auto& [id, s] : series) {
    if (!s.empty() && (!latest || s.points.back().date > *latest)) latest = s.points.back().date;
  }
  if (!latest) fail(ErrorKind::InsufficientData, "store holds no observations");
  return *latest;
}

void warn_support(Table& table, const ReferenceCurve& curve) {
  for (const auto& m : curve.milestones) {
    if (m.reduced_support()) {
      table.warnings.push_back(fmt::format("{} at {}d: reduced support, {} of {} members", to_string(curve.bucket),
                                           m.t, m.support, kReferenceSize));
    }
  }
}

Table reference_report(const ReportSpec& spec, const ReportContext& ctx) {
  const Registry& registry = require_registry(ctx);
  PreparedSeries prepared = prepare_series(registry, require_store(ctx), config_of(ctx));
  const Date reference_date = spec.reference_date.value_or(latest_observation(prepared.daily));
  ReferenceCurve curve = build_reference_curve(*spec.bucket, registry, prepared.daily, reference_date);

  Table table;
  table.columns = {"bucket", "t", "median", "q1", "q3", "support", "reference_date"};
  table.plot = {"", "t", {"median", "q1", "q3"}};
  table.warnings = std::move(prepared.warnings);
  warn_support(table, curve);
  for (const auto& m : curve.milestones) {
    table.rows.push_back({text(std::string(to_string(curve.bucket))), number(m.t), fixed(m.median, 2),
                          fixed(m.q1, 2), fixed(m.q3, 2), number(static_cast<std::int64_t>(m.support)),
                          text(format_date(reference_date))});
  }
  table.curve = std::move(curve);
  return table;
}

SizeBucket bucket_of(const Registry& registry, std::string_view model_or_group) {
  if (const auto* record = registry.find(model_or_group)) return record->bucket();
  if (const auto* members = registry.group_members(model_or_group); members && !members->empty()) {
    return registry.find(members->front())->bucket();
  }
  fail(ErrorKind::Validation, fmt::format("'{}' is neither a tracked model nor a variant group", model_or_group));
}

Table trajectory_report(const ReportSpec& spec, const ReportContext& ctx) {
  const Registry& registry = require_registry(ctx);
  PreparedSeries prepared = prepare_series(registry, require_store(ctx), config_of(ctx));
  ReferenceCurve curve;
  if (!spec.curve.empty()) {
    nlohmann::json json;
    try {
      json = nlohmann::json::parse(read_file(spec.curve));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::Format, fmt::format("{}: {}", spec.curve.string(), e.what()));
    }
    curve = curve_from_json(json);
  } else {
    const Date reference_date = spec.reference_date.value_or(latest_observation(prepared.daily));
    curve = build_reference_curve(bucket_of(registry, spec.model), registry, prepared.daily, reference_date);
  }
  const auto scores = ram_trajectory(spec.model, registry, prepared.daily, curve);

  Table table;
  table.columns = {"model", "bucket", "t", "downloads", "score", "reference_date"};
  table.plot = {"model", "t", {"score"}};
  table.warnings = std::move(prepared.warnings);
  warn_support(table, curve);
  if (scores.empty()) table.warnings.push_back(fmt::format("{}: no milestone reached", spec.model));
  for (const auto& s : scores) {
    table.rows.push_back({text(s.model_id), text(std::string(to_string(s.bucket))), number(s.t),
                          number(static_cast<std::int64_t>(std::llround(s.downloads))), fixed(s.score, 2),
                          text(format_date(s.reference_date))});
  }
  return table;
}

nlohmann::json cell_json(const Cell& cell) {
  if (!cell.numeric) return cell.text;
  if (cell.text.find_first_of(".eE") == std::string::npos) return std::stoll(cell.text);
  return std::stod(cell.text);
}

}  // namespace

std::string_view to_string(ReportKind kind) { return kKindNames.at(static_cast<std::size_t>(kind)); }

std::optional<ReportKind> parse_report_kind(std::string_view text) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == text) return static_cast<ReportKind>(i);
  }
  return std::nullopt;
}

std::optional<OutputFormat> parse_output_format(std::string_view text) {
  if (text == "csv") return OutputFormat::Csv;
  if (text == "json") return OutputFormat::Json;
  return std::nullopt;
}

void ReportSpec::validate() const {
  const auto name = to_string(kind);
  if (range.from && range.to && *range.from > *range.to) {
    fail(ErrorKind::Usage, fmt::format("{}: date range starts after it ends", name));
  }
  if (!group_by.empty() && group_by != "region" && group_by != "organization") {
    fail(ErrorKind::Usage, fmt::format("{}: group-by must be region or organization", name));
  }
  if (needs_input(kind) && input.empty()) fail(ErrorKind::Usage, fmt::format("{} needs an input file", name));
  if (kind == ReportKind::RamReference && !bucket) fail(ErrorKind::Usage, "ram_reference needs a size bucket");
  if (kind == ReportKind::RamTrajectory && model.empty()) {
    fail(ErrorKind::Usage, "ram_trajectory needs a model or variant group id");
  }
}

std::size_t Table::column(std::string_view name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) fail(ErrorKind::Validation, fmt::format("no column '{}'", name));
  return static_cast<std::size_t>(it - columns.begin());
}

PreparedSeries prepare_series(const Registry& registry, const SnapshotStore& store, const Config& config) {
  const auto snapshots = store.load_all(Stream::Snapshots);
  const auto history = store.load_all(Stream::History);
  FilterConfig filter;
  filter.iqr_multiplier = config.iqr_multiplier;

  const auto& records = registry.records();
  struct Prepared {
    MonthlySeries monthly;
    DownloadSeries daily;
    std::vector<std::string> warnings;
  };
  std::vector<Prepared> results(records.size());
  const std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  parallel_for(records.size(), threads, [&](std::size_t i) {
    const std::string& id = records[i].model_id;
    Prepared& out = results[i];
    const auto snap_it = snapshots.find(id);
    const auto hist_it = history.find(id);
    DownloadSeries cleaned{id, {}};
    if (snap_it != snapshots.end()) {
      FilterResult filtered = iqr_filter(snap_it->second, filter);
      if (!filtered.flagged_dates.empty()) {
        out.warnings.push_back(fmt::format("{}: {} outlier day(s) replaced", id, filtered.flagged_dates.size()));
      }
      cleaned = std::move(filtered.series);
    }
    std::optional<MonthlySeries> history_monthly;
    if (hist_it != history.end()) history_monthly = history_as_monthly(hist_it->second);
    out.monthly = build_monthly(id, history_monthly ? &*history_monthly : nullptr,
                                cleaned.empty() ? nullptr : &cleaned, config.splice_date);
    for (const auto& p : out.monthly.points) {
      if (p.flags & kFlagClamped) {
        out.warnings.push_back(fmt::format("{}: {} increment clamped at zero", id, format_month(p.label)));
      }
    }
    out.daily = hist_it != history.end() ? merge_history_into_daily(hist_it->second, cleaned) : std::move(cleaned);
    out.daily.model_id = id;
    if (out.monthly.points.empty()) out.warnings.push_back(fmt::format("{}: no observations", id));
  });

  PreparedSeries prepared;
  for (std::size_t i = 0; i < records.size(); ++i) {
    prepared.monthly.emplace(records[i].model_id, std::move(results[i].monthly));
    prepared.daily.emplace(records[i].model_id, std::move(results[i].daily));
    for (auto& w : results[i].warnings) prepared.warnings.push_back(std::move(w));
  }
  for (const auto* stream : {&snapshots, &history}) {
    for (const auto& [id, series] : *stream) {
      if (!registry.contains(id)) prepared.warnings.push_back(fmt::format("{}: in store but not in registry", id));
    }
  }
  return prepared;
}

Table build_report(const ReportSpec& spec, const ReportContext& context) {
  spec.validate();
  switch (spec.kind) {
    case ReportKind::RegionDownloads:
      return downloads_by_group(spec, context, true);
    case ReportKind::OrgDownloads:
      return downloads_by_group(spec, context, false);
    case ReportKind::SizeDistribution:
      return size_distribution(spec, context);
    case ReportKind::DerivativeShare:
      return derivative_report(spec, context);
    case ReportKind::TokenShare:
      return token_report(spec, context);
    case ReportKind::EloFrontier:
      return frontier_report(spec, context);
    case ReportKind::IndexTrend:
      return trend_report(spec, context);
    case ReportKind::RamReference:
      return reference_report(spec, context);
    case ReportKind::RamTrajectory:
      return trajectory_report(spec, context);
  }
  fail(ErrorKind::Usage, "unknown report kind");
}

std::string render_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(table.columns[i]);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(row[i].text);
    }
    out += '\n';
  }
  return out;
}

std::string render_json(const Table& table, ReportKind kind) {
  if (table.curve) return to_json(*table.curve).dump(2) + "\n";
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = cell_json(row[i]);
    rows.push_back(std::move(obj));
  }
  nlohmann::ordered_json doc;
  doc["kind"] = std::string(to_string(kind));
  doc["columns"] = table.columns;
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

Table emit_plot_data(const Table& table) {
  Table out;
  out.columns = {"series", "x", "y"};
  out.plot = {"series", "x", {"y"}};
  if (table.plot.x_column.empty() || table.plot.y_columns.empty()) return out;
  const std::size_t x = table.column(table.plot.x_column);
  const std::optional<std::size_t> series =
      table.plot.series_column.empty() ? std::nullopt : std::optional(table.column(table.plot.series_column));
  std::vector<std::size_t> ys;
  for (const auto& y : table.plot.y_columns) ys.push_back(table.column(y));
  for (const std::size_t y : ys) {
    for (const auto& row : table.rows) {
      if (row[y].text.empty()) continue;
      std::string name;
      if (!series) {
        name = table.columns[y];
      } else if (ys.size() > 1) {
        name = row[*series].text + ":" + table.columns[y];
      } else {
        name = row[*series].text;
      }
      out.rows.push_back({text(std::move(name)), row[x], row[y]});
    }
  }
  std::stable_sort(out.rows.begin(), out.rows.end(),
                   [](const auto& a, const auto& b) { return a[0].text < b[0].text; });
  return out;
}

OrgDirectory open_directory(const Config& config) {
  return config.aliases.empty() ? OrgDirectory::builtin() : OrgDirectory::load(config.aliases);
}

Registry open_registry(const Config& config, const OrgDirectory& directory, std::vector<std::string>* warnings) {
  if (config.registry.empty()) fail(ErrorKind::Usage, "no registry given (--registry or ADOPT_REGISTRY)");
  ValidationReport report;
  Registry registry = load_registry_file(config.registry, &report, directory);
  if (!report.ok()) {
    const auto& e = report.errors.front();
    throw Error(ErrorKind::Validation, "registry",
                fmt::format("{}: line {}: {}: {} ({} row error(s))", config.registry.string(), e.line, e.id,
                            e.message, report.errors.size()));
  }
  if (warnings) {
    for (const auto& w : report.warnings) warnings->push_back(fmt::format("registry line {}: {}", w.line, w.message));
  }
  return registry;
}

int run_report(const ReportSpec& spec, const Config& config, std::ostream& out, std::ostream& err,
               const std::filesystem::path& plot_output) {
  try {
    spec.validate();
    const OrgDirectory directory = open_directory(config);
    std::vector<std::string> warnings;
    std::optional<Registry> registry;
    if (needs_store(spec.kind) || spec.kind == ReportKind::DerivativeShare || !config.registry.empty()) {
      registry = open_registry(config, directory, &warnings);
    }
    std::optional<SnapshotStore> store;
    if (needs_store(spec.kind)) {
      if (!std::filesystem::is_directory(config.store)) {
        fail(ErrorKind::Io, fmt::format("store '{}' does not exist", config.store.string()));
      }
      store.emplace(config.store);
    }
    const ReportContext context{&config, registry ? &*registry : nullptr, store ? &*store : nullptr, &directory};
    Table table = build_report(spec, context);
    warnings.insert(warnings.end(), table.warnings.begin(), table.warnings.end());

    const std::string body =
        spec.format == OutputFormat::Json ? render_json(table, spec.kind) : render_csv(table);
    std::string log;
    for (const auto& w : warnings) log += "warning: " + w + "\n";
    if (spec.output.empty()) {
      out << body;
      err << log;
    } else {
      write_file(spec.output, body);
      auto sidecar = spec.output;
      sidecar += ".log";
      write_file(sidecar, log);
    }
    if (!plot_output.empty()) write_file(plot_output, render_csv(emit_plot_data(table)));
    return 0;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return e.kind() == ErrorKind::Usage ? 2 : 1;
  } catch (const std::exception& e) {
    err << "[" << kModule << "] " << e.what() << "\n";
    return 1;
  }
}

}  // namespace adopt
