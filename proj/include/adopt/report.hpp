#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "adopt/config.hpp"
#include "adopt/date.hpp"
#include "adopt/ram.hpp"
#include "adopt/registry.hpp"
#include "adopt/store.hpp"

namespace adopt {

enum class ReportKind {
  RegionDownloads,
  OrgDownloads,
  SizeDistribution,
  DerivativeShare,
  TokenShare,
  EloFrontier,
  IndexTrend,
  RamReference,
  RamTrajectory,
};

inline constexpr std::array<ReportKind, 9> kAllReportKinds{
    ReportKind::RegionDownloads, ReportKind::OrgDownloads, ReportKind::SizeDistribution,
    ReportKind::DerivativeShare, ReportKind::TokenShare,   ReportKind::EloFrontier,
    ReportKind::IndexTrend,      ReportKind::RamReference, ReportKind::RamTrajectory,
};

std::string_view to_string(ReportKind kind);
std::optional<ReportKind> parse_report_kind(std::string_view text);

enum class OutputFormat { Csv, Json };
std::optional<OutputFormat> parse_output_format(std::string_view text);

struct DateRange {
  std::optional<Date> from;
  std::optional<Date> to;

  bool contains(Date d) const { return (!from || d >= *from) && (!to || d <= *to); }
};

struct ReportSpec {
  ReportKind kind = ReportKind::RegionDownloads;
  DateRange range;
  std::string group_by;          // "region" or "organization" where applicable
  OutputFormat format = OutputFormat::Csv;
  std::filesystem::path output;  // empty: stdout, warnings to stderr
  std::filesystem::path input;   // derivative/arena/index/token CSV
  std::filesystem::path curve;   // saved reference curve for ram_trajectory
  std::string model;             // model id or variant group key
  std::optional<SizeBucket> bucket;
  std::optional<Date> reference_date;
  std::optional<Date> month;

  // Throws Usage when a kind-specific field is missing or inconsistent.
  void validate() const;
};

struct Cell {
  std::string text;
  bool numeric = false;
};

struct PlotSpec {
  std::string series_column;  // empty: the y column name is the series
  std::string x_column;
  std::vector<std::string> y_columns;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  PlotSpec plot;
  std::vector<std::string> warnings;
  std::optional<ReferenceCurve> curve;  // set by ram_reference

  std::size_t column(std::string_view name) const;  // throws Validation when absent
};

struct ReportContext {
  const Config* config = nullptr;
  const Registry* registry = nullptr;
  const SnapshotStore* store = nullptr;
  const OrgDirectory* directory = nullptr;
};

// Per-model series as used by the download reports: snapshots cleaned by the
// IQR filter, history spliced in.
struct PreparedSeries {
  std::map<std::string, MonthlySeries> monthly;
  SeriesMap daily;  // history labels merged ahead of cleaned snapshots
  std::vector<std::string> warnings;
};
PreparedSeries prepare_series(const Registry& registry, const SnapshotStore& store, const Config& config);

// Alias table from config.aliases, or the built-in one.
OrgDirectory open_directory(const Config& config);
// Throws Usage without a registry path and Validation when rows fail to load;
// row warnings are appended to `warnings`.
Registry open_registry(const Config& config, const OrgDirectory& directory, std::vector<std::string>* warnings);

Table build_report(const ReportSpec& spec, const ReportContext& context);

std::string render_csv(const Table& table);
std::string render_json(const Table& table, ReportKind kind);

// Long-form "series,x,y"; one row per (series, x).
Table emit_plot_data(const Table& table);

// Builds and writes the report plus a "<output>.log" sidecar with warnings.
// Without an output path the report goes to out and warnings to err. Returns
// 0 on success, 1 on data errors, 2 on usage errors; messages go to err.
int run_report(const ReportSpec& spec, const Config& config, std::ostream& out, std::ostream& err,
               const std::filesystem::path& plot_output = {});

}  // namespace adopt
