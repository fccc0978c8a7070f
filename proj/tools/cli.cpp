#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "adopt/csv.hpp"
#include "adopt/error.hpp"
#include "adopt/ingest.hpp"
#include "adopt/registry.hpp"
#include "adopt/report.hpp"
#include "adopt/series.hpp"
#include "adopt/store.hpp"

namespace adopt::cli {

namespace {

[[noreturn]] void usage(const std::string& message) { throw Error(ErrorKind::Usage, "cli", message); }

std::optional<Date> date_option(const std::string& text, std::string_view flag) {
  if (text.empty()) return std::nullopt;
  const auto date = parse_date(text);
  if (!date) usage(fmt::format("{}: invalid date '{}', expected YYYY-MM-DD", flag, text));
  return date;
}

// Flag values collected before the config file and env are applied.
struct GlobalFlags {
  std::string config_file;
  std::string store;
  std::string registry;
  std::string aliases;
  std::string base_url;
  std::string format = "csv";
};

struct ReportFlags {
  std::string from, to, month, reference_date;
  std::string group_by;
  std::string output, input, curve, model, bucket, plot;
};

void add_report_flags(CLI::App* cmd, ReportFlags& f) {
  cmd->add_option("--output,-o", f.output, "Output file (default: stdout)");
  cmd->add_option("--plot-data", f.plot, "Also write long-form series,x,y plot data here");
  cmd->add_option("--from", f.from, "First date included (YYYY-MM-DD)");
  cmd->add_option("--to", f.to, "Last date included (YYYY-MM-DD)");
}

Config resolve_config(const GlobalFlags& flags, const EnvLookup& env) {
  Config config;
  if (!flags.config_file.empty()) apply_config_file(config, flags.config_file);
  apply_env(config, env);
  if (!flags.store.empty()) config.store = flags.store;
  if (!flags.registry.empty()) config.registry = flags.registry;
  if (!flags.aliases.empty()) config.aliases = flags.aliases;
  if (!flags.base_url.empty()) config.base_url = flags.base_url;
  return config;
}

ReportSpec make_spec(ReportKind kind, const ReportFlags& f, const GlobalFlags& g) {
  ReportSpec spec;
  spec.kind = kind;
  spec.range.from = date_option(f.from, "--from");
  spec.range.to = date_option(f.to, "--to");
  spec.month = date_option(f.month, "--month");
  spec.reference_date = date_option(f.reference_date, "--reference-date");
  spec.group_by = f.group_by;
  spec.output = f.output;
  spec.input = f.input;
  spec.curve = f.curve;
  spec.model = f.model;
  if (!f.bucket.empty()) {
    spec.bucket = parse_size_bucket(f.bucket);
    if (!spec.bucket) usage(fmt::format("--bucket: unknown size bucket '{}'", f.bucket));
  }
  const auto format = parse_output_format(g.format);
  if (!format) usage(fmt::format("--format: expected csv or json, got '{}'", g.format));
  spec.format = *format;
  return spec;
}

void emit(const std::string& body, const std::string& output, std::ostream& out) {
  if (output.empty()) {
    out << body;
  } else {
    write_file(output, body);
  }
}

SnapshotStore open_store(const Config& config) {
  if (config.store.empty()) usage("no store given (--store or ADOPT_STORE)");
  return SnapshotStore(config.store);
}

SnapshotStore open_existing_store(const Config& config) {
  if (!std::filesystem::is_directory(config.store)) {
    throw Error(ErrorKind::Io, "store", fmt::format("store '{}' does not exist", config.store.string()));
  }
  return SnapshotStore(config.store);
}

void report_conflicts(const AppendResult& result, std::ostream& err) {
  for (const auto& c : result.conflicts) {
    err << fmt::format("conflict: {} {} already stored with a different value\n", c.model_id,
                       format_date(c.observed_at));
  }
  if (!result.conflicts.empty()) {
    throw Error(ErrorKind::Integrity, "store", fmt::format("{} conflicting record(s) not written",
                                                           result.conflicts.size()));
  }
}

int ingest_fetch(const Config& config, const std::vector<std::string>& models, const std::string& date_text,
                 std::ostream& out, std::ostream& err) {
  const OrgDirectory directory = open_directory(config);
  std::vector<std::string> warnings;
  const Registry registry = open_registry(config, directory, &warnings);
  for (const auto& w : warnings) err << "warning: " << w << "\n";
  std::vector<std::string> ids = models;
  if (ids.empty()) {
    for (const auto& r : registry.records()) ids.push_back(r.model_id);
  }
  for (const auto& id : ids) {
    if (!registry.contains(id)) usage(fmt::format("--model: '{}' is not in the registry", id));
  }
  const Date run_date = date_option(date_text, "--date").value_or(utc_today());
  SnapshotStore store = open_store(config);
  HttpHubTransport transport(config.base_url, std::chrono::seconds(config.timeout_seconds));
  const FetchResult result = fetch_snapshots(ids, config.fetch, transport, run_date);
  for (const auto& f : result.report.failures) {
    err << fmt::format("warning: {}: {} after {} attempt(s){}\n", f.model_id, to_string(f.cause), f.attempts,
                       f.detail.empty() ? "" : ": " + f.detail);
  }
  const AppendResult appended = store.append(Stream::Snapshots, result.points, "ingest fetch " + config.base_url);
  out << fmt::format("fetched {} of {} model(s); {} added, {} unchanged\n", result.points.size(), ids.size(),
                     appended.added, appended.unchanged);
  report_conflicts(appended, err);
  return 0;
}

int ingest_import(const Config& config, const std::string& file, std::ostream& out, std::ostream& err) {
  std::optional<Registry> registry;
  if (!config.registry.empty()) registry = open_registry(config, open_directory(config), nullptr);
  const HistoryImport imported = import_history(read_file(file), registry ? &*registry : nullptr);
  for (const auto& w : imported.report.warnings) {
    err << fmt::format("warning: line {}: {}: {}\n", w.line, w.id, w.message);
  }
  if (!imported.report.ok()) {
    for (const auto& e : imported.report.errors) err << fmt::format("error: line {}: {}: {}\n", e.line, e.id, e.message);
    throw Error(ErrorKind::Validation, "ingest",
                fmt::format("{}: {} row error(s); nothing imported", file, imported.report.errors.size()));
  }
  SnapshotStore store = open_store(config);
  const auto points = to_points(imported.rows);
  const AppendResult appended = store.append(Stream::History, points, "ingest import " + file);
  out << fmt::format("imported {} row(s); {} added, {} unchanged\n", points.size(), appended.added,
                     appended.unchanged);
  report_conflicts(appended, err);
  return 0;
}

DownloadSeries require_series(const SnapshotStore& store, const std::string& model, Stream stream) {
  DownloadSeries series = load_series(store, model, stream);
  return series;
}

int series_command(const std::string& action, const Config& config, const std::string& model,
                   const std::string& splice_text, const std::string& output, std::ostream& out,
                   std::ostream& err) {
  const SnapshotStore store = open_existing_store(config);
  const DownloadSeries snapshots = require_series(store, model, Stream::Snapshots);
  FilterConfig filter;
  filter.iqr_multiplier = config.iqr_multiplier;
  if (action == "filter") {
    if (snapshots.empty()) throw Error(ErrorKind::InsufficientData, "series", model + ": no snapshots stored");
    const FilterResult result = iqr_filter(snapshots, filter);
    if (result.too_short) err << fmt::format("warning: {}: too few points to filter\n", model);
    emit(series_csv(result.series, result.flagged_dates), output, out);
    return 0;
  }
  const FilterResult cleaned = iqr_filter(snapshots, filter);
  if (action == "rollup") {
    if (snapshots.empty()) throw Error(ErrorKind::InsufficientData, "series", model + ": no snapshots stored");
    const MonthlySeries monthly = monthly_rollup(cleaned.series);
    emit(series_csv(std::span(&monthly, 1)), output, out);
    return 0;
  }
  const DownloadSeries history = require_series(store, model, Stream::History);
  if (history.empty()) throw Error(ErrorKind::Splice, "series", model + ": no monthly history stored");
  const MonthlySeries baseline = history_as_monthly(history);
  std::optional<Date> splice_date = date_option(splice_text, "--splice-date");
  if (!splice_date) splice_date = config.splice_date;
  const MonthlySeries spliced = build_monthly(model, &baseline, &cleaned.series, splice_date);
  emit(series_csv(std::span(&spliced, 1)), output, out);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
  CLI::App app{"Open-model adoption analytics"};
  app.name("adopt");
  app.require_subcommand(1);
  GlobalFlags g;
  app.add_option("--config", g.config_file, "key = value configuration file");
  app.add_option("--store", g.store, "Snapshot store directory");
  app.add_option("--registry", g.registry, "Model registry CSV");
  app.add_option("--aliases", g.aliases, "Organization alias table CSV");
  app.add_option("--base-url", g.base_url, "Hub base URL");
  app.add_option("--format", g.format, "Output format: csv or json");

  auto* ingest = app.add_subcommand("ingest", "Collect download counts")->require_subcommand(1);
  std::vector<std::string> fetch_models;
  std::string fetch_date;
  auto* fetch = ingest->add_subcommand("fetch", "Snapshot cumulative downloads from the hub");
  fetch->add_option("--model", fetch_models, "Restrict to these model ids");
  fetch->add_option("--date", fetch_date, "Snapshot date (default: today, UTC)");
  std::string import_file;
  auto* import = ingest->add_subcommand("import", "Import monthly history CSV");
  import->add_option("--file", import_file, "model_id,month,cumulative_downloads")->required();

  auto* series = app.add_subcommand("series", "Per-model series operations")->require_subcommand(1);
  std::string series_model, splice_text, series_output;
  for (const char* name : {"filter", "splice", "rollup"}) {
    auto* cmd = series->add_subcommand(name);
    cmd->add_option("--model", series_model, "Model id")->required();
    cmd->add_option("--output,-o", series_output, "Output file (default: stdout)");
    if (std::string_view(name) == "splice") cmd->add_option("--splice-date", splice_text, "Splice date");
  }

  ReportFlags rf;
  auto* derivatives = app.add_subcommand("derivatives", "Derivative model shares")->require_subcommand(1);
  auto* share = derivatives->add_subcommand("share", "Monthly share of new derivatives by base");
  share->add_option("--file", rf.input, "child_id,base_tag,lifetime_downloads,format_tags,created_at")->required();
  share->add_option("--month", rf.month, "Any date inside the month to report");
  share->add_option("--group-by", rf.group_by, "region or organization");
  add_report_flags(share, rf);

  auto* ram = app.add_subcommand("ram", "Relative adoption metric")->require_subcommand(1);
  auto* reference = ram->add_subcommand("reference", "Top-10 reference curve for a size bucket");
  reference->add_option("--bucket", rf.bucket, "Size bucket, e.g. 7-9B")->required();
  reference->add_option("--reference-date", rf.reference_date, "Top-10 selection date");
  add_report_flags(reference, rf);
  auto* score = ram->add_subcommand("score", "Scores at each milestone for a model or variant group");
  score->add_option("--model", rf.model, "Model id or variant group")->required();
  score->add_option("--reference-date", rf.reference_date, "Top-10 selection date");
  score->add_option("--curve", rf.curve, "Saved reference curve JSON");
  add_report_flags(score, rf);

  auto* bench = app.add_subcommand("bench", "Benchmark and usage series")->require_subcommand(1);
  auto* frontier = bench->add_subcommand("frontier", "Regional Arena Elo frontier");
  auto* trend = bench->add_subcommand("trend", "Regional index linear trend");
  auto* tokens = bench->add_subcommand("tokens", "Token share by region or organization");
  for (auto* cmd : {frontier, trend, tokens}) {
    cmd->add_option("--file", rf.input, "Input CSV")->required();
    add_report_flags(cmd, rf);
  }
  tokens->add_option("--group-by", rf.group_by, "region or organization");
  tokens->add_option("--month", rf.month, "Any date inside the month to report");

  std::string kind_text;
  auto* report = app.add_subcommand("report", "Tabular report of one kind");
  report->add_option("kind", kind_text, "Report kind")->required();
  report->add_option("--input", rf.input, "Input CSV for derivative/benchmark reports");
  report->add_option("--model", rf.model, "Model id or variant group");
  report->add_option("--bucket", rf.bucket, "Size bucket");
  report->add_option("--reference-date", rf.reference_date, "Top-10 selection date");
  report->add_option("--curve", rf.curve, "Saved reference curve JSON");
  report->add_option("--month", rf.month, "Any date inside the month to report");
  report->add_option("--group-by", rf.group_by, "region or organization");
  add_report_flags(report, rf);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "[cli] " << e.what() << "\n";
    return 2;
  }

  try {
    const Config config = resolve_config(g, env);
    auto run_kind = [&](ReportKind kind) {
      return run_report(make_spec(kind, rf, g), config, out, err, rf.plot);
    };
    if (fetch->parsed()) return ingest_fetch(config, fetch_models, fetch_date, out, err);
    if (import->parsed()) return ingest_import(config, import_file, out, err);
    if (series->parsed()) {
      const auto* cmd = series->get_subcommands().front();
      return series_command(cmd->get_name(), config, series_model, splice_text, series_output, out, err);
    }
    if (share->parsed()) return run_kind(ReportKind::DerivativeShare);
    if (reference->parsed()) return run_kind(ReportKind::RamReference);
    if (score->parsed()) return run_kind(ReportKind::RamTrajectory);
    if (frontier->parsed()) return run_kind(ReportKind::EloFrontier);
    if (trend->parsed()) return run_kind(ReportKind::IndexTrend);
    if (tokens->parsed()) return run_kind(ReportKind::TokenShare);
    if (report->parsed()) {
      const auto kind = parse_report_kind(kind_text);
      if (!kind) usage(fmt::format("unknown report kind '{}'", kind_text));
      return run_kind(*kind);
    }
    usage("no command given");
  } catch (const Error& e) {
    err << e.what() << "\n";
    return e.kind() == ErrorKind::Usage ? 2 : 1;
  } catch (const std::exception& e) {
    err << "[cli] " << e.what() << "\n";
    return 1;
  }
}

}  // namespace adopt::cli
