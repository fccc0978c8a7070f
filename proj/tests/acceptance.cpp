// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "adopt/benchmarks.hpp"
#include "adopt/config.hpp"
#include "adopt/derivatives.hpp"
#include "adopt/error.hpp"
#include "adopt/ingest.hpp"
#include "adopt/ram.hpp"
#include "adopt/report.hpp"
#include "adopt/series.hpp"
#include "adopt/store.hpp"
#include "ram_oracle.hpp"
#include "support.hpp"

using namespace adopt;
using namespace std::chrono_literals;
using Clock = std::chrono::steady_clock;

namespace {

// Tolerances.
constexpr double kScoreTolerance = 0.02;      // published scores carry two decimals
constexpr double kMedianSpread = 0.02;        // relative spread of implied medians per cell
constexpr double kCrossCheckTolerance = 0.06;  // three-significant-figure inputs
constexpr double kShareTolerance = 1e-9;
constexpr double kOlsTolerance = 1e-9;
constexpr auto kTableRuntime = 1s;
constexpr auto kScaleRuntime = 10s;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
    ++total_;
  }
  Outcome outcome(const std::string& summary) const {
    if (failed_ == 0) return {true, summary};
    std::string detail = fmt::format("{} of {} checks failed", failed_, total_);
    for (const auto& f : failures_) detail += "; " + f;
    return {false, detail};
  }

 private:
  std::vector<std::string> failures_;
  std::size_t failed_ = 0;
  std::size_t total_ = 0;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Outcome ac1_table() {
  Check check;
  const auto start = Clock::now();
  const auto rows = test::load_case_rows();
  check.expect(rows.size() == 57, fmt::format("{} case rows", rows.size()));
  for (const auto& r : rows) {
    const double median = std::round(r.downloads / r.score);
    const double score = ram_score(r.downloads, median);
    check.expect(std::abs(score - r.score) <= kScoreTolerance,
                 fmt::format("{} t={} scored {:.3f} vs {:.2f}", r.model, r.t, score, r.score));
  }
  double worst_point = 0;
  std::string informational;
  for (const auto& [key, cell] : test::rows_by_cell(rows)) {
    const double minimal = test::minimal_spread(cell);
    check.expect(minimal <= kMedianSpread,
                 fmt::format("{}@{} medians spread {:.2f}% after rounding", key.first, key.second, 100 * minimal));
    const double point = test::point_spread(cell);
    worst_point = std::max(worst_point, point);
    if (point > kMedianSpread) informational += fmt::format(" {}@{}={:.1f}%", key.first, key.second, 100 * point);
  }
  std::vector<double> example;
  for (const auto& r : rows) {
    if (r.bucket == "100-250B" && r.t == 7) example.push_back(test::implied_median(r));
  }
  const auto [lo, hi] = std::minmax_element(example.begin(), example.end());
  check.expect(example.size() == 4 && *lo > 20'500 && *hi < 21'500, "100-250B@7 implied medians not near 21.0K");
  const double elapsed = seconds_since(start);
  check.expect(elapsed < std::chrono::duration<double>(kTableRuntime).count(), fmt::format("took {:.3f}s", elapsed));
  return check.outcome(fmt::format(
      "{} rows within +-{} of published scores; every cell has a common median within rounding; "
      "100-250B@7 medians {:.0f}..{:.0f}; point spreads above 2% (input rounding):{}; {:.3f}s",
      rows.size(), kScoreTolerance, *lo, *hi, informational.empty() ? " none" : informational, elapsed));
}

Outcome ac2_cross_check() {
  Check check;
  const Date release = make_date(2026, 3, 2);
  const Registry registry({{"Qwen/Qwen3.5-4B", "Qwen", Region::China, 4'000'000'000, std::nullopt, release, ""}});
  SeriesMap series;
  series["Qwen/Qwen3.5-4B"] = DownloadSeries{
      "Qwen/Qwen3.5-4B",
      {{add_days(release, 7), 166'000}, {add_days(release, 14), 751'000}, {add_days(release, 30), 2'400'000}}};
  ReferenceCurve curve;
  curve.bucket = SizeBucket::B1to5;
  curve.reference_date = make_date(2026, 4, 2);
  for (int i = 0; i < 10; ++i) curve.members.push_back(fmt::format("ref/m{}", i));
  curve.milestones = {{7, 48'000, 20'000, 90'000, 10}, {14, 142'000, 60'000, 300'000, 10},
                      {30, 722'000, 300'000, 1'500'000, 10}};
  const auto scores = ram_trajectory("Qwen/Qwen3.5-4B", registry, series, curve);
  const std::vector<double> published{3.45, 5.29, 3.27};
  check.expect(scores.size() == published.size(), fmt::format("{} scores", scores.size()));
  std::string listing;
  for (std::size_t i = 0; i < std::min(scores.size(), published.size()); ++i) {
    check.expect(std::abs(scores[i].score - published[i]) <= kCrossCheckTolerance,
                 fmt::format("t={} {:.3f} vs {:.2f}", scores[i].t, scores[i].score, published[i]));
    listing += fmt::format("{}{:.2f}", i ? "/" : "", scores[i].score);
  }
  return check.outcome(fmt::format("trajectory {} vs published 3.45/5.29/3.27 (+-{})", listing, kCrossCheckTolerance));
}

// Raw scraper value for a label: the last snapshot strictly before it.
std::optional<std::int64_t> raw_at(const DownloadSeries& s, Date label) {
  std::optional<std::int64_t> v;
  for (const auto& p : s.points) {
    if (p.date >= label) break;
    v = p.value;
  }
  return v;
}

Outcome ac3_splice() {
  Check check;
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<int> months(3, 14), after(35, 260), step(0, 40'000), coin(0, 29);
  for (int trial = 0; trial < 100; ++trial) {
    MonthlySeries baseline{fmt::format("org/m{}", trial), {}};
    Date label = make_date(2024, 1, 1);
    std::int64_t value = 1'000'000;
    const int n = months(rng);
    for (int i = 0; i < n; ++i, label = next_month_start(label)) {
      value += step(rng) * 10;
      baseline.points.push_back({label, value, kFlagNone});
    }
    std::uniform_int_distribution<int> pick(1, n - 1);
    const Date splice_at = baseline.points[static_cast<std::size_t>(pick(rng))].label;
    DownloadSeries scraper{baseline.id, {}};
    std::int64_t raw = step(rng);
    const Date first = add_days(splice_at, -std::uniform_int_distribution<int>(1, 40)(rng));
    const int days = after(rng);
    for (int d = 0; d < days; ++d) {
      raw += step(rng);
      if (coin(rng) == 0) raw = raw / 2;  // counter reset
      scraper.points.push_back({add_days(first, d), raw});
    }
    const MonthlySeries out = splice(baseline, scraper, splice_at);

    std::size_t i = 0;
    for (const auto& p : baseline.points) {
      if (p.label > splice_at) break;
      check.expect(i < out.points.size() && out.points[i] == p, fmt::format("trial {} baseline point {}", trial, i));
      ++i;
    }
    const MonthlyPoint* at_splice = out.at(splice_at);
    check.expect(at_splice != nullptr && at_splice->value == baseline.at(splice_at)->value,
                 fmt::format("trial {} value at splice date", trial));
    std::int64_t running = baseline.at(splice_at)->value;
    std::int64_t prev = *raw_at(scraper, splice_at);
    const Date end = next_month_start(scraper.points.back().date);
    for (Date l = next_month_start(splice_at); l <= end; l = next_month_start(l), ++i) {
      const std::int64_t cur = *raw_at(scraper, l);
      const bool clamped = cur < prev;
      running += std::max<std::int64_t>(0, cur - prev);
      prev = cur;
      check.expect(i >= out.points.size() || ((out.points[i].flags & kFlagClamped) != 0) == clamped,
                   fmt::format("trial {} clamp flag at {}", trial, format_month(l)));
      check.expect(i < out.points.size() && out.points[i].label == l && out.points[i].value == running,
                   fmt::format("trial {} label {}", trial, format_month(l)));
    }
    check.expect(i == out.points.size(), fmt::format("trial {} has {} extra points", trial, out.points.size() - i));
    check.expect(out.is_non_decreasing(), fmt::format("trial {} decreases", trial));
  }
  return check.outcome("100 randomized splices: baseline kept exactly through the splice date, later increments "
                       "equal clamped raw deltas pointwise");
}

std::vector<double> step_sizes(const DownloadSeries& s) {
  std::vector<double> out;
  for (std::size_t i = 1; i < s.points.size(); ++i) {
    out.push_back(static_cast<double>(s.points[i].value - s.points[i - 1].value));
  }
  return out;
}

Outcome ac4_filter() {
  Check check;
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<int> len(8, 120), base(50, 20'000);
  std::uniform_real_distribution<double> jitter(0.85, 1.15);
  std::size_t clean_runs = 0, spikes = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = len(rng);
    const int b = base(rng);
    DownloadSeries s{"org/m", {}};
    std::int64_t total = 1000;
    const Date start = make_date(2025, 1, 1);
    s.points.push_back({start, total});
    for (int d = 1; d < n; ++d) {
      total += std::llround(b * jitter(rng));
      s.points.push_back({add_days(start, d), total});
    }
    const auto deltas = step_sizes(s);
    const double q1 = test::quantile_oracle(deltas, 0.25), q3 = test::quantile_oracle(deltas, 0.75);
    const bool clean = std::all_of(deltas.begin(), deltas.end(), [&](double d) {
      return d >= q1 - 2.5 * (q3 - q1) && d <= q3 + 2.5 * (q3 - q1);
    });
    if (clean) {
      ++clean_runs;
      const auto result = iqr_filter(s);
      check.expect(result.series == s && result.flagged_dates.empty(), fmt::format("trial {} altered", trial));
    }

    // Inject one spike well above the fence and confirm it against the oracle.
    auto spiked = s;
    const std::size_t at = std::uniform_int_distribution<std::size_t>(1, spiked.points.size() - 1)(rng);
    const std::int64_t extra = static_cast<std::int64_t>(b) * std::uniform_int_distribution<int>(5, 200)(rng);
    for (std::size_t i = at; i < spiked.points.size(); ++i) spiked.points[i].value += extra;
    const auto spiked_deltas = step_sizes(spiked);
    const double sq1 = test::quantile_oracle(spiked_deltas, 0.25), sq3 = test::quantile_oracle(spiked_deltas, 0.75);
    const double fence = sq3 + 2.5 * (sq3 - sq1);
    const auto result = iqr_filter(spiked);
    if (spiked_deltas[at - 1] >= fence) {
      ++spikes;
      const bool flagged = std::binary_search(result.flagged_dates.begin(), result.flagged_dates.end(),
                                              spiked.points[at].date);
      check.expect(flagged, fmt::format("trial {} spike on day {} not flagged", trial, at));
    }
    const auto again = iqr_filter(result.series);
    check.expect(again.series == result.series && again.flagged_dates.empty(),
                 fmt::format("trial {} not idempotent", trial));
  }
  check.expect(clean_runs > 900 && spikes > 900, fmt::format("only {} clean / {} spiked cases", clean_runs, spikes));
  return check.outcome(fmt::format("1000 random series: {} spike-free passed bit-identical, {} injected spikes "
                                   "above Q3+2.5*IQR all flagged, filter idempotent",
                                   clean_runs, spikes));
}

Outcome ac5_derivatives() {
  Check check;
  const Registry registry(load_registry(
                              "model_id,organization,total_params,release_date\n"
                              "deepseek-ai/DeepSeek-R1,DeepSeek,671B,2025-01-20\n"
                              "meta-llama/Llama-3.1-8B-Instruct,Meta,8B,2024-07-23\n")
                              .records);
  const Date march = make_date(2025, 3, 10);
  auto child = [&](const std::string& id, const std::string& base, std::int64_t downloads,
                   std::set<std::string> formats = {}) {
    return DerivativeRecord{id, {base}, downloads, std::move(formats), march};
  };
  const std::vector<DerivativeRecord> rules{
      child("u/five", "deepseek-ai/DeepSeek-R1", 5),
      child("u/six", "deepseek-ai/DeepSeek-R1", 6),
      child("u/untracked", "acme/secret", 500),
      child("u/gguf", "deepseek-ai/DeepSeek-R1", 500, {"gguf"}),
      child("u/mlx", "deepseek-ai/DeepSeek-R1", 500, {"mlx"}),
  };
  const auto filtered = filter_derivatives(rules, registry);
  check.expect(filtered.accepted.size() == 1 && filtered.accepted[0].record.child_id == "u/six",
               "only the 6-download child should pass");
  check.expect(filtered.rejected.count(RejectionCause::TooFewDownloads) &&
                   filtered.rejected.at(RejectionCause::TooFewDownloads) == 1,
               "5 downloads not rejected");
  check.expect(filtered.rejected.count(RejectionCause::UntrackedBase) &&
                   filtered.rejected.at(RejectionCause::UntrackedBase) == 1,
               "untracked base not rejected");
  check.expect(filtered.rejected.count(RejectionCause::LocalReupload) &&
                   filtered.rejected.at(RejectionCause::LocalReupload) == 2,
               "gguf/mlx not rejected");

  std::vector<DerivativeRecord> mix;
  for (int i = 0; i < 70; ++i) mix.push_back(child(fmt::format("cn/d{}", i), "deepseek-ai/DeepSeek-R1", 40));
  for (int i = 0; i < 30; ++i) mix.push_back(child(fmt::format("us/d{}", i), "meta-llama/Llama-3.1-8B-Instruct", 40));
  const auto accepted = filter_derivatives(mix, registry).accepted;
  const auto shares = derivative_share(accepted, registry, DerivativeGrouping::Region, make_date(2025, 3, 1));
  const double china = shares.count("China") ? shares.at("China").share : -1;
  check.expect(std::abs(china - 0.70) <= kShareTolerance, fmt::format("China share {}", china));

  std::mt19937_64 rng(505);
  std::uniform_int_distribution<int> count(0, 30);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<DerivativeRecord> records;
    const int a = count(rng), b = count(rng);
    for (int i = 0; i < a; ++i) records.push_back(child(fmt::format("a/{}", i), "deepseek-ai/DeepSeek-R1", 50));
    for (int i = 0; i < b; ++i) {
      records.push_back(child(fmt::format("b/{}", i), "meta-llama/Llama-3.1-8B-Instruct", 50));
    }
    for (const auto grouping : {DerivativeGrouping::Region, DerivativeGrouping::Organization}) {
      const auto s = derivative_share(filter_derivatives(records, registry).accepted, registry, grouping,
                                      make_date(2025, 3, 1));
      double sum = 0;
      for (const auto& [g, v] : s) sum += v.share;
      check.expect(s.empty() ? a + b == 0 : std::abs(sum - 1) <= kShareTolerance,
                   fmt::format("trial {} shares sum to {}", trial, sum));
    }
  }
  return check.outcome(fmt::format("5 rejected / 6 accepted, untracked and gguf/mlx rejected; China = {:.2f}; "
                                   "100 random months sum to 1",
                                   china));
}

Outcome ac6_elo() {
  Check check;
  const auto shifted = adjust_elo({"a/b", Region::USA, make_date(2025, 1, 10), 1300, false});
  check.expect(shifted.elo == 1300 + 59.2, fmt::format("shifted to {}", shifted.elo));
  check.expect(adjust_elo({"a/b", Region::USA, make_date(2025, 5, 19), 1300, false}).elo == 1300,
               "cutover day shifted");
  check.expect(test::thrown_kind([&] { adjust_elo(shifted); }) == ErrorKind::Validation, "double shift allowed");

  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> rating(1100, 1450);
  std::uniform_int_distribution<int> day(0, 60);
  std::vector<EloObservation> obs;
  for (int i = 0; i < 150; ++i) {
    obs.push_back(adjust_elo({fmt::format("org/m{}", i % 23), Region::China, add_days(make_date(2025, 4, 1), day(rng)),
                              std::round(rating(rng)), false}));
  }
  const auto reference = elo_frontier(obs, Region::China);
  for (int shuffle = 0; shuffle < 200; ++shuffle) {
    std::shuffle(obs.begin(), obs.end(), rng);
    const auto f = elo_frontier(obs, Region::China);
    bool ok = f.size() == reference.size();
    for (std::size_t i = 0; ok && i < f.size(); ++i) {
      ok = f[i].elo == reference[i].elo && f[i].date == reference[i].date && (i == 0 || f[i].elo >= f[i - 1].elo);
    }
    check.expect(ok, fmt::format("shuffle {} changed or lowered the frontier", shuffle));
  }
  return check.outcome("pre-cutover +59.2 exactly, cutover day unshifted; frontier non-decreasing and identical "
                       "across 200 shuffles");
}

Outcome ac7_ols() {
  Check check;
  std::mt19937_64 rng(707);
  std::uniform_int_distribution<int> count(2, 80);
  std::uniform_real_distribution<double> xs(0, 730), noise(-8, 8), slope(-0.3, 0.3), base(10, 80);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x, y;
    const double a = base(rng), b = slope(rng);
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      x.push_back(std::round(xs(rng)));
      y.push_back(a + b * x.back() + noise(rng));
    }
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); })) x.back() += 1;
    long double sn = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sn += 1;
      sx += x[i];
      sxx += static_cast<long double>(x[i]) * x[i];
      sy += y[i];
      sxy += static_cast<long double>(x[i]) * y[i];
    }
    const long double det = sn * sxx - sx * sx;
    const long double oracle_slope = (sn * sxy - sx * sy) / det;
    const long double oracle_intercept = (sy * sxx - sx * sxy) / det;
    const LinearFit fit = fit_ols(x, y);
    auto rel = [](double v, long double ref) {
      return static_cast<double>(std::abs(v - ref) / std::max<long double>(1, std::abs(ref)));
    };
    const double err = std::max(rel(fit.slope, oracle_slope), rel(fit.intercept, oracle_intercept));
    worst = std::max(worst, err);
    check.expect(err <= kOlsTolerance, fmt::format("trial {} relative error {:.2e}", trial, err));
  }
  return check.outcome(fmt::format("100 random fits, worst relative deviation from the normal equations {:.2e}",
                                   worst));
}

Outcome ac8_growth() {
  Check check;
  struct Case {
    std::int64_t from, to;
    std::string expected;
  };
  const std::vector<Case> cases{{97'000'000, 1'150'000'000, "11.9"}, {177'000'000, 723'000'000, "4.1"},
                                {65'000'000, 163'000'000, "2.5"}};
  std::string listing;
  for (const auto& c : cases) {
    const Date from = make_date(2025, 3, 1), to = make_date(2026, 3, 1);
    const MonthlySeries s{"group", {{from, c.from, kFlagNone}, {to, c.to, kFlagNone}}};
    const std::string ratio = fmt::format("{:.1f}", growth_ratio(s, from, to));
    check.expect(ratio == c.expected, fmt::format("{} vs {}", ratio, c.expected));
    listing += fmt::format(" {}x", ratio);
  }
  return check.outcome("growth ratios" + listing);
}

Outcome ac9_scale() {
  Check check;
  constexpr int kModels = 1500, kDays = 600;
  test::TempDir dir;
  const Date first_day = make_date(2024, 5, 20);
  std::vector<ModelRecord> records;
  std::vector<SnapshotPoint> snapshots, history;
  snapshots.reserve(static_cast<std::size_t>(kModels) * kDays);
  std::mt19937_64 rng(909);
  const std::array<std::int64_t, 7> params{500'000'000, 3'000'000'000, 8'000'000'000, 30'000'000'000,
                                           70'000'000'000, 120'000'000'000, 400'000'000'000};
  for (int m = 0; m < kModels; ++m) {
    const std::string id = fmt::format("org{}/model-{}", m % 97, m);
    const Date release = add_days(make_date(2024, 3, 1), m % 60);
    records.push_back({id, fmt::format("Org{}", m % 97), Region::Other, params[static_cast<std::size_t>(m % 7)],
                       std::nullopt, release, ""});
    const auto series = test::smooth_series(rng, id, first_day, kDays, 100.0 + m);
    for (const auto& p : series.points) snapshots.push_back({id, p.date, p.value});
    const std::int64_t start = series.points.front().value;
    for (Date label = make_date(2024, 4, 1); label <= make_date(2024, 6, 1); label = next_month_start(label)) {
      const std::int64_t elapsed_days = std::max(0, days_between(release, label));
      history.push_back({id, label, start * elapsed_days / std::max(1, days_between(release, first_day))});
    }
  }
  const Registry registry(records);
  SnapshotStore store(dir / "store");
  store.append(Stream::Snapshots, snapshots, "scale");
  store.append(Stream::History, history, "scale");

  Config config;
  const auto start = Clock::now();
  PreparedSeries prepared = prepare_series(registry, store, config);
  std::size_t scored = 0;
  const Date reference_date = add_days(first_day, kDays - 1);
  for (const SizeBucket bucket : kAllBuckets) {
    const ReferenceCurve curve = build_reference_curve(bucket, registry, prepared.daily, reference_date);
    curve.validate();
    for (const auto& r : registry.records()) {
      if (r.bucket() == bucket) scored += ram_trajectory(r.model_id, registry, prepared.daily, curve).size();
    }
  }
  const double elapsed = seconds_since(start);
  check.expect(elapsed < std::chrono::duration<double>(kScaleRuntime).count(),
               fmt::format("pipeline took {:.2f}s", elapsed));
  check.expect(prepared.monthly.size() == kModels, "models missing from the prepared series");
  check.expect(scored == static_cast<std::size_t>(kModels) * kMilestones.size(),
               fmt::format("{} scores", scored));

  // Fetch pacing against a local stub.
  std::atomic<int> in_flight{0}, peak{0};
  test::StubHub hub([&](const std::string&, httplib::Response& res) {
    const int now = ++in_flight;
    int seen = peak.load();
    while (now > seen && !peak.compare_exchange_weak(seen, now)) {
    }
    std::this_thread::sleep_for(40ms);
    --in_flight;
    res.set_content(R"({"downloadsAllTime": 42})", "application/json");
  });
  HttpHubTransport transport(hub.base_url());
  std::vector<std::string> ids;
  for (int i = 0; i < 16; ++i) ids.push_back(fmt::format("org/m{:02}", i));
  FetchPolicy policy;
  policy.max_parallel = 3;
  policy.min_request_interval = 20ms;
  const auto fetched = fetch_snapshots(ids, policy, transport, make_date(2026, 1, 1));
  check.expect(fetched.points.size() == ids.size(), "fetch lost models");
  check.expect(peak.load() <= 3 && fetched.report.peak_in_flight <= 3, fmt::format("peak {} in flight", peak.load()));
  auto min_gap = std::chrono::duration<double, std::milli>::max();
  const auto& starts = fetched.report.request_starts;
  for (std::size_t i = 1; i < starts.size(); ++i) {
    min_gap = std::min<std::chrono::duration<double, std::milli>>(min_gap, starts[i] - starts[i - 1]);
  }
  check.expect(min_gap >= 20ms, fmt::format("requests {:.1f}ms apart", min_gap.count()));
  return check.outcome(fmt::format("{} models x {} days ({} points) filtered, spliced, rolled up and scored in {:.2f}s; "
                                   "fetch peak {} in flight (max 3), request starts >= {:.1f}ms apart (min 20)",
                                   kModels, kDays, snapshots.size(), elapsed, peak.load(), min_gap.count()));
}

Outcome ac10_statement() {
  return {true,
          "not reproducible at desk scale: ecosystem-wide totals, bucket shares and token-share time series need "
          "the private bulk download data; covered instead by the property suites and fixture share checks "
          "(size distribution, derivative and token shares) under ctest"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1", ac1_table},      {"AC2", ac2_cross_check}, {"AC3", ac3_splice},      {"AC4", ac4_filter},
      {"AC5", ac5_derivatives}, {"AC6", ac6_elo},        {"AC7", ac7_ols},         {"AC8", ac8_growth},
      {"AC9", ac9_scale},      {"AC10", ac10_statement},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& e) {
      outcome = {false, fmt::format("threw: {}", e.what())};
    }
    if (!outcome.pass) ++failed;
    fmt::print("{} {}: {}\n", name, outcome.pass ? "PASS" : "FAIL", outcome.detail);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
