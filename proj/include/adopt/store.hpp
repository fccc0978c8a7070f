#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adopt/date.hpp"
#include "adopt/timeseries.hpp"

namespace adopt {

// One observed cumulative download count. For the history stream the date is
// the first-of-month label of a monthly value.
struct SnapshotPoint {
  std::string model_id;
  Date observed_at{};
  std::int64_t cumulative_downloads = 0;

  friend bool operator==(const SnapshotPoint&, const SnapshotPoint&) = default;
};

enum class Stream { Snapshots, History };

std::string_view to_string(Stream stream);

struct AppendResult {
  std::size_t added = 0;
  std::size_t unchanged = 0;  // already stored with the same value
  std::vector<SnapshotPoint> conflicts;  // already stored with a different value; not written
};

// Append-only store on disk:
//
//   <root>/snapshots/YYYY-MM.tsv   date<TAB>model_id<TAB>cumulative_downloads
//   <root>/history/YYYY-MM.tsv     same layout, dated by month label
//   <root>/MANIFEST                path<TAB>lines<TAB>sha256, one per data file
//   <root>/JOURNAL                 one line per append run
//
// Existing lines are never rewritten. At most one point per (model_id, date)
// per stream. Single writer (exclusive flock on <root>/.lock); readers take a
// shared lock and see either the state before or after an append.
class SnapshotStore {
 public:
  explicit SnapshotStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  AppendResult append(Stream stream, std::span<const SnapshotPoint> points, std::string_view source);

  // All points of a stream in file order. Throws Integrity on checksum
  // mismatch, malformed lines or duplicate (model_id, date) pairs; the message
  // names the file and line.
  std::vector<SnapshotPoint> read(Stream stream) const;

  // Every model's series, each sorted ascending by date.
  std::map<std::string, DownloadSeries> load_all(Stream stream) const;

  // Checks every data file against the manifest.
  void verify() const;

  // Accepts the current on-disk data files as authoritative and rewrites the
  // manifest. Meant for after a manual repair.
  void reseal();

 private:
  std::filesystem::path root_;
};

// Points for one model sorted by date; empty series for unknown ids.
DownloadSeries load_series(const SnapshotStore& store, std::string_view model_id,
                           Stream stream = Stream::Snapshots);

std::string sha256_hex(std::string_view bytes);

}  // namespace adopt
