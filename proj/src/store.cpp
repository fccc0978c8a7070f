#include "adopt/store.hpp"

#include <sys/file.h>
#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <tuple>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <openssl/evp.h>

#include "adopt/csv.hpp"
#include "adopt/error.hpp"
#include "adopt/registry.hpp"

namespace adopt {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kModule = "ingest";
constexpr std::string_view kManifest = "MANIFEST";
constexpr std::string_view kJournal = "JOURNAL";

[[noreturn]] void integrity(const std::string& message) {
  throw Error(ErrorKind::Integrity, std::string(kModule), message);
}

class FileLock {
 public:
  FileLock(const fs::path& path, bool exclusive) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT, 0644);
    if (fd_ < 0) {
      throw Error(ErrorKind::Io, std::string(kModule), fmt::format("cannot open lock '{}'", path.string()));
    }
    if (::flock(fd_, exclusive ? LOCK_EX : LOCK_SH) != 0) {
      ::close(fd_);
      throw Error(ErrorKind::Io, std::string(kModule), fmt::format("cannot lock '{}'", path.string()));
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

struct ManifestEntry {
  std::size_t lines = 0;
  std::string sha256;
};

using Manifest = std::map<std::string, ManifestEntry>;

Manifest read_manifest(const fs::path& root) {
  Manifest manifest;
  const fs::path path = root / kManifest;
  if (!fs::exists(path)) return manifest;
  const std::string content = read_file(path);
  std::size_t line_no = 0;
  for (const auto& line : split(content, '\n')) {
    ++line_no;
    if (line.empty()) continue;
    const auto parts = split(line, '\t');
    std::size_t lines = 0;
    if (parts.size() != 3 ||
        std::from_chars(parts[1].data(), parts[1].data() + parts[1].size(), lines).ec != std::errc{}) {
      integrity(fmt::format("{}:{}: malformed manifest entry", kManifest, line_no));
    }
    manifest[parts[0]] = {lines, parts[2]};
  }
  return manifest;
}

void write_manifest(const fs::path& root, const Manifest& manifest) {
  std::string out;
  for (const auto& [path, entry] : manifest) {
    out += fmt::format("{}\t{}\t{}\n", path, entry.lines, entry.sha256);
  }
  write_file(root / kManifest, out);
}

fs::path stream_dir(Stream stream) { return stream == Stream::Snapshots ? "snapshots" : "history"; }

std::string relative_file(Stream stream, Date date) {
  return (stream_dir(stream) / (format_month(date) + ".tsv")).generic_string();
}

std::size_t count_lines(std::string_view content) {
  return static_cast<std::size_t>(std::count(content.begin(), content.end(), '\n'));
}

SnapshotPoint parse_line(std::string_view line, const std::string& file, std::size_t line_no) {
  const auto parts = split(line, '\t');
  if (parts.size() != 3) integrity(fmt::format("{}:{}: malformed record", file, line_no));
  const auto date = parse_date(parts[0]);
  std::int64_t value = -1;
  const auto& v = parts[2];
  const bool numeric = std::from_chars(v.data(), v.data() + v.size(), value).ec == std::errc{} &&
                       !v.empty() && std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; });
  if (!date || !is_valid_model_id(parts[1]) || !numeric || value < 0) {
    integrity(fmt::format("{}:{}: malformed record", file, line_no));
  }
  return {parts[1], *date, value};
}

std::string format_line(const SnapshotPoint& p) {
  return fmt::format("{}\t{}\t{}\n", format_date(p.observed_at), p.model_id, p.cumulative_downloads);
}

// Reads one data file, checking it against its manifest entry.
std::string read_verified(const fs::path& root, const std::string& rel, const ManifestEntry& entry) {
  const fs::path path = root / rel;
  if (!fs::exists(path)) integrity(fmt::format("{}: listed in manifest but missing", rel));
  std::string content = read_file(path);
  if (sha256_hex(content) != entry.sha256 || count_lines(content) != entry.lines) {
    integrity(fmt::format("{}: checksum mismatch against manifest", rel));
  }
  if (!content.empty() && content.back() != '\n') integrity(fmt::format("{}: truncated last record", rel));
  return content;
}

void check_untracked(const fs::path& root, Stream stream, const Manifest& manifest) {
  const fs::path dir = root / stream_dir(stream);
  if (!fs::exists(dir)) return;
  for (const auto& item : fs::directory_iterator(dir)) {
    if (item.path().extension() != ".tsv") continue;
    const std::string rel = (stream_dir(stream) / item.path().filename()).generic_string();
    if (!manifest.contains(rel)) integrity(fmt::format("{}: data file not in manifest", rel));
  }
}

template <typename Visitor>
void scan_stream(const fs::path& root, Stream stream, Visitor&& visit) {
  const Manifest manifest = read_manifest(root);
  check_untracked(root, stream, manifest);
  const std::string prefix = stream_dir(stream).generic_string() + "/";
  for (const auto& [rel, entry] : manifest) {
    if (rel.rfind(prefix, 0) != 0) continue;
    const std::string content = read_verified(root, rel, entry);
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < content.size()) {
      const auto end = content.find('\n', start);
      ++line_no;
      visit(parse_line(std::string_view(content).substr(start, end - start), rel, line_no), rel, line_no);
      start = end + 1;
    }
  }
}

}  // namespace

std::string_view to_string(Stream stream) {
  return stream == Stream::Snapshots ? "snapshots" : "history";
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::Io, std::string(kModule), "sha256 failed");
  }
  std::string hex;
  hex.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

SnapshotStore::SnapshotStore(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_ / "snapshots");
  fs::create_directories(root_ / "history");
}

AppendResult SnapshotStore::append(Stream stream, std::span<const SnapshotPoint> points,
                                   std::string_view source) {
  FileLock lock(root_ / ".lock", true);
  Manifest manifest = read_manifest(root_);
  check_untracked(root_, stream, manifest);

  // Existing values for every month file this batch touches.
  std::map<std::string, std::map<std::pair<std::string, Date>, std::int64_t>> existing;
  for (const auto& p : points) {
    const std::string rel = relative_file(stream, p.observed_at);
    if (existing.contains(rel)) continue;
    auto& values = existing[rel];
    const auto it = manifest.find(rel);
    if (it == manifest.end()) continue;
    const std::string content = read_verified(root_, rel, it->second);
    std::size_t line_no = 0;
    for (const auto& line : split(content, '\n')) {
      if (line.empty()) continue;
      auto point = parse_line(line, rel, ++line_no);
      values.emplace(std::make_pair(std::move(point.model_id), point.observed_at), point.cumulative_downloads);
    }
  }

  AppendResult result;
  std::map<std::string, std::vector<SnapshotPoint>> fresh;
  for (const auto& p : points) {
    if (!is_valid_model_id(p.model_id) || p.cumulative_downloads < 0) {
      throw Error(ErrorKind::Validation, std::string(kModule),
                  fmt::format("refusing to store invalid point for '{}'", p.model_id));
    }
    const std::string rel = relative_file(stream, p.observed_at);
    auto [it, inserted] =
        existing[rel].emplace(std::make_pair(p.model_id, p.observed_at), p.cumulative_downloads);
    if (inserted) {
      fresh[rel].push_back(p);
      ++result.added;
    } else if (it->second == p.cumulative_downloads) {
      ++result.unchanged;
    } else {
      result.conflicts.push_back(p);
    }
  }

  for (auto& [rel, batch] : fresh) {
    std::sort(batch.begin(), batch.end(), [](const SnapshotPoint& a, const SnapshotPoint& b) {
      return std::tie(a.observed_at, a.model_id) < std::tie(b.observed_at, b.model_id);
    });
    std::string chunk;
    for (const auto& p : batch) chunk += format_line(p);
    {
      std::ofstream out(root_ / rel, std::ios::binary | std::ios::app);
      out.write(chunk.data(), static_cast<std::streamsize>(chunk.size()));
      if (!out) throw Error(ErrorKind::Io, std::string(kModule), fmt::format("cannot append to '{}'", rel));
    }
    const std::string content = read_file(root_ / rel);
    manifest[rel] = {count_lines(content), sha256_hex(content)};
  }
  if (!fresh.empty()) write_manifest(root_, manifest);

  std::ofstream journal(root_ / kJournal, std::ios::binary | std::ios::app);
  journal << fmt::format("{:%Y-%m-%dT%H:%M:%SZ}\t{}\t{}\tadded={}\tunchanged={}\tconflicts={}\n",
                         fmt::gmtime(std::time(nullptr)), to_string(stream), source, result.added,
                         result.unchanged, result.conflicts.size());
  return result;
}

std::vector<SnapshotPoint> SnapshotStore::read(Stream stream) const {
  FileLock lock(root_ / ".lock", false);
  std::vector<SnapshotPoint> out;
  std::map<std::pair<std::string, Date>, std::pair<std::string, std::size_t>> seen;
  scan_stream(root_, stream, [&](SnapshotPoint p, const std::string& rel, std::size_t line_no) {
    auto [it, inserted] = seen.emplace(std::make_pair(p.model_id, p.observed_at), std::make_pair(rel, line_no));
    if (!inserted) {
      integrity(fmt::format("{}:{}: duplicate record for ({}, {}), first seen at {}:{}", rel, line_no,
                            p.model_id, format_date(p.observed_at), it->second.first, it->second.second));
    }
    out.push_back(std::move(p));
  });
  return out;
}

std::map<std::string, DownloadSeries> SnapshotStore::load_all(Stream stream) const {
  std::map<std::string, DownloadSeries> out;
  for (auto& p : read(stream)) {
    auto& series = out[p.model_id];
    series.model_id = p.model_id;
    series.points.push_back({p.observed_at, p.cumulative_downloads});
  }
  for (auto& [id, series] : out) {
    std::sort(series.points.begin(), series.points.end(),
              [](const SeriesPoint& a, const SeriesPoint& b) { return a.date < b.date; });
  }
  return out;
}

void SnapshotStore::verify() const {
  read(Stream::Snapshots);
  read(Stream::History);
}

void SnapshotStore::reseal() {
  FileLock lock(root_ / ".lock", true);
  Manifest manifest;
  for (Stream stream : {Stream::Snapshots, Stream::History}) {
    const fs::path dir = root_ / stream_dir(stream);
    if (!fs::exists(dir)) continue;
    for (const auto& item : fs::directory_iterator(dir)) {
      if (item.path().extension() != ".tsv") continue;
      const std::string content = read_file(item.path());
      const std::string rel = (stream_dir(stream) / item.path().filename()).generic_string();
      manifest[rel] = {count_lines(content), sha256_hex(content)};
    }
  }
  write_manifest(root_, manifest);
}

DownloadSeries load_series(const SnapshotStore& store, std::string_view model_id, Stream stream) {
  DownloadSeries series;
  series.model_id = std::string(model_id);
  for (const auto& p : store.read(stream)) {
    if (p.model_id == model_id) series.points.push_back({p.observed_at, p.cumulative_downloads});
  }
  std::sort(series.points.begin(), series.points.end(),
            [](const SeriesPoint& a, const SeriesPoint& b) { return a.date < b.date; });
  return series;
}

}  // namespace adopt
