#include <doctest.h>

#include <thread>

#include <fmt/format.h>

#include "adopt/store.hpp"
#include "support.hpp"

using namespace adopt;

namespace {

std::vector<SnapshotPoint> sample_points() {
  return {
      {"Qwen/Qwen3-4B", make_date(2025, 6, 3), 300},
      {"Qwen/Qwen3-4B", make_date(2025, 5, 1), 100},
      {"Qwen/Qwen3-4B", make_date(2025, 6, 1), 200},
      {"meta-llama/Llama-3.1-8B", make_date(2025, 6, 1), 50},
  };
}

std::string store_bytes(const std::filesystem::path& root) {
  std::string all;
  for (const char* rel : {"MANIFEST", "snapshots/2025-05.tsv", "snapshots/2025-06.tsv"}) {
    all += rel;
    all += '\n';
    all += test::slurp(root / rel);
  }
  return all;
}

}  // namespace

TEST_CASE("points come back sorted per model") {
  test::TempDir dir;
  SnapshotStore store(dir.path());
  const auto result = store.append(Stream::Snapshots, sample_points(), "test");
  CHECK(result.added == 4);
  const auto series = load_series(store, "Qwen/Qwen3-4B");
  REQUIRE(series.points.size() == 3);
  CHECK(series.points[0] == SeriesPoint{make_date(2025, 5, 1), 100});
  CHECK(series.points[2] == SeriesPoint{make_date(2025, 6, 3), 300});
  CHECK(load_series(store, "nobody/none").empty());
  CHECK(load_series(store, "Qwen/Qwen3-4B", Stream::History).empty());
}

TEST_CASE("re-appending is idempotent and byte-stable") {
  test::TempDir dir;
  SnapshotStore store(dir.path());
  store.append(Stream::Snapshots, sample_points(), "first");
  const std::string before = store_bytes(dir.path());
  const auto again = store.append(Stream::Snapshots, sample_points(), "second");
  CHECK(again.added == 0);
  CHECK(again.unchanged == 4);
  CHECK(again.conflicts.empty());
  CHECK(store_bytes(dir.path()) == before);
  const std::string journal = test::slurp(dir / "JOURNAL");
  CHECK(std::count(journal.begin(), journal.end(), '\n') == 2);
}

TEST_CASE("conflicting values are reported and not written") {
  test::TempDir dir;
  SnapshotStore store(dir.path());
  store.append(Stream::Snapshots, sample_points(), "first");
  const std::vector<SnapshotPoint> changed{{"Qwen/Qwen3-4B", make_date(2025, 6, 1), 999}};
  const auto result = store.append(Stream::Snapshots, changed, "second");
  CHECK(result.added == 0);
  REQUIRE(result.conflicts.size() == 1);
  CHECK(load_series(store, "Qwen/Qwen3-4B").points[1].value == 200);
}

TEST_CASE("files follow the documented line format") {
  test::TempDir dir;
  SnapshotStore store(dir.path());
  store.append(Stream::Snapshots, sample_points(), "test");
  CHECK(test::slurp(dir / "snapshots/2025-05.tsv") == "2025-05-01\tQwen/Qwen3-4B\t100\n");
  CHECK(test::slurp(dir / "snapshots/2025-06.tsv") ==
        "2025-06-01\tQwen/Qwen3-4B\t200\n2025-06-01\tmeta-llama/Llama-3.1-8B\t50\n2025-06-03\tQwen/Qwen3-4B\t300\n");
}

TEST_CASE("duplicate lines are an integrity error naming file and line") {
  test::TempDir dir;
  SnapshotStore store(dir.path());
  store.append(Stream::Snapshots, sample_points(), "test");
  {
    std::ofstream out(dir / "snapshots/2025-06.tsv", std::ios::app);
    out << "2025-06-01\tQwen/Qwen3-4B\t200\n";
  }
  store.reseal();
  try {
    load_series(store, "Qwen/Qwen3-4B");
    FAIL("expected an integrity error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Integrity);
    CHECK(std::string(e.what()).find("snapshots/2025-06.tsv:4") != std::string::npos);
  }
}

TEST_CASE("tampering and malformed records are detected") {
  test::TempDir dir;
  SnapshotStore store(dir.path());
  store.append(Stream::Snapshots, sample_points(), "test");
  SUBCASE("edited without reseal") {
    test::spit(dir / "snapshots/2025-05.tsv", "2025-05-01\tQwen/Qwen3-4B\t101\n");
    CHECK(test::thrown_kind([&] { store.verify(); }) == ErrorKind::Integrity);
  }
  SUBCASE("malformed line") {
    test::spit(dir / "snapshots/2025-05.tsv", "2025-05-01\tQwen/Qwen3-4B\tlots\n");
    store.reseal();
    try {
      store.verify();
      FAIL("expected an integrity error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Integrity);
      CHECK(std::string(e.what()).find("snapshots/2025-05.tsv:1") != std::string::npos);
    }
  }
  SUBCASE("untracked file") {
    test::spit(dir / "snapshots/2025-07.tsv", "2025-07-01\tQwen/Qwen3-4B\t400\n");
    CHECK(test::thrown_kind([&] { store.verify(); }) == ErrorKind::Integrity);
  }
  SUBCASE("negative value refused on write") {
    const std::vector<SnapshotPoint> bad{{"Qwen/Qwen3-4B", make_date(2025, 7, 1), -1}};
    CHECK(test::thrown_kind([&] { store.append(Stream::Snapshots, bad, "x"); }) == ErrorKind::Validation);
  }
}

TEST_CASE("concurrent writers serialize on the lock") {
  test::TempDir dir;
  std::vector<std::thread> writers;
  for (int w = 0; w < 4; ++w) {
    writers.emplace_back([&, w] {
      SnapshotStore store(dir.path());
      for (int i = 0; i < 10; ++i) {
        const std::vector<SnapshotPoint> one{
            {fmt::format("org/model-{}", w), add_days(make_date(2025, 1, 1), i), static_cast<std::int64_t>(i)}};
        store.append(Stream::Snapshots, one, "writer");
      }
    });
  }
  for (auto& t : writers) t.join();
  SnapshotStore store(dir.path());
  CHECK_NOTHROW(store.verify());
  CHECK(store.read(Stream::Snapshots).size() == 40);
}

TEST_CASE("sha256 matches a known digest") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
