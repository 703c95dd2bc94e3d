#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>

#include "panelshock/csv.hpp"
#include "panelshock/dates.hpp"
#include "panelshock/errors.hpp"
#include "panelshock/parallel.hpp"
#include "panelshock/rng.hpp"
#include "panelshock/stats.hpp"

using namespace panelshock;

TEST_CASE("date parsing and formatting round-trip") {
  const Date d = parse_date("2004-01-15");
  CHECK(d.year == 2004);
  CHECK(d.month == 1);
  CHECK(d.day == 15);
  CHECK(format_date(d) == "2004-01-15");
  CHECK_THROWS_AS(parse_date("2004-13-01"), Error);
  CHECK_THROWS_AS(parse_date("20040101"), Error);
}

TEST_CASE("month arithmetic") {
  const YearMonth m = parse_month("2004-12");
  CHECK(YearMonth::from_index(m.index()) == m);
  CHECK(YearMonth::from_index(m.index() + 1) == YearMonth{2005, 1});
  const MonthRange range{{2004, 1}, {2004, 3}};
  CHECK(range.length() == 3);
  CHECK(range.contains({2004, 2}));
  CHECK(!range.contains({2004, 4}));
  CHECK(range.months().size() == 3);
}

TEST_CASE("number formatting round-trips exactly") {
  const double values[] = {0.1, -1.0 / 3.0, 1e300, 5e-324, 123456.789, 0.0};
  for (double v : values) {
    const std::string text = format_double(v);
    CHECK(parse_double(text, "test") == v);
  }
}

TEST_CASE("rng streams are deterministic and independent") {
  Rng a = Rng::substream(42, "unit", 7);
  Rng b = Rng::substream(42, "unit", 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng c = Rng::substream(42, "unit", 8);
  CHECK(Rng::substream(42, "unit", 7).next_u64() != c.next_u64());
  CHECK(Rng::substream(42, "other", 7).next_u64() != Rng::substream(42, "unit", 7).next_u64());
}

TEST_CASE("rng moments are sane") {
  Rng rng(123);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.02);

  double chi_sum = 0.0;
  for (int i = 0; i < 20000; ++i) chi_sum += rng.chi_squared(5.0);
  CHECK(std::abs(chi_sum / 20000 - 5.0) < 0.1);
}

TEST_CASE("quantiles interpolate and nest") {
  std::vector<double> sample{5.0, 1.0, 3.0, 2.0, 4.0};
  CHECK(quantile(sample, 0.5) == doctest::Approx(3.0));
  CHECK(quantile(sample, 0.25) == doctest::Approx(2.0));
  CHECK(quantile(sample, 0.05) <= quantile(sample, 0.16));
  CHECK(quantile(sample, 0.84) <= quantile(sample, 0.95));
}

TEST_CASE("parallel_for covers every index once for any worker count") {
  for (int threads : {1, 2, 5}) {
    std::vector<std::atomic<int>> hits(101);
    parallel_for(101, threads, [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) CHECK(h.load() == 1);
  }
}

TEST_CASE("PANELSHOCK_THREADS caps the worker count") {
  unsetenv("PANELSHOCK_THREADS");
  CHECK(resolve_thread_count(0) == 1);
  CHECK(resolve_thread_count(6) == 6);
  setenv("PANELSHOCK_THREADS", "2", 1);
  CHECK(resolve_thread_count(0) == 2);
  CHECK(resolve_thread_count(6) == 2);
  CHECK(resolve_thread_count(1) == 1);
  unsetenv("PANELSHOCK_THREADS");
}

TEST_CASE("csv round-trip with line numbers") {
  const auto path = std::filesystem::temp_directory_path() / "panelshock_csv_test.csv";
  CsvTable table;
  table.header = {"a", "b"};
  table.rows = {{"1", "x"}, {"2", "y"}};
  write_csv(path, table);
  const CsvTable back = read_csv(path);
  CHECK(back.header == table.header);
  CHECK(back.rows == table.rows);
  CHECK(back.line_numbers == std::vector<size_t>{2, 3});
  CHECK(hash_file(path) == hash_file(path));
  std::filesystem::remove(path);
}

TEST_CASE("error categories map to exit codes") {
  CHECK(exit_code(ErrorCategory::ParseError) == 2);
  CHECK(exit_code(ErrorCategory::MissingCoverage) == 2);
  CHECK(exit_code(ErrorCategory::ConfigError) == 3);
  CHECK(exit_code(ErrorCategory::InvalidWeight) == 3);
  CHECK(exit_code(ErrorCategory::SingularDesign) == 1);
  CHECK(exit_code(ErrorCategory::CholeskyFailure) == 1);
}
