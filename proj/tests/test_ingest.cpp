#include <doctest.h>

#include <sstream>

#include "newsflow/errors.hpp"
#include "newsflow/ingest.hpp"
#include "newsflow/rng.hpp"
#include "newsflow/synth.hpp"
#include "test_support.hpp"

using namespace newsflow;
using test_support::TempDir;
using test_support::write_file;

TEST_CASE("dates: ISO round trip and validation") {
  const Date d = Date::parse("2015-07-01");
  CHECK(d.iso() == "2015-07-01");
  CHECK(d.year() == 2015);
  CHECK(d.month() == 7);
  CHECK(d.day() == 1);
  CHECK(d.weekday() == 3);  // Wednesday
  CHECK(Date::parse("2016-02-29").iso() == "2016-02-29");
  CHECK(Date::parse("2015-07-02") > d);
  CHECK((d + 1).iso() == "2015-07-02");
  CHECK_THROWS_AS(Date::parse("2015-02-29"), ParseError);
  CHECK_THROWS_AS(Date::parse("2015-13-01"), ParseError);
  CHECK_THROWS_AS(Date::parse("2015/07/01"), ParseError);
  CHECK_THROWS_AS(Date::parse("20150701"), ParseError);
}

TEST_CASE("load_prices: basic parse") {
  TempDir dir;
  write_file(dir.file("p.csv"),
             "date,ticker,close\n"
             "2015-07-01,SPX,100\n"
             "2015-07-02,SPX,101\n"
             "2015-07-03,SPX,99\n");
  const auto series = load_prices(dir.file("p.csv"));
  REQUIRE(series.size() == 1);
  CHECK(series[0].ticker == "SPX");
  REQUIRE(series[0].observations.size() == 3);
  CHECK(series[0].observations[0].second == 100.0);
  CHECK(series[0].observations[2].second == 99.0);
  CHECK(series[0].observations[0].first.iso() == "2015-07-01");
}

TEST_CASE("load_prices: out-of-order rows get sorted by date") {
  TempDir dir;
  write_file(dir.file("p.csv"),
             "2015-07-03,SPX,99\n2015-07-01,SPX,100\n2015-07-02,SPX,101\n");
  const auto series = load_prices(dir.file("p.csv"));
  CHECK(series[0].observations.front().second == 100.0);
  CHECK(series[0].observations.back().second == 99.0);
}

TEST_CASE("load_prices: error cases") {
  TempDir dir;
  write_file(dir.file("zero.csv"), "2015-07-01,SPX,0\n");
  CHECK_THROWS_AS(load_prices(dir.file("zero.csv")), NonPositivePrice);

  write_file(dir.file("neg.csv"), "2015-07-01,SPX,-3\n");
  CHECK_THROWS_AS(load_prices(dir.file("neg.csv")), NonPositivePrice);

  write_file(dir.file("dup.csv"), "2015-07-01,SPX,1\n2015-07-01,SPX,2\n");
  CHECK_THROWS_AS(load_prices(dir.file("dup.csv")), DuplicateDate);

  write_file(dir.file("malformed.csv"), "2015-07-01,SPX,1\nnot a row\n");
  try {
    load_prices(dir.file("malformed.csv"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }

  write_file(dir.file("badclose.csv"), "2015-07-01,SPX,12x\n");
  CHECK_THROWS_AS(load_prices(dir.file("badclose.csv")), ParseError);
  CHECK_THROWS_AS(load_prices(dir.file("does-not-exist.csv")), ParseError);
}

TEST_CASE("load_prices: paper-sized panel 40 x 217") {
  TempDir dir;
  std::ostringstream csv;
  csv << "date,ticker,close\n";
  const auto calendar = synth::weekday_calendar(Date::from_ymd(2015, 7, 1), 217);
  for (int s = 0; s < 40; ++s) {
    for (const Date& d : calendar) {
      csv << d.iso() << ",T" << (s < 10 ? "0" : "") << s << ","
          << 100.0 + s << "\n";
    }
  }
  write_file(dir.file("p.csv"), csv.str());
  const auto series = load_prices(dir.file("p.csv"));
  REQUIRE(series.size() == 40);
  for (const auto& s : series) CHECK(s.observations.size() == 217);
}

TEST_CASE("load_news: records, empty bodies, unknown keywords") {
  TempDir dir;
  write_file(dir.file("n.ndjson"),
             R"({"keyword":"Mexico","date":"2015-07-01","body":"peso rallies"})"
             "\n"
             R"({"keyword":"Mexico","date":"2015-07-01","body":"markets steady"})"
             "\n"
             R"({"keyword":"Atlantis","date":"2015-07-02","body":"myth"})"
             "\n"
             R"({"keyword":"Mexico","date":"2015-07-03","body":"   "})"
             "\n");
  NewsLoadStats stats;
  const auto docs = load_news(dir.file("n.ndjson"), {"Mexico"}, &stats);
  CHECK(docs.size() == 3);  // empty body skipped, unknown keyword kept
  CHECK(stats.skipped_empty_body == 1);
  REQUIRE(stats.unknown_keywords.count("Atlantis"));
  CHECK(stats.unknown_keywords.at("Atlantis") == 1);

  int mexico = 0;
  for (const auto& d : docs) mexico += d.keyword == "Mexico";
  CHECK(mexico == 2);
}

TEST_CASE("load_news: malformed line reports its number") {
  TempDir dir;
  write_file(dir.file("n.ndjson"),
             R"({"keyword":"a","date":"2015-07-01","body":"x"})"
             "\n{broken\n");
  try {
    load_news(dir.file("n.ndjson"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("load_news: paper-sized corpus count of 64939") {
  TempDir dir;
  std::ostringstream out;
  for (int i = 0; i < 64939; ++i) {
    out << R"({"keyword":"K)" << i % 40 << R"(","date":"2015-07-01","body":"w)"
        << i << R"("})"
        << "\n";
  }
  write_file(dir.file("big.ndjson"), out.str());
  const auto docs = load_news(dir.file("big.ndjson"));
  CHECK(docs.size() == 64939);
}

namespace {

LabeledSeries make_series(const std::string& label,
                          const std::vector<std::pair<std::string, double>>& obs) {
  LabeledSeries s{label, {}};
  for (const auto& [iso, v] : obs) s.observations.emplace_back(Date::parse(iso), v);
  return s;
}

}  // namespace

TEST_CASE("align_panel: identical calendars pass through unchanged") {
  const std::vector<LabeledSeries> series = {
      make_series("A", {{"2015-07-01", 1.0}, {"2015-07-02", 2.0}}),
      make_series("B", {{"2015-07-01", 3.0}, {"2015-07-02", 4.0}})};
  for (auto policy : {CalendarPolicy::intersect, CalendarPolicy::union_all}) {
    const auto panel = align_panel(series, {policy, 3, 0.1}, PanelKind::price);
    REQUIRE(panel.series_count() == 2);
    REQUIRE(panel.length() == 2);
    CHECK(panel.values(0, 0) == 1.0);
    CHECK(panel.values(1, 1) == 4.0);
    CHECK(panel.labels == std::vector<std::string>{"A", "B"});
  }
}

TEST_CASE("align_panel: aligning an aligned panel is the identity") {
  const std::vector<LabeledSeries> series = {
      make_series("A", {{"2015-07-01", 1.0}, {"2015-07-02", 2.0}, {"2015-07-03", 5.0}}),
      make_series("B", {{"2015-07-01", 3.0}, {"2015-07-02", 4.0}, {"2015-07-03", 6.0}})};
  const AlignPolicy policy{CalendarPolicy::intersect, 3, 0.1};
  const auto once = align_panel(series, policy, PanelKind::price);
  std::vector<LabeledSeries> relabeled;
  for (Eigen::Index i = 0; i < once.series_count(); ++i) {
    LabeledSeries s{once.labels[static_cast<std::size_t>(i)], {}};
    for (Eigen::Index t = 0; t < once.length(); ++t) {
      s.observations.emplace_back(once.calendar[static_cast<std::size_t>(t)],
                                  once.values(i, t));
    }
    relabeled.push_back(std::move(s));
  }
  const auto twice = align_panel(relabeled, policy, PanelKind::price);
  CHECK(twice.calendar == once.calendar);
  CHECK(twice.labels == once.labels);
  CHECK((twice.values - once.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("align_panel: union policy forward-fills an interior gap") {
  const std::vector<LabeledSeries> series = {
      make_series("A", {{"2015-07-01", 1.0}, {"2015-07-02", 2.0}, {"2015-07-03", 3.0}}),
      make_series("B", {{"2015-07-01", 10.0}, {"2015-07-03", 30.0}})};
  AlignReport report;
  const auto panel = align_panel(series, {CalendarPolicy::union_all, 1, 0.5},
                                 PanelKind::price, &report);
  REQUIRE(panel.series_count() == 2);
  REQUIRE(panel.length() == 3);
  CHECK(panel.values(1, 1) == 10.0);  // filled with the prior value
  CHECK(report.filled_gaps == 1);
}

TEST_CASE("align_panel: gap beyond the fill limit drops the series") {
  const std::vector<LabeledSeries> series = {
      make_series("A", {{"2015-07-01", 1.0},
                        {"2015-07-02", 2.0},
                        {"2015-07-03", 3.0},
                        {"2015-07-06", 4.0},
                        {"2015-07-07", 5.0},
                        {"2015-07-08", 6.0},
                        {"2015-07-09", 7.0},
                        {"2015-07-10", 8.0},
                        {"2015-07-13", 9.0},
                        {"2015-07-14", 10.0}}),
      make_series("B", {{"2015-07-01", 1.0},
                        {"2015-07-02", 2.0},
                        {"2015-07-06", 4.0},
                        {"2015-07-07", 5.0},
                        {"2015-07-08", 6.0},
                        {"2015-07-09", 7.0},
                        {"2015-07-10", 8.0},
                        {"2015-07-13", 9.0},
                        {"2015-07-14", 10.0},
                        {"2015-07-15", 11.0}})};
  // B misses 07-03 and 07-15 is extra; with fill_limit 0 any gap is fatal.
  AlignReport report;
  const auto panel = align_panel(series, {CalendarPolicy::union_all, 0, 0.5},
                                 PanelKind::price, &report);
  CHECK(panel.series_count() == 1);
  REQUIRE(report.dropped.size() == 1);
  CHECK(report.dropped[0].label == "B");
}

TEST_CASE("align_panel: series missing 30% under a 20% threshold is dropped") {
  std::vector<std::pair<std::string, double>> full;
  const auto calendar = synth::weekday_calendar(Date::from_ymd(2015, 7, 1), 10);
  for (std::size_t i = 0; i < calendar.size(); ++i) {
    full.emplace_back(calendar[i].iso(), 1.0 + static_cast<double>(i));
  }
  auto partial = full;
  partial.resize(7);  // missing 30%
  AlignReport report;
  const auto panel =
      align_panel(std::vector<LabeledSeries>{make_series("full", full),
                                             make_series("holey", partial)},
                  {CalendarPolicy::intersect, 3, 0.2}, PanelKind::price, &report);
  CHECK(panel.series_count() == 1);
  CHECK(panel.labels == std::vector<std::string>{"full"});
  CHECK(panel.length() == 10);  // survivor keeps its full calendar
  REQUIRE(report.dropped.size() == 1);
  CHECK(report.dropped[0].label == "holey");
}

TEST_CASE("align_panel: error cases") {
  CHECK_THROWS_AS(align_panel(std::vector<LabeledSeries>{}, {}, PanelKind::price),
                  EmptyCalendar);

  const std::vector<LabeledSeries> disjoint = {
      make_series("A", {{"2015-07-01", 1.0}}),
      make_series("B", {{"2015-07-02", 2.0}})};
  CHECK_THROWS_AS(
      align_panel(disjoint, {CalendarPolicy::intersect, 3, 1.0}, PanelKind::price),
      EmptyCalendar);

  const std::vector<LabeledSeries> sparse = {
      make_series("A", {{"2015-07-01", 1.0}}),
      make_series("B", {{"2015-07-02", 2.0}})};
  CHECK_THROWS_AS(
      align_panel(sparse, {CalendarPolicy::union_all, 3, 0.2}, PanelKind::price),
      AllSeriesDropped);
}

TEST_CASE("align_panel: accepted output is always finite and preserves pairs") {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const auto calendar = synth::weekday_calendar(Date::from_ymd(2015, 1, 2), 30);
    std::vector<LabeledSeries> series;
    for (int s = 0; s < 4; ++s) {
      LabeledSeries ls{"S" + std::to_string(s), {}};
      for (const Date& d : calendar) {
        if (rng.uniform01() < 0.9) {
          ls.observations.emplace_back(d, rng.normal() + 10.0);
        }
      }
      if (ls.observations.size() < 2) ls.observations.emplace_back(calendar[0], 1.0);
      series.push_back(std::move(ls));
    }
    AlignedPanel panel;
    try {
      panel = align_panel(series, {CalendarPolicy::union_all, 2, 0.15},
                          PanelKind::price);
    } catch (const DataError&) {
      continue;  // policy rejected the draw entirely, which is fine
    }
    CHECK(panel.values.allFinite());
    // Every (date, value) pair of a surviving series must appear unchanged.
    for (Eigen::Index i = 0; i < panel.series_count(); ++i) {
      const auto& label = panel.labels[static_cast<std::size_t>(i)];
      const auto src = std::find_if(series.begin(), series.end(),
                                    [&](const auto& s) { return s.label == label; });
      REQUIRE(src != series.end());
      for (const auto& [date, value] : src->observations) {
        const auto it = std::find(panel.calendar.begin(), panel.calendar.end(), date);
        if (it != panel.calendar.end()) {
          const auto t = std::distance(panel.calendar.begin(), it);
          CHECK(panel.values(i, static_cast<Eigen::Index>(t)) == value);
        }
      }
    }
  }
}
