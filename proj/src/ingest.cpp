#include "newsflow/ingest.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>
#include <unordered_map>

#include "newsflow/errors.hpp"
#include "newsflow/util.hpp"

namespace newsflow {
namespace {

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path.string());
  return in;
}

double parse_close(std::string_view field, std::size_t line_no) {
  const std::string s{trim(field)};
  if (s.empty()) throw ParseError("empty close field at line " + std::to_string(line_no));
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) {
    throw ParseError("malformed close '" + s + "' at line " + std::to_string(line_no));
  }
  return v;
}

}  // namespace

std::vector<PriceSeries> load_prices(const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  std::map<std::string, PriceSeries> by_ticker;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view sv = trim(line);
    if (sv.empty()) continue;
    if (line_no == 1 && lower_ascii(sv) == "date,ticker,close") continue;

    const auto c1 = sv.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : sv.find(',', c1 + 1);
    if (c2 == std::string_view::npos || sv.find(',', c2 + 1) != std::string_view::npos) {
      throw ParseError("expected 'date,ticker,close' at line " + std::to_string(line_no));
    }
    Date date;
    try {
      date = Date::parse(trim(sv.substr(0, c1)));
    } catch (const ParseError& e) {
      throw ParseError(std::string(e.what()) + " at line " + std::to_string(line_no));
    }
    const std::string ticker{trim(sv.substr(c1 + 1, c2 - c1 - 1))};
    if (ticker.empty()) throw ParseError("empty ticker at line " + std::to_string(line_no));
    const double close = parse_close(sv.substr(c2 + 1), line_no);
    if (close <= 0.0) {
      throw NonPositivePrice("non-positive close " + format_double(close) + " for " +
                             ticker + " at line " + std::to_string(line_no));
    }
    auto& series = by_ticker[ticker];
    series.ticker = ticker;
    series.observations.emplace_back(date, close);
  }

  std::vector<PriceSeries> out;
  out.reserve(by_ticker.size());
  for (auto& [ticker, series] : by_ticker) {
    std::stable_sort(series.observations.begin(), series.observations.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < series.observations.size(); ++i) {
      if (series.observations[i].first == series.observations[i - 1].first) {
        throw DuplicateDate("duplicate date " + series.observations[i].first.iso() +
                            " for ticker " + ticker);
      }
    }
    out.push_back(std::move(series));
  }
  return out;
}

std::vector<NewsDocument> load_news(const std::filesystem::path& path,
                                    const std::set<std::string>& keyword_set,
                                    NewsLoadStats* stats) {
  std::ifstream in = open_or_throw(path);
  std::vector<NewsDocument> docs;
  NewsLoadStats local;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("bad JSON record at line " + std::to_string(line_no) + ": " +
                       e.what());
    }
    if (!record.is_object() || !record.contains("keyword") || !record.contains("date") ||
        !record.contains("body") || !record["keyword"].is_string() ||
        !record["date"].is_string() || !record["body"].is_string()) {
      throw ParseError("record at line " + std::to_string(line_no) +
                       " needs string fields keyword/date/body");
    }
    NewsDocument doc;
    doc.keyword = record["keyword"].get<std::string>();
    try {
      doc.date = Date::parse(record["date"].get<std::string>());
    } catch (const ParseError& e) {
      throw ParseError(std::string(e.what()) + " at line " + std::to_string(line_no));
    }
    doc.body = record["body"].get<std::string>();
    if (trim(doc.body).empty()) {
      ++local.skipped_empty_body;
      continue;
    }
    if (!keyword_set.empty() && !keyword_set.count(doc.keyword)) {
      ++local.unknown_keywords[doc.keyword];
    }
    docs.push_back(std::move(doc));
  }
  if (stats) *stats = std::move(local);
  return docs;
}

void write_news_ndjson(const std::filesystem::path& path,
                       std::span<const NewsDocument> docs) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path.string());
  for (const auto& doc : docs) {
    nlohmann::json record;
    record["keyword"] = doc.keyword;
    record["date"] = doc.date.iso();
    record["body"] = doc.body;
    out << record.dump() << '\n';
  }
}

std::vector<LabeledSeries> to_labeled(std::span<const PriceSeries> prices) {
  std::vector<LabeledSeries> out;
  out.reserve(prices.size());
  for (const auto& p : prices) out.push_back({p.ticker, p.observations});
  return out;
}

AlignedPanel align_panel(std::span<const LabeledSeries> series,
                         const AlignPolicy& policy, PanelKind kind,
                         AlignReport* report) {
  if (series.empty()) throw EmptyCalendar("no input series");

  std::vector<std::map<Date, double>> maps(series.size());
  for (std::size_t s = 0; s < series.size(); ++s) {
    for (const auto& [date, value] : series[s].observations) {
      if (!maps[s].emplace(date, value).second) {
        throw DuplicateDate("duplicate date " + date.iso() + " in series " +
                            series[s].label);
      }
    }
  }

  // Drop decisions are made against the union of all observed dates, so a
  // sparse series cannot silently shrink an intersection calendar.
  std::map<Date, int> union_dates;
  for (const auto& m : maps) {
    for (const auto& [date, value] : m) ++union_dates[date];
  }
  if (union_dates.empty()) throw EmptyCalendar("no observations in any series");
  const double union_size = static_cast<double>(union_dates.size());

  AlignReport local;
  std::vector<std::size_t> kept;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double missing = union_size - static_cast<double>(maps[s].size());
    if (missing / union_size > policy.drop_threshold) {
      std::ostringstream why;
      why << "missing " << format_double(missing / union_size)
          << " of calendar (threshold " << format_double(policy.drop_threshold) << ")";
      local.dropped.push_back({series[s].label, why.str()});
    } else {
      kept.push_back(s);
    }
  }
  if (kept.empty()) throw AllSeriesDropped("every series exceeded the missing-data threshold");

  // Final calendar over survivors only.
  std::vector<Date> calendar;
  if (policy.calendar == CalendarPolicy::union_all) {
    std::map<Date, int> dates;
    for (std::size_t s : kept) {
      for (const auto& [date, value] : maps[s]) dates[date] = 1;
    }
    for (const auto& [date, n] : dates) calendar.push_back(date);
  } else {
    for (const auto& [date, value] : maps[kept.front()]) {
      bool in_all = true;
      for (std::size_t i = 1; i < kept.size() && in_all; ++i) {
        in_all = maps[kept[i]].count(date) > 0;
      }
      if (in_all) calendar.push_back(date);
    }
  }
  if (calendar.empty()) throw EmptyCalendar("calendar intersection is empty");

  AlignedPanel panel;
  panel.kind = kind;
  panel.calendar = calendar;
  std::vector<std::size_t> final_rows;
  std::vector<std::vector<double>> rows;
  for (std::size_t s : kept) {
    std::vector<double> row(calendar.size());
    int gap_run = 0;
    bool have_prev = false;
    double prev = 0.0;
    bool unfillable = false;
    std::size_t filled = 0;
    for (std::size_t t = 0; t < calendar.size(); ++t) {
      const auto it = maps[s].find(calendar[t]);
      if (it != maps[s].end()) {
        row[t] = it->second;
        prev = it->second;
        have_prev = true;
        gap_run = 0;
      } else {
        ++gap_run;
        if (!have_prev || gap_run > policy.fill_limit) {
          unfillable = true;
          break;
        }
        row[t] = prev;
        ++filled;
      }
    }
    if (unfillable) {
      local.dropped.push_back(
          {series[s].label, "gap not fillable under fill_limit " +
                                std::to_string(policy.fill_limit)});
      continue;
    }
    local.filled_gaps += filled;
    final_rows.push_back(s);
    rows.push_back(std::move(row));
  }
  if (final_rows.empty()) throw AllSeriesDropped("no series survived gap filling");

  panel.values.resize(static_cast<Eigen::Index>(final_rows.size()),
                      static_cast<Eigen::Index>(calendar.size()));
  for (std::size_t r = 0; r < final_rows.size(); ++r) {
    panel.labels.push_back(series[final_rows[r]].label);
    for (std::size_t t = 0; t < calendar.size(); ++t) {
      panel.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(t)) =
          rows[r][t];
    }
  }
  validate_panel(panel);
  if (report) *report = std::move(local);
  return panel;
}

}  // namespace newsflow
