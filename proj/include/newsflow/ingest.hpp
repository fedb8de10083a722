#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "newsflow/panel.hpp"

namespace newsflow {

struct PriceSeries {
  std::string ticker;
  std::string country;  // optional, not present in the CSV schema
  std::vector<std::pair<Date, double>> observations;
};

struct NewsDocument {
  std::string keyword;
  Date date;
  std::string body;
};

/// Reads UTF-8 CSV `date,ticker,close` (ISO dates, header row optional).
/// One series per ticker, sorted by date. Throws ParseError (with line
/// number), NonPositivePrice, DuplicateDate.
std::vector<PriceSeries> load_prices(const std::filesystem::path& path);

struct NewsLoadStats {
  std::size_t skipped_empty_body = 0;
  std::map<std::string, std::size_t> unknown_keywords;  // keyword -> count
};

/// Reads newline-delimited JSON records {keyword, date, body}. Records with
/// an empty body (after trimming) are skipped and counted. Keywords outside
/// `keyword_set` (when non-empty) are kept but reported in stats.
std::vector<NewsDocument> load_news(const std::filesystem::path& path,
                                    const std::set<std::string>& keyword_set = {},
                                    NewsLoadStats* stats = nullptr);

void write_news_ndjson(const std::filesystem::path& path,
                       std::span<const NewsDocument> docs);

struct LabeledSeries {
  std::string label;
  std::vector<std::pair<Date, double>> observations;
};

enum class CalendarPolicy { intersect, union_all };

struct AlignPolicy {
  CalendarPolicy calendar = CalendarPolicy::intersect;
  int fill_limit = 3;           // max consecutive forward-filled days
  double drop_threshold = 0.10;  // drop series missing more than this fraction
};

struct AlignReport {
  struct DroppedSeries {
    std::string label;
    std::string reason;
  };
  std::vector<DroppedSeries> dropped;
  std::size_t filled_gaps = 0;
};

/// Aligns series onto a shared calendar (intersection or union of observed
/// dates, per policy). Under union, interior gaps are forward-filled up to
/// policy.fill_limit consecutive days; series that would still have holes,
/// or that miss more than drop_threshold of the calendar, are dropped and
/// reported. Throws EmptyCalendar, AllSeriesDropped.
AlignedPanel align_panel(std::span<const LabeledSeries> series,
                         const AlignPolicy& policy, PanelKind kind,
                         AlignReport* report = nullptr);

std::vector<LabeledSeries> to_labeled(std::span<const PriceSeries> prices);

}  // namespace newsflow
