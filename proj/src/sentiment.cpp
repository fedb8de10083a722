#include "newsflow/sentiment.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>

#include "newsflow/errors.hpp"
#include "newsflow/util.hpp"

namespace newsflow {

Lexicon Lexicon::load_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open lexicon: " + path.string());
  Lexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("lexicon line " + std::to_string(line_no) + " is not token<TAB>score");
    }
    const std::string token = lower_ascii(trim(line.substr(0, tab)));
    if (token.empty()) {
      throw ParseError("empty lexicon token at line " + std::to_string(line_no));
    }
    if (token.find_first_of(" \t") != std::string::npos) {
      throw ParseError("lexicon token '" + token + "' contains whitespace (line " +
                       std::to_string(line_no) + "); multi-word entries are unsupported");
    }
    const std::string score_field{trim(line.substr(tab + 1))};
    char* end = nullptr;
    const double score = std::strtod(score_field.c_str(), &end);
    if (end != score_field.c_str() + score_field.size() || score_field.empty()) {
      throw ParseError("malformed lexicon score at line " + std::to_string(line_no));
    }
    if (score < -4.0 || score > 4.0) {
      throw ParseError("lexicon score " + format_double(score) + " outside [-4, 4] at line " +
                       std::to_string(line_no));
    }
    lex.entries[token] = score;
  }
  return lex;
}

std::vector<std::string> clean_text(std::string_view raw) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : raw) {
    const bool alnum = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    if (alnum) {
      current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a')
                                             : static_cast<char>(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

double score_text(std::span<const std::string> tokens, const Lexicon& lexicon) {
  if (lexicon.entries.empty()) throw InvalidInput("empty lexicon");
  double sum = 0.0;
  std::size_t hits = 0;
  for (const auto& token : tokens) {
    const auto it = lexicon.entries.find(token);
    if (it != lexicon.entries.end()) {
      sum += it->second;
      ++hits;
    }
  }
  if (hits == 0) throw NoLexiconHit("no token matched the lexicon");
  return sum / static_cast<double>(hits);
}

PolaritySeries daily_polarity(std::span<const NewsDocument> docs,
                              const std::string& keyword,
                              std::span<const Date> calendar, const Lexicon& lexicon,
                              const SentimentOptions& options) {
  if (calendar.empty()) throw EmptyCalendar("daily_polarity needs a calendar");

  struct DayAccumulator {
    double score_sum = 0.0;  // per_document: sum of document scores
    int scored_docs = 0;
    double token_sum = 0.0;  // pooled_tokens: sum over lexicon hits
    std::size_t token_hits = 0;
  };
  std::map<Date, DayAccumulator> days;
  for (const auto& doc : docs) {
    if (doc.keyword != keyword) continue;
    auto& acc = days[doc.date];
    const auto tokens = clean_text(doc.body);
    double doc_sum = 0.0;
    std::size_t doc_hits = 0;
    for (const auto& token : tokens) {
      const auto it = lexicon.entries.find(token);
      if (it != lexicon.entries.end()) {
        doc_sum += it->second;
        ++doc_hits;
      }
    }
    if (doc_hits == 0) continue;  // NoLexiconHit documents are excluded from the mean
    acc.score_sum += doc_sum / static_cast<double>(doc_hits);
    acc.scored_docs += 1;
    acc.token_sum += doc_sum;
    acc.token_hits += doc_hits;
  }

  PolaritySeries series;
  series.keyword = keyword;
  series.observations.reserve(calendar.size());
  double carried = 0.0;
  for (const Date& date : calendar) {
    PolarityObservation obs;
    obs.date = date;
    const auto it = days.find(date);
    if (it != days.end() && it->second.scored_docs > 0) {
      const auto& acc = it->second;
      obs.polarity = options.aggregation == DayAggregation::per_document
                         ? acc.score_sum / acc.scored_docs
                         : acc.token_sum / static_cast<double>(acc.token_hits);
      obs.doc_count = acc.scored_docs;
      carried = obs.polarity;
    } else {
      obs.imputed = true;
      obs.doc_count = 0;
      obs.polarity = options.impute == ImputePolicy::carry_forward ? carried : 0.0;
    }
    series.observations.push_back(obs);
  }
  return series;
}

AlignedPanel polarity_panel(std::span<const PolaritySeries> series,
                            std::span<const Date> calendar) {
  if (series.empty()) throw EmptyCalendar("no polarity series");
  AlignedPanel panel;
  panel.kind = PanelKind::polarity;
  panel.calendar.assign(calendar.begin(), calendar.end());
  panel.values.resize(static_cast<Eigen::Index>(series.size()),
                      static_cast<Eigen::Index>(calendar.size()));
  for (std::size_t s = 0; s < series.size(); ++s) {
    if (series[s].observations.size() != calendar.size()) {
      throw CalendarMismatch("polarity series " + series[s].keyword +
                             " does not match the calendar");
    }
    panel.labels.push_back(series[s].keyword);
    for (std::size_t t = 0; t < calendar.size(); ++t) {
      if (series[s].observations[t].date != calendar[t]) {
        throw CalendarMismatch("polarity series " + series[s].keyword +
                               " has shifted dates");
      }
      panel.values(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) =
          series[s].observations[t].polarity;
    }
  }
  validate_panel(panel);
  return panel;
}

}  // namespace newsflow
