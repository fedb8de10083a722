#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "newsflow/ingest.hpp"
#include "newsflow/panel.hpp"

namespace newsflow {

/// Valence lexicon: lowercase token -> score in [-4, 4].
struct Lexicon {
  std::unordered_map<std::string, double> entries;

  /// Two-column TSV `token<TAB>score`. Tokens are lowercased; scores outside
  /// [-4, 4], empty tokens, or tokens with internal whitespace are rejected.
  static Lexicon load_tsv(const std::filesystem::path& path);
};

/// Maximal runs of ASCII alphanumeric characters, lowercased. Everything
/// else (punctuation, symbols, non-ASCII bytes) separates tokens.
std::vector<std::string> clean_text(std::string_view raw);

/// Mean lexicon score over tokens found in the lexicon; tokens without an
/// entry contribute nothing. Throws NoLexiconHit when no token matches.
double score_text(std::span<const std::string> tokens, const Lexicon& lexicon);

struct PolarityObservation {
  Date date;
  double polarity = 0.0;
  int doc_count = 0;  // documents that contributed a score that day
  bool imputed = false;
};

struct PolaritySeries {
  std::string keyword;
  std::vector<PolarityObservation> observations;
};

enum class ImputePolicy { neutral_zero, carry_forward };
enum class DayAggregation { per_document, pooled_tokens };

struct SentimentOptions {
  ImputePolicy impute = ImputePolicy::neutral_zero;
  DayAggregation aggregation = DayAggregation::per_document;
};

/// Daily polarity of `keyword` over `calendar`. per_document: each document
/// is scored once and the day value is the unweighted mean over scored
/// documents. pooled_tokens: all of the day's tokens are pooled before
/// averaging. Days with no scored documents are imputed per policy and
/// flagged.
PolaritySeries daily_polarity(std::span<const NewsDocument> docs,
                              const std::string& keyword,
                              std::span<const Date> calendar, const Lexicon& lexicon,
                              const SentimentOptions& options = {});

/// Assembles polarity series (all on the same calendar) into a panel.
AlignedPanel polarity_panel(std::span<const PolaritySeries> series,
                            std::span<const Date> calendar);

}  // namespace newsflow
