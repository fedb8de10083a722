// Deterministic generator for the synthetic end-to-end fixture under
// data/fixture/: 10 indices and 10 news keywords on 218 trading days with a
// shared one-factor structure, where day-t polarity leads the day-t ->
// day-t+1 price move. Run from the repository root (no arguments needed) to
// regenerate the checked-in files byte-for-byte.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "newsflow/dates.hpp"
#include "newsflow/rng.hpp"
#include "newsflow/synth.hpp"
#include "newsflow/util.hpp"

namespace {

constexpr std::uint64_t kFixtureSeed = 20150701;
constexpr int kSeries = 10;
constexpr int kCalendarDays = 218;  // 217 paired polarity/return days

const std::vector<std::string> kTickers = {"AURX", "BORX", "CESX", "DRVX", "ELVX",
                                           "FJRX", "GALX", "HSTX", "ISTX", "JOVX"};
const std::vector<std::string> kKeywords = {
    "aurelia", "borland", "cestia",   "dravonia", "elveria",
    "fjordia", "galland", "hestavia", "istrana",  "jovania"};

struct Word {
  const char* token;
  double score;
};

const std::vector<Word> kPositive = {{"gain", 2.0},   {"rally", 2.5}, {"boom", 3.0},
                                     {"profit", 2.0}, {"calm", 1.5},  {"growth", 2.5},
                                     {"strong", 2.0}, {"optimism", 3.0}};
const std::vector<Word> kNegative = {{"loss", -2.0},  {"crash", -3.0}, {"panic", -2.5},
                                     {"fear", -2.0},  {"crisis", -2.5}, {"weak", -1.5},
                                     {"default", -3.0}, {"slump", -2.0}};
const std::vector<const char*> kFiller = {
    "the",     "market",  "index",   "trading", "session", "report",
    "central", "bank",    "week",    "prices",  "shares",  "investors",
    "output",  "figures", "exchange"};

std::string make_body(const std::string& keyword, double target, newsflow::Rng& rng) {
  std::string body = "In " + keyword + " the market report said";
  const int scored = 6 + static_cast<int>(rng.below(5));
  const int filler = 4 + static_cast<int>(rng.below(8));
  const double p_positive = 0.5 + 0.25 * std::max(-1.8, std::min(1.8, target));
  for (int w = 0; w < scored; ++w) {
    const bool positive = rng.uniform01() < p_positive;
    const auto& pool = positive ? kPositive : kNegative;
    body += " ";
    body += pool[rng.below(pool.size())].token;
    if (w + 1 < scored && rng.below(4) == 0) {
      body += ",";
    }
    body += " ";
    body += kFiller[rng.below(kFiller.size())];
  }
  for (int w = 0; w < filler; ++w) {
    body += " ";
    body += kFiller[rng.below(kFiller.size())];
  }
  body += ".";
  return body;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regenerate the synthetic pipeline fixture"};
  std::string out_dir = "data/fixture";
  app.add_option("--out", out_dir, "output directory");
  CLI11_PARSE(app, argc, argv);

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);

  const auto calendar = newsflow::synth::weekday_calendar(
      newsflow::Date::from_ymd(2015, 7, 1), kCalendarDays);

  newsflow::Rng rng(kFixtureSeed);

  // Shared news factor g(t); returns load on the same factor so that day-t
  // polarity anticipates the day-t -> t+1 move.
  std::vector<double> news_factor(kCalendarDays);
  for (double& g : news_factor) g = rng.normal();

  std::vector<double> sentiment_loading(kSeries);
  std::vector<double> return_loading(kSeries);
  for (int s = 0; s < kSeries; ++s) {
    sentiment_loading[s] = 0.55 + 0.35 * rng.uniform01();
    return_loading[s] = 0.45 + 0.35 * rng.uniform01();
  }

  // Prices: geometric walk driven by a blend of the news factor and fresh
  // market noise.
  std::vector<std::vector<double>> prices(kSeries,
                                          std::vector<double>(kCalendarDays));
  for (int s = 0; s < kSeries; ++s) {
    prices[s][0] = 80.0 + 10.0 * s;
  }
  const double blend = std::sqrt(0.6 * 0.6 + 0.4 * 0.4);
  for (int t = 0; t + 1 < kCalendarDays; ++t) {
    const double market_shock = rng.normal();
    const double factor = (0.6 * news_factor[t] + 0.4 * market_shock) / blend;
    for (int s = 0; s < kSeries; ++s) {
      const double beta = return_loading[s];
      const double idio = std::sqrt(1.0 - beta * beta) * rng.normal();
      const double daily_return = 0.012 * (beta * factor + idio);
      prices[s][t + 1] = prices[s][t] * (1.0 + daily_return);
    }
  }

  {
    std::ofstream out(dir / "prices.csv");
    out << "date,ticker,close\n";
    for (int s = 0; s < kSeries; ++s) {
      for (int t = 0; t < kCalendarDays; ++t) {
        out << calendar[t].iso() << ',' << kTickers[s] << ','
            << newsflow::format_double(prices[s][t]) << '\n';
      }
    }
  }

  {
    std::ofstream out(dir / "lexicon.tsv");
    for (const auto& word : kPositive) {
      out << word.token << '\t' << newsflow::format_double(word.score) << '\n';
    }
    for (const auto& word : kNegative) {
      out << word.token << '\t' << newsflow::format_double(word.score) << '\n';
    }
  }

  {
    std::ofstream out(dir / "news.ndjson");
    for (int s = 0; s < kSeries; ++s) {
      for (int t = 0; t < kCalendarDays; ++t) {
        const double target = sentiment_loading[s] * news_factor[t] +
                              std::sqrt(1.0 - sentiment_loading[s] *
                                                  sentiment_loading[s]) *
                                  rng.normal() * 0.6;
        const int docs = 1 + static_cast<int>(rng.below(3));
        for (int d = 0; d < docs; ++d) {
          nlohmann::json record;
          record["keyword"] = kKeywords[s];
          record["date"] = calendar[t].iso();
          record["body"] = make_body(kKeywords[s], target, rng);
          out << record.dump() << '\n';
        }
        // Occasional weekend story; outside the trading calendar, so the
        // pipeline never scores it.
        if (rng.below(20) == 0) {
          nlohmann::json record;
          record["keyword"] = kKeywords[s];
          const auto saturday = calendar[t] + (6 - calendar[t].weekday());
          record["date"] = saturday.iso();
          record["body"] = make_body(kKeywords[s], 0.0, rng);
          out << record.dump() << '\n';
        }
      }
    }
  }

  {
    std::ofstream out(dir / "mapping.csv");
    out << "ticker,keyword\n";
    for (int s = 0; s < kSeries; ++s) {
      out << kTickers[s] << ',' << kKeywords[s] << '\n';
    }
  }

  {
    nlohmann::json config;
    config["seed"] = 7;
    config["threads"] = 1;
    config["output_dir"] = "out";
    config["inputs"] = {{"prices", (dir / "prices.csv").generic_string()},
                        {"news", (dir / "news.ndjson").generic_string()},
                        {"lexicon", (dir / "lexicon.tsv").generic_string()},
                        {"mapping", (dir / "mapping.csv").generic_string()}};
    config["align"] = {{"calendar", "intersect"},
                       {"fill_limit", 3},
                       {"drop_threshold", 0.1}};
    config["window"] = {{"size", 160}, {"step", 1}};
    config["te"] = {{"k", {1}},
                    {"bandwidth", "silverman"},
                    {"log_base", "bits"},
                    {"surrogates", 100}};
    config["cwoe"] = {{"realizations", 100}};
    std::ofstream out(dir / "config.json");
    out << config.dump(2) << '\n';
  }

  std::cout << "fixture written to " << out_dir << "\n";
  return 0;
}
