#include <doctest.h>

#include <atomic>
#include <json.hpp>
#include <thread>

#include "newsflow/errors.hpp"
#include "newsflow/fetch.hpp"
#include "newsflow/ingest.hpp"
#include "test_support.hpp"

// httplib drags in <resolv.h>, whose _res macro mangles Eigen's parameter
// names; keep it after every Eigen-including header.
#include <httplib.h>

using namespace newsflow;
using test_support::TempDir;

namespace {

/// In-process article-search endpoint for exercising the client.
class MockEndpoint {
 public:
  explicit MockEndpoint(int articles_on_page0, int fail_with_429 = 0,
                        int status_override = 0)
      : articles_(articles_on_page0),
        remaining_429_(fail_with_429),
        status_override_(status_override) {
    server_.Get("/search", [this](const httplib::Request& req, httplib::Response& res) {
      ++hits_;
      last_query_ = req.get_param_value("q");
      last_api_key_ = req.get_param_value("api-key");
      if (status_override_ != 0) {
        res.status = status_override_;
        return;
      }
      if (remaining_429_ > 0) {
        --remaining_429_;
        res.status = 429;
        return;
      }
      const int page = std::stoi(req.get_param_value("page"));
      nlohmann::json docs = nlohmann::json::array();
      if (page == 0) {
        for (int i = 0; i < articles_; ++i) {
          docs.push_back({{"keyword", last_query_},
                          {"date", "2015-07-0" + std::to_string(1 + i % 7)},
                          {"body", "article " + std::to_string(i)}});
        }
      }
      res.set_content(nlohmann::json{{"docs", docs}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MockEndpoint() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/search";
  }
  int hits() const { return hits_; }
  std::string last_query() const { return last_query_; }
  std::string last_api_key() const { return last_api_key_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  int articles_;
  std::atomic<int> remaining_429_;
  int status_override_;
  std::atomic<int> hits_{0};
  std::string last_query_;
  std::string last_api_key_;
};

FetchOptions options_for(const MockEndpoint& server, const TempDir* cache = nullptr) {
  FetchOptions options;
  options.endpoint = server.endpoint();
  options.retry_base_ms = 1;
  options.rate_limit_ms = 0;
  if (cache) options.cache_dir = cache->path() / "cache";
  return options;
}

}  // namespace

TEST_CASE("fetch_articles: five fixture articles with the requested keyword") {
  MockEndpoint server(5);
  FetchStats stats;
  const auto docs = fetch_articles("Mexico", Date::parse("2015-07-01"),
                                   Date::parse("2015-08-01"), options_for(server),
                                   &stats);
  REQUIRE(docs.size() == 5);
  for (const auto& doc : docs) CHECK(doc.keyword == "Mexico");
  CHECK(server.last_query() == "Mexico");
  CHECK(stats.pages == 2);  // page 0 with content, page 1 empty terminator
  CHECK(stats.retries == 0);
}

TEST_CASE("fetch_articles: empty result page is not an error") {
  MockEndpoint server(0);
  const auto docs = fetch_articles("Nowhere", Date::parse("2015-07-01"),
                                   Date::parse("2015-07-02"), options_for(server));
  CHECK(docs.empty());
}

TEST_CASE("fetch_articles: three 429s then success, retries logged") {
  MockEndpoint server(2, 3);
  FetchStats stats;
  const auto docs = fetch_articles("Chile", Date::parse("2015-07-01"),
                                   Date::parse("2015-07-31"), options_for(server),
                                   &stats);
  CHECK(docs.size() == 2);
  CHECK(stats.retries == 3);
}

TEST_CASE("fetch_articles: persistent 429 raises RateLimited") {
  MockEndpoint server(1, 1000);
  FetchOptions options = options_for(server);
  options.max_retries = 2;
  CHECK_THROWS_AS(fetch_articles("x", Date::parse("2015-07-01"),
                                 Date::parse("2015-07-02"), options),
                  RateLimited);
}

TEST_CASE("fetch_articles: auth failures do not retry") {
  MockEndpoint server(1, 0, 401);
  FetchStats stats;
  CHECK_THROWS_AS(fetch_articles("x", Date::parse("2015-07-01"),
                                 Date::parse("2015-07-02"), options_for(server),
                                 &stats),
                  AuthError);
  CHECK(stats.requests == 1);
}

TEST_CASE("fetch_articles: api key is sent as a query parameter") {
  MockEndpoint server(1);
  FetchOptions options = options_for(server);
  options.api_key = "secret-key";
  (void)fetch_articles("Peru", Date::parse("2015-07-01"), Date::parse("2015-07-02"),
                       options);
  CHECK(server.last_api_key() == "secret-key");
}

TEST_CASE("fetch_articles: disk cache short-circuits repeat requests") {
  TempDir dir;
  MockEndpoint server(3);
  const FetchOptions options = options_for(server, &dir);
  FetchStats first;
  const auto a = fetch_articles("Japan", Date::parse("2015-07-01"),
                                Date::parse("2015-07-05"), options, &first);
  const int hits_after_first = server.hits();
  FetchStats second;
  const auto b = fetch_articles("Japan", Date::parse("2015-07-01"),
                                Date::parse("2015-07-05"), options, &second);
  CHECK(a.size() == b.size());
  CHECK(server.hits() == hits_after_first);  // served from cache
  CHECK(second.cache_hits == 2);
  CHECK(second.requests == 0);

  // A different date range is a different cache key.
  FetchStats third;
  (void)fetch_articles("Japan", Date::parse("2015-07-01"), Date::parse("2015-07-06"),
                       options, &third);
  CHECK(third.requests > 0);
}

TEST_CASE("fetch_articles: unreachable endpoint raises NetworkError") {
  FetchOptions options;
  options.endpoint = "http://127.0.0.1:9/search";  // closed port
  options.max_retries = 0;
  options.retry_base_ms = 1;
  CHECK_THROWS_AS(fetch_articles("x", Date::parse("2015-07-01"),
                                 Date::parse("2015-07-02"), options),
                  NetworkError);
  FetchOptions bad;
  bad.endpoint = "not-a-url";
  CHECK_THROWS_AS(fetch_articles("x", Date::parse("2015-07-01"),
                                 Date::parse("2015-07-02"), bad),
                  InvalidInput);
}

TEST_CASE("fetched documents persist in the load_news record format") {
  TempDir dir;
  MockEndpoint server(4);
  const auto docs = fetch_articles("Kenya", Date::parse("2015-07-01"),
                                   Date::parse("2015-07-09"), options_for(server));
  write_news_ndjson(dir.file("fetched.ndjson"), docs);
  const auto reloaded = load_news(dir.file("fetched.ndjson"));
  REQUIRE(reloaded.size() == docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    CHECK(reloaded[i].keyword == docs[i].keyword);
    CHECK(reloaded[i].date == docs[i].date);
    CHECK(reloaded[i].body == docs[i].body);
  }
}
