#include "newsflow/fetch.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <httplib.h>
#include <json.hpp>
#include <thread>

#include "newsflow/errors.hpp"
#include "newsflow/util.hpp"

namespace newsflow {
namespace {

struct SplitEndpoint {
  std::string base;  // scheme://host:port
  std::string path;
};

SplitEndpoint split_endpoint(const std::string& endpoint) {
  const auto scheme = endpoint.find("://");
  if (scheme == std::string::npos) {
    throw InvalidInput("endpoint must be an http(s) URL: " + endpoint);
  }
  const auto slash = endpoint.find('/', scheme + 3);
  if (slash == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, slash), endpoint.substr(slash)};
}

std::string percent_encode(const std::string& value) {
  std::string out;
  for (unsigned char c : value) {
    const bool keep = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
                      (c >= 'A' && c <= 'Z') || c == '-' || c == '_' || c == '.' ||
                      c == '~';
    if (keep) {
      out.push_back(static_cast<char>(c));
    } else {
      char buf[4];
      std::snprintf(buf, sizeof(buf), "%%%02X", c);
      out += buf;
    }
  }
  return out;
}

std::string compact_date(Date d) {
  std::string iso = d.iso();  // YYYY-MM-DD -> YYYYMMDD
  iso.erase(7, 1);
  iso.erase(4, 1);
  return iso;
}

std::vector<NewsDocument> parse_page(const std::string& body,
                                     const std::string& keyword) {
  nlohmann::json page;
  try {
    page = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw NetworkError(std::string("malformed response body: ") + e.what());
  }
  std::vector<NewsDocument> docs;
  if (!page.contains("docs") || !page["docs"].is_array()) return docs;
  for (const auto& record : page["docs"]) {
    NewsDocument doc;
    doc.keyword = record.value("keyword", keyword);
    doc.date = Date::parse(record.value("date", ""));
    doc.body = record.value("body", "");
    if (!trim(doc.body).empty()) docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace

std::vector<NewsDocument> fetch_articles(const std::string& keyword, Date begin,
                                         Date end, const FetchOptions& options,
                                         FetchStats* stats) {
  if (options.endpoint.empty()) throw InvalidInput("fetch endpoint is not configured");
  const SplitEndpoint ep = split_endpoint(options.endpoint);
  httplib::Client client(ep.base);
  client.set_connection_timeout(10, 0);
  client.set_read_timeout(30, 0);

  FetchStats local;
  std::vector<NewsDocument> all;
  if (!options.cache_dir.empty()) std::filesystem::create_directories(options.cache_dir);

  for (int page = 0;; ++page) {
    const std::string query = ep.path + "?q=" + percent_encode(keyword) +
                              "&begin_date=" + compact_date(begin) +
                              "&end_date=" + compact_date(end) +
                              "&page=" + std::to_string(page);

    std::filesystem::path cache_file;
    std::string body;
    bool from_cache = false;
    if (!options.cache_dir.empty()) {
      cache_file = options.cache_dir /
                   (to_hex(fnv1a64(keyword + "|" + begin.iso() + "|" + end.iso() +
                                   "|" + std::to_string(page))) +
                    ".json");
      if (std::filesystem::exists(cache_file)) {
        std::ifstream in(cache_file, std::ios::binary);
        body.assign(std::istreambuf_iterator<char>(in), {});
        from_cache = true;
        ++local.cache_hits;
      }
    }

    if (!from_cache) {
      const std::string url =
          query + (options.api_key.empty() ? "" : "&api-key=" + percent_encode(options.api_key));
      bool done = false;
      for (int attempt = 0; !done; ++attempt) {
        if (options.rate_limit_ms > 0 && (local.requests > 0 || attempt > 0)) {
          std::this_thread::sleep_for(std::chrono::milliseconds(options.rate_limit_ms));
        }
        ++local.requests;
        httplib::Result res = client.Get(url);
        const bool retryable =
            !res || res->status == 429 || (res->status >= 500 && res->status < 600);
        if (res && res->status == 200) {
          body = res->body;
          done = true;
        } else if (res && (res->status == 401 || res->status == 403)) {
          if (stats) *stats = local;
          throw AuthError("endpoint rejected credentials (HTTP " +
                          std::to_string(res->status) + ")");
        } else if (retryable && attempt < options.max_retries) {
          ++local.retries;
          const int delay = options.retry_base_ms << std::min(attempt, 10);
          if (delay > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay));
        } else {
          if (stats) *stats = local;
          if (res && res->status == 429) {
            throw RateLimited("still rate-limited after " +
                              std::to_string(options.max_retries) + " retries");
          }
          throw NetworkError(res ? "HTTP " + std::to_string(res->status) + " from endpoint"
                                 : "no response from endpoint");
        }
      }
      if (!cache_file.empty()) {
        std::ofstream out(cache_file, std::ios::binary);
        out << body;
      }
    }

    const std::vector<NewsDocument> docs = parse_page(body, keyword);
    ++local.pages;
    if (docs.empty()) break;
    all.insert(all.end(), docs.begin(), docs.end());
  }
  if (stats) *stats = local;
  return all;
}

}  // namespace newsflow
