/*
 * Copyright 2026 The colabel Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "colabel/llm_client.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <istream>
#include <mutex>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include <httplib.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "colabel/error.hpp"
#include "colabel/prompt.hpp"

namespace colabel {

using nlohmann::json;

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 computation failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

PredictionSet LlmAnnotations::parse(const LabelSpace& space) const {
  PredictionSet out;
  out.labels.resize(raw.size());
  for (std::size_t v = 0; v < raw.size(); ++v) {
    if (!raw[v]) continue;
    auto c = parse_llm_label(*raw[v], space);
    out.labels[v] = c ? Prediction::of(*c) : Prediction::unparsed();
  }
  return out;
}

namespace {

json parse_line(const std::string& line, const std::string& source, std::size_t line_no) {
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(source, line_no, e.what());
  }
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r\n") == std::string::npos; }

NodeId node_field(const json& j, std::size_t n_nodes, const std::string& source, std::size_t line_no) {
  if (!j.is_object() || !j.contains("node_id") || !j.at("node_id").is_number_unsigned())
    throw ParseError(source, line_no, "expected an object with an unsigned \"node_id\"");
  const auto id = j.at("node_id").get<std::uint64_t>();
  if (id >= n_nodes) throw ParseError(source, line_no, "node id " + std::to_string(id) + " >= " + std::to_string(n_nodes));
  return static_cast<NodeId>(id);
}

}  // namespace

LlmAnnotations read_llm_predictions(std::istream& in, std::size_t n_nodes, const std::string& source_name) {
  LlmAnnotations out;
  out.raw.resize(n_nodes);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const json j = parse_line(line, source_name, line_no);
    const NodeId v = node_field(j, n_nodes, source_name, line_no);
    if (!j.contains("label") || !j.at("label").is_string())
      throw ParseError(source_name, line_no, "expected a string \"label\"");
    if (out.raw[v]) throw ParseError(source_name, line_no, "duplicate prediction for node " + std::to_string(v));
    out.raw[v] = j.at("label").get<std::string>();
  }
  return out;
}

LlmAnnotations load_llm_predictions(const std::filesystem::path& path, std::size_t n_nodes) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open llm predictions file " + path.string());
  return read_llm_predictions(in, n_nodes, path.string());
}

std::string annotations_to_jsonl(const LlmAnnotations& ann, std::span<const NodeId> nodes, const LabelSpace& space) {
  const PredictionSet parsed = ann.parse(space);
  std::string out;
  for (NodeId v : nodes) {
    json j;
    j["node_id"] = v;
    j["raw"] = ann.raw.at(v) ? json(*ann.raw[v]) : json(nullptr);
    j["label"] = parsed.labels[v].parsed() ? json(space.name(parsed.labels[v].label)) : json(nullptr);
    out += j.dump();
    out += '\n';
  }
  return out;
}

LlmAnnotations annotations_from_jsonl(std::istream& in, std::size_t n_nodes, const std::string& source_name) {
  LlmAnnotations out;
  out.raw.resize(n_nodes);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const json j = parse_line(line, source_name, line_no);
    const NodeId v = node_field(j, n_nodes, source_name, line_no);
    if (!j.contains("raw")) throw ParseError(source_name, line_no, "missing \"raw\"");
    const auto& r = j.at("raw");
    if (r.is_string()) out.raw[v] = r.get<std::string>();
    else if (!r.is_null()) throw ParseError(source_name, line_no, "\"raw\" must be a string or null");
  }
  return out;
}

void FetchOptions::validate() const {
  if (concurrency == 0) throw Error("fetch concurrency must be >= 1");
  if (max_attempts == 0) throw Error("fetch max_attempts must be >= 1");
  if (!(backoff_factor >= 1.0) || !std::isfinite(backoff_factor)) throw Error("backoff factor must be >= 1");
  if (initial_backoff.count() < 0) throw Error("initial backoff must be >= 0");
  if (timeout.count() <= 0) throw Error("fetch timeout must be > 0");
}

namespace {

struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;
};

Endpoint split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error("endpoint URL needs a scheme: " + url);
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw Error("unsupported endpoint scheme '" + scheme + "'");
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint e;
  e.base = url.substr(0, path_start);
  e.path = path_start == std::string::npos ? "/" : url.substr(path_start);
  if (e.base.size() == scheme_end + 3) throw Error("endpoint URL has no host: " + url);
  return e;
}

std::unordered_map<std::string, std::string> load_cache(const std::filesystem::path& path) {
  std::unordered_map<std::string, std::string> cache;
  std::ifstream in(path);
  if (!in) return cache;  // first run
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const json j = parse_line(line, path.string(), line_no);
    if (!j.is_object() || !j.contains("prompt_sha256") || !j.contains("label") || !j.at("label").is_string())
      throw ParseError(path.string(), line_no, "expected {\"prompt_sha256\", \"label\"}");
    cache[j.at("prompt_sha256").get<std::string>()] = j.at("label").get<std::string>();
  }
  return cache;
}

struct Attempt {
  std::optional<std::string> label;
  std::string error;
};

Attempt ask(httplib::Client& client, const Endpoint& ep, const std::string& prompt, const FetchOptions& opt,
            std::atomic<std::size_t>& requests) {
  const std::string body = json{{"prompt", prompt}}.dump();
  auto delay = std::chrono::duration<double, std::milli>(opt.initial_backoff);
  std::string last;
  for (std::size_t attempt = 1; attempt <= opt.max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(delay);
      delay *= opt.backoff_factor;
    }
    ++requests;
    auto res = client.Post(ep.path, body, "application/json");
    if (!res) {
      last = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500 || res->status == 429) {
      last = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) return {std::nullopt, "HTTP " + std::to_string(res->status)};
    try {
      const json j = json::parse(res->body);
      if (j.is_object() && j.contains("label") && j.at("label").is_string()) return {j.at("label").get<std::string>(), ""};
    } catch (const json::exception&) {
    }
    return {std::nullopt, "malformed response body"};
  }
  return {std::nullopt, last + " after " + std::to_string(opt.max_attempts) + " attempts"};
}

}  // namespace

FetchOutcome fetch_llm_labels(const std::string& endpoint_url, std::span<const std::string> prompts,
                              const FetchOptions& options) {
  options.validate();
  const Endpoint ep = split_url(endpoint_url);
  FetchOutcome out;
  out.labels.resize(prompts.size());

  std::vector<std::string> hashes(prompts.size());
  std::unordered_map<std::string, std::string> cache;
  if (options.cache) cache = load_cache(*options.cache);
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    hashes[i] = sha256_hex(prompts[i]);
    if (auto it = cache.find(hashes[i]); it != cache.end()) {
      out.labels[i] = it->second;
      ++out.cache_hits;
    } else {
      pending.push_back(i);
    }
  }

  out.errors.resize(prompts.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> requests{0};
  auto worker = [&] {
    httplib::Client client(ep.base);
    const auto t = options.timeout;
    client.set_connection_timeout(t);
    client.set_read_timeout(t);
    client.set_write_timeout(t);
    for (std::size_t k = next++; k < pending.size(); k = next++) {
      const std::size_t i = pending[k];
      Attempt a = ask(client, ep, prompts[i], options, requests);
      out.labels[i] = std::move(a.label);  // each slot written by one worker only
      out.errors[i] = std::move(a.error);
    }
  };
  const std::size_t threads = std::min(options.concurrency, pending.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  out.requests = requests;

  if (options.cache && !pending.empty()) {
    std::ofstream app(*options.cache, std::ios::app);
    if (!app) throw Error("cannot write response cache " + options.cache->string());
    std::unordered_set<std::string> written;
    for (std::size_t i : pending) {
      if (!out.labels[i] || !written.insert(hashes[i]).second) continue;
      app << json{{"prompt_sha256", hashes[i]}, {"label", *out.labels[i]}}.dump() << '\n';
    }
  }
  return out;
}

LlmAnnotations fetch_llm_predictions(const std::string& endpoint_url, std::span<const NodeId> nodes,
                                     std::span<const std::string> prompts, std::size_t n_nodes,
                                     const FetchOptions& options, std::vector<std::string>* warnings) {
  if (nodes.size() != prompts.size()) throw Error("one prompt per node required");
  FetchOutcome got = fetch_llm_labels(endpoint_url, prompts, options);
  LlmAnnotations ann;
  ann.raw.resize(n_nodes);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] >= n_nodes) throw Error("node id " + std::to_string(nodes[i]) + " out of range");
    // A failed request still counts as asked: record it as an empty answer,
    // which parses to unparsed rather than missing.
    ann.raw[nodes[i]] = got.labels[i] ? std::move(*got.labels[i]) : std::string();
  }
  if (warnings) {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (!got.errors[i].empty()) warnings->push_back("endpoint: node " + std::to_string(nodes[i]) + ": " + got.errors[i]);
  }
  return ann;
}

}  // namespace colabel
