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

#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "colabel/error.hpp"
#include "colabel/pipeline.hpp"
#include "colabel/toy_tag.hpp"
#include "temp_dir.hpp"

using namespace colabel;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kArtifacts{"split.json",        "judge.json",     "probs.csv",
                                          "scores.csv",        "selected.json",  "annotations.jsonl",
                                          "partition.json",    "report.json",    "instruct.jsonl",
                                          "prefs.jsonl",       "manifest.json"};

PipelineConfig toy_config(const fs::path& data, const fs::path& out) {
  PipelineConfig c;
  c.graph = data / "graph.tsv";
  c.features = data / "features.csv";
  c.labels = data / "labels.csv";
  c.label_space = data / "label_space.json";
  c.texts = data / "texts.jsonl";
  c.llm_predictions = data / "llm_predictions.jsonl";
  c.shots = 3;
  c.top_k = 150;
  c.tau = 0.7;
  c.seed = 11;
  c.template_name = "cora";
  c.out_dir = out;
  return c;
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

struct ToyData {
  testing::TempDir dir{"pipeline"};
  ToyTag tag = make_toy_tag();
  ToyData() { write_toy_tag(tag, dir / "data"); }
  fs::path data() const { return dir / "data"; }
};

}  // namespace

TEST_CASE("toy TAG end to end") {
  ToyData toy;
  const auto out = toy.dir / "run1";
  const auto t0 = std::chrono::steady_clock::now();
  const RunSummary summary = run_pipeline(toy_config(toy.data(), out));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 60.0);

  for (const auto& a : kArtifacts) CHECK_MESSAGE(fs::exists(out / a), a);
  CHECK_FALSE(fs::exists(out / ".colabel-staging"));

  const auto space = toy.tag.space;
  auto names = space.names();
  auto is_name = [&](const json& v) { return v.is_string() && space.index_of(v.get<std::string>()).has_value(); };

  // Schemas.
  CHECK_NOTHROW(judge_from_json(read_file(out / "judge.json")));
  CHECK(lines(out / "scores.csv").front() == "node_id,log_score,best_source,dist");
  const auto selected = selection_from_json(read_file(out / "selected.json"));
  CHECK(selected.size() == 150);
  const auto part = partition_from_json(read_file(out / "partition.json"));
  CHECK(part.agreed.size() + part.disagreed.size() + part.unparsed.size() == 150);

  const auto instruct = lines(out / "instruct.jsonl");
  const auto prefs = lines(out / "prefs.jsonl");
  CHECK(instruct.size() == part.agreed.size());
  CHECK(prefs.size() == part.filtered.size());
  CHECK_FALSE(prefs.empty());
  for (const auto& l : instruct) {
    auto j = json::parse(l);
    CHECK(j.size() == 2);
    CHECK(j.at("prompt").get<std::string>().rfind("Given a node-centered graph", 0) == 0);
    CHECK(is_name(j.at("completion")));
  }
  for (const auto& l : prefs) {
    auto j = json::parse(l);
    CHECK(j.size() == 3);
    CHECK(is_name(j.at("chosen")));
    CHECK(is_name(j.at("rejected")));
    CHECK(j.at("chosen") != j.at("rejected"));
  }

  const auto manifest = json::parse(read_file(out / "manifest.json"));
  CHECK(manifest["counts"]["instruct"] == instruct.size());
  CHECK(manifest["counts"]["prefs"] == prefs.size());
  CHECK(manifest["counts"]["selected"] == 150);
  CHECK(manifest["seed"] == 11);
  CHECK(manifest["config"].find("out_dir") == manifest["config"].end());
  for (const auto& [name, hash] : manifest["files"].items()) CHECK(sha256_hex(read_file(out / name)) == hash);
  CHECK(manifest["files"].size() == kArtifacts.size() - 1);

  const auto report = json::parse(read_file(out / "report.json"));
  CHECK(report["counts"]["selected"] == 150);
  CHECK(report["accuracy"]["agree_acc"].is_number());
  CHECK(summary.counts.agreed == part.agreed.size());

  SUBCASE("rerun into a fresh directory is byte-identical") {
    const auto out2 = toy.dir / "run2";
    run_pipeline(toy_config(toy.data(), out2));
    for (const auto& a : kArtifacts) CHECK_MESSAGE(read_file(out / a) == read_file(out2 / a), a);
  }
}

TEST_CASE("predictions covering half the selected nodes abort with their ids") {
  ToyData toy;
  const auto full = toy.dir / "full";
  run_pipeline(toy_config(toy.data(), full));
  auto selected = selection_from_json(read_file(full / "selected.json"));
  std::sort(selected.begin(), selected.end());

  // Keep predictions for every node except the second half of the selection.
  std::set<NodeId> dropped(selected.begin() + static_cast<std::ptrdiff_t>(selected.size() / 2), selected.end());
  std::string kept;
  for (const auto& l : lines(toy.data() / "llm_predictions.jsonl")) {
    if (!dropped.count(json::parse(l).at("node_id").get<NodeId>())) kept += l + "\n";
  }
  write_file(toy.dir / "half.jsonl", kept);
  auto cfg = toy_config(toy.data(), toy.dir / "half-out");
  cfg.llm_predictions = toy.dir / "half.jsonl";
  try {
    run_pipeline(cfg);
    FAIL("expected failure");
  } catch (const StageError& e) {
    CHECK(e.stage() == "annotate");
    const std::string msg = e.what();
    CHECK(msg.find("missing predictions for nodes: ") != std::string::npos);
    CHECK(msg.find(std::to_string(*dropped.begin())) != std::string::npos);
    CHECK(msg.find(std::to_string(*dropped.rbegin())) != std::string::npos);
  }
  CHECK_FALSE(fs::exists(toy.dir / "half-out"));
}

TEST_CASE("stage failures leave no partial output") {
  ToyData toy;
  auto cfg = toy_config(toy.data(), toy.dir / "existing");
  fs::create_directories(cfg.out_dir);
  write_file(cfg.out_dir / "keep.txt", "x");
  cfg.features = toy.dir / "nope.csv";
  CHECK_THROWS_WITH_AS(run_pipeline(cfg), doctest::Contains("[load]"), StageError);
  CHECK(fs::exists(cfg.out_dir / "keep.txt"));
  CHECK_FALSE(fs::exists(cfg.out_dir / ".colabel-staging"));
  CHECK_FALSE(fs::exists(cfg.out_dir / "split.json"));

  cfg = toy_config(toy.data(), toy.dir / "bad-shots");
  cfg.shots = 1000;
  CHECK_THROWS_WITH_AS(run_pipeline(cfg), doctest::Contains("[split]"), StageError);

  cfg = toy_config(toy.data(), toy.dir / "both-sources");
  cfg.endpoint = "http://127.0.0.1:1/";
  CHECK_THROWS_WITH_AS(run_pipeline(cfg), doctest::Contains("[config]"), StageError);
}

TEST_CASE("strict mode and missing texts") {
  ToyData toy;
  std::string texts;
  for (const auto& l : lines(toy.data() / "texts.jsonl"))
    if (json::parse(l).at("node_id").get<NodeId>() % 10 != 0) texts += l + "\n";
  write_file(toy.dir / "texts-holes.jsonl", texts);

  auto cfg = toy_config(toy.data(), toy.dir / "lenient");
  cfg.texts = toy.dir / "texts-holes.jsonl";
  auto summary = run_pipeline(cfg);
  bool flagged = false;
  for (const auto& w : summary.warnings) flagged = flagged || w.find("has no text") != std::string::npos;
  CHECK(flagged);
  auto report = json::parse(read_file(cfg.out_dir / "report.json"));
  CHECK_FALSE(report["warnings"].empty());

  cfg.out_dir = toy.dir / "strict";
  cfg.strict = true;
  CHECK_THROWS_WITH_AS(run_pipeline(cfg), doctest::Contains("[emit] strict mode: no text for nodes:"), StageError);
  CHECK_FALSE(fs::exists(cfg.out_dir));
}

TEST_CASE("empty filtered disagreement set gives an empty preference file") {
  ToyData toy;
  auto cfg = toy_config(toy.data(), toy.dir / "tau1");
  cfg.tau = 1.0;
  auto s = run_pipeline(cfg);
  CHECK(s.counts.prefs == 0);
  CHECK(read_file(cfg.out_dir / "prefs.jsonl").empty());
  CHECK(json::parse(read_file(cfg.out_dir / "manifest.json"))["counts"]["prefs"] == 0);
}

TEST_CASE("config hash tracks every field except out_dir") {
  auto base = toy_config("d", "out");
  const auto h = base.hash();
  auto other = base;
  other.out_dir = "elsewhere";
  CHECK(other.hash() == h);

  std::vector<std::function<void(PipelineConfig&)>> edits{
      [](auto& c) { c.graph = "g2"; },          [](auto& c) { c.shots = 4; },
      [](auto& c) { c.seed = 12; },             [](auto& c) { c.top_k = 151; },
      [](auto& c) { c.tau = 0.71; },            [](auto& c) { c.lambda = 0.2; },
      [](auto& c) { c.judge.hops = 3; },        [](auto& c) { c.judge.learning_rate = 0.1; },
      [](auto& c) { c.val_size = 10; },         [](auto& c) { c.subgraph_hops = 2; },
      [](auto& c) { c.template_name = "generic"; },
      [](auto& c) { c.strict = true; },
      [](auto& c) {
        c.llm_predictions.reset();
        c.endpoint = "http://x/";
      },
  };
  std::set<std::string> seen{h};
  for (auto& edit : edits) {
    auto c = base;
    edit(c);
    CHECK(seen.insert(c.hash()).second);
  }
}

TEST_CASE("COLABEL_SEED overrides the seed") {
  PipelineConfig c;
  c.seed = 1;
  ::unsetenv("COLABEL_SEED");
  apply_seed_override(c);
  CHECK(c.seed == 1);
  ::setenv("COLABEL_SEED", "987", 1);
  apply_seed_override(c);
  CHECK(c.seed == 987);
  ::setenv("COLABEL_SEED", "12abc", 1);
  CHECK_THROWS_AS(apply_seed_override(c), Error);
  ::unsetenv("COLABEL_SEED");
}

TEST_CASE("subgraph hops restricts the candidate pool") {
  ToyData toy;
  auto cfg = toy_config(toy.data(), toy.dir / "hop1");
  cfg.subgraph_hops = 1;
  cfg.top_k = 300;
  auto s = run_pipeline(cfg);
  auto cfg_all = toy_config(toy.data(), toy.dir / "all");
  cfg_all.top_k = 300;
  auto all = run_pipeline(cfg_all);
  CHECK(s.counts.selected < all.counts.selected);
  CHECK(s.counts.selected > 0);
}

TEST_CASE("endpoint mode with response cache reruns identically") {
  ToyData toy;
  std::map<std::string, std::string> answer;  // prompt -> raw label
  {
    // Map prompts to the bundled keyword answers so the endpoint is scripted.
    PipelineConfig c = toy_config(toy.data(), "unused");
    auto in = load_inputs(c);
    for (NodeId v = 0; v < in.graph.num_nodes(); ++v)
      answer[render_prompt(in.prompt, in.texts.texts[v], in.space)] = toy.tag.llm_raw[v];
  }
  httplib::Server server;
  std::atomic<int> hits{0};
  server.Post("/classify", [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    auto prompt = json::parse(req.body).at("prompt").get<std::string>();
    auto it = answer.find(prompt);
    res.set_content(json{{"label", it == answer.end() ? "banana" : it->second}}.dump(), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  auto cfg = toy_config(toy.data(), toy.dir / "ep1");
  cfg.llm_predictions.reset();
  cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/classify";
  cfg.fetch.cache = toy.dir / "replay.jsonl";
  run_pipeline(cfg);
  const int first_hits = hits;
  CHECK(first_hits == 150);

  auto file_cfg = toy_config(toy.data(), toy.dir / "file");
  run_pipeline(file_cfg);
  // Same raw answers, so the same partition as the predictions-file run.
  CHECK(read_file(toy.dir / "ep1" / "partition.json") == read_file(toy.dir / "file" / "partition.json"));

  server.stop();
  th.join();
  cfg.out_dir = toy.dir / "ep2";
  run_pipeline(cfg);  // replayed from the cache; the server is gone
  for (const auto& a : kArtifacts)
    CHECK_MESSAGE(read_file(toy.dir / "ep1" / a) == read_file(toy.dir / "ep2" / a), a);
}
