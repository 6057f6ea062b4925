// Copyright 2026 The Diebolds Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "diebolds/pipeline.h"

#include <fcntl.h>
#include <openssl/evp.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace diebolds {
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr std::array<std::pair<Mode, std::string_view>, 7> kModeNames = {{
    {Mode::kDS1, "DS1"},
    {Mode::kDS2, "DS2"},
    {Mode::kDSL, "DS+L"},
    {Mode::kDieboldsSN, "DIEBOLDS-SN"},
    {Mode::kDieboldsS, "DIEBOLDS-S"},
    {Mode::kDieboldsN, "DIEBOLDS-N"},
    {Mode::kDiebolds, "DIEBOLDS"},
}};

constexpr std::array<std::string_view, 9> kStageNames = {
    "ingest", "seeds",   "graph",   "propagate", "select",
    "featurize", "train", "extract", "evaluate"};

std::vector<Stage> upstream_of(Stage stage) {
  switch (stage) {
    case Stage::kIngest: return {};
    case Stage::kSeeds: return {Stage::kIngest};
    case Stage::kGraph: return {Stage::kIngest};
    case Stage::kPropagate: return {Stage::kGraph, Stage::kSeeds};
    case Stage::kSelect: return {Stage::kIngest, Stage::kSeeds, Stage::kPropagate};
    case Stage::kFeaturize: return {Stage::kIngest, Stage::kSelect};
    case Stage::kTrain: return {Stage::kSelect, Stage::kFeaturize};
    case Stage::kExtract: return {Stage::kIngest, Stage::kFeaturize, Stage::kTrain};
    case Stage::kEvaluate: return {Stage::kIngest, Stage::kExtract};
  }
  return {};
}

std::string resolve_path(const std::string &base, const std::string &p) {
  if (p.empty() || base.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base) / p).lexically_normal().string();
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes through a temporary file so readers never see partial output.
void write_file(const std::string &path, const std::string &content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw Error("cannot write '" + path + "'");
  }
  fs::rename(tmp, path);
}

std::string digest_or_empty(const std::string &path) {
  return path.empty() ? "" : file_sha256(path);
}

// ---------------------------------------------------------------------------
// Shared stage helpers.

std::string stage_dir(const PipelineConfig &c, Stage s) {
  return (fs::path(c.out_dir) / std::string(stage_name(s))).string();
}

std::string artifact(const PipelineConfig &c, Stage s, const std::string &file) {
  return (fs::path(stage_dir(c, s)) / file).string();
}

struct Inputs {
  Corpus target;
  Corpus structured;
};

Inputs load_ingested(const PipelineConfig &c) {
  Inputs in;
  in.target = load_corpus(artifact(c, Stage::kIngest, "target.jsonl"), CorpusKind::kTarget);
  in.structured =
      load_corpus(artifact(c, Stage::kIngest, "structured.jsonl"), CorpusKind::kStructured);
  return in;
}

// IDF statistics over every distinct name: subjects and NP strings.
TokenStats name_stats(const Corpus &target, const Corpus &structured) {
  std::set<std::string> names;
  for (const Corpus *corpus : {&target, &structured}) {
    for (const Document &doc : corpus->documents) {
      names.insert(to_lower(doc.subject));
      for (const Sentence &s : doc.sentences) {
        for (const Mention &m : chunk_nps(s)) names.insert(m.normalized);
      }
    }
  }
  return TokenStats::from_strings({names.begin(), names.end()});
}

std::vector<Seed> read_seed_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read '" + path + "'");
  return parse_seeds(in);
}

void save_seeds(const std::string &path, const std::vector<Seed> &seeds) {
  std::ostringstream out;
  write_seeds(out, seeds);
  write_file(path, out.str());
}

PropGraph load_graph(const PipelineConfig &c) {
  std::ifstream nodes(artifact(c, Stage::kGraph, "nodes.tsv"));
  std::ifstream edges(artifact(c, Stage::kGraph, "edges.tsv"));
  std::ifstream aliases(artifact(c, Stage::kGraph, "aliases.tsv"));
  if (!nodes || !edges || !aliases) throw Error("graph artifacts are incomplete");
  return read_graph(nodes, edges, aliases);
}

SectionMap section_map_for(const PipelineConfig &c) {
  return c.section_map_path.empty() ? default_section_map()
                                    : load_section_map(c.section_map_path);
}

PropGraph build_graph(const PipelineConfig &c, const Inputs &in,
                      const TokenStats &stats, json &report) {
  PropGraph target = build_bipartite(in.target);
  PropGraph g;
  if (c.edges.use_structured_lists) {
    g = merge_matching_nodes(target, build_bipartite(in.structured), stats);
  } else {
    g = merge_matching_nodes(target, stats);
  }
  if (c.edges.use_S) {
    SectionEdgeReport r =
        add_section_edges(g, in.structured, section_map_for(c), stats, c.section_cap);
    report["section_edges"] = {{"added", r.added},
                               {"cross_document", r.cross_document},
                               {"within_document", r.within_document},
                               {"skipped_sections", r.skipped_sections}};
  }
  if (c.edges.use_N) {
    auto contexts = build_contexts(g, {&in.target, &in.structured});
    report["neighbor_edges"] =
        add_neighbor_edges(g, contexts, c.neighbor_min_sim, c.neighbor_cap);
  }
  g.canonicalize();
  report["nodes"] = g.size();
  report["edges"] = {{"L", g.edge_count(EdgeType::kL)},
                     {"S", g.edge_count(EdgeType::kS)},
                     {"N", g.edge_count(EdgeType::kN)}};
  return g;
}

// Classification units: every list, or every NP as a singleton, keyed by
// "corpus|doc_id|sentence|l<ordinal>" or "...|m<ordinal>".
struct Unit {
  const Document *doc = nullptr;
  const Sentence *sentence = nullptr;
  CoordList list;
};

std::string unit_key(CorpusKind kind, const std::string &doc_id, int sentence,
                     bool mention, int ordinal) {
  return std::string(corpus_kind_name(kind)) + "|" + doc_id + "|" +
         std::to_string(sentence) + "|" + (mention ? "m" : "l") +
         std::to_string(ordinal);
}

std::map<std::string, Unit> index_units(const Corpus &corpus, bool mentions) {
  std::map<std::string, Unit> out;
  for (const SentenceLists &sl : extract_corpus_lists(corpus, mentions)) {
    const Document &doc = corpus.documents[sl.ref.document];
    for (size_t k = 0; k < sl.lists.size(); ++k) {
      Unit u{&doc, &doc.sentences[sl.ref.sentence], sl.lists[k]};
      out.emplace(unit_key(corpus.kind, doc.doc_id, sl.ref.sentence, mentions,
                           static_cast<int>(k)),
                  std::move(u));
    }
  }
  return out;
}

std::string list_node_key(const NodeId &id) {
  return unit_key(id.list.corpus, id.list.doc_id, id.list.sentence, false,
                  id.list.ordinal);
}

// Selected training units: (key, relation name or "pool").
using Selection = std::vector<std::pair<std::string, std::string>>;
constexpr std::string_view kPoolLabel = "pool";

Selection select_from_scores(const ScoreTable &scores, int n,
                             std::optional<CorpusKind> corpus) {
  Selection out;
  const auto labels = assign_labels(scores);
  std::set<int> chosen;
  for (Relation r : scores.classes) {
    for (int i : top_n(scores, r, n, corpus)) {
      if (labels[i] != r) continue;
      out.push_back({list_node_key(scores.nodes[i]), std::string(relation_name(r))});
      chosen.insert(i);
    }
  }
  std::vector<std::string> pool;
  for (size_t i = 0; i < scores.nodes.size(); ++i) {
    const NodeId &id = scores.nodes[i];
    if (id.kind != NodeKind::kList || chosen.count(static_cast<int>(i)) ||
        (corpus && id.list.corpus != *corpus)) {
      continue;
    }
    pool.push_back(list_node_key(scores.nodes[i]));
  }
  std::sort(pool.begin(), pool.end());
  for (std::string &k : pool) out.push_back({std::move(k), std::string(kPoolLabel)});
  return out;
}

std::optional<CorpusKind> training_corpus(const PipelineConfig &c) {
  if (c.train_on_structured) return std::nullopt;
  return CorpusKind::kTarget;
}

Selection select_distant(const Inputs &in, bool with_structured,
                         const std::vector<Seed> &seeds) {
  std::map<PairKey, std::set<Relation>> labels;
  for (const Seed &s : seeds) labels[s.node].insert(s.relation);
  Selection positives, pool;
  std::vector<const Corpus *> corpora{&in.target};
  if (with_structured) corpora.push_back(&in.structured);
  for (const Corpus *corpus : corpora) {
    for (const auto &[key, unit] : index_units(*corpus, true)) {
      const Mention &m = unit.list.items.front();
      if (is_self_mention(*unit.doc, m)) continue;
      auto it = labels.find({to_lower(unit.doc->subject), m.normalized});
      if (it == labels.end()) {
        pool.push_back({key, std::string(kPoolLabel)});
        continue;
      }
      for (Relation r : it->second) positives.push_back({key, std::string(relation_name(r))});
    }
  }
  std::stable_sort(positives.begin(), positives.end(),
                   [](const auto &a, const auto &b) { return a.second < b.second; });
  positives.insert(positives.end(), pool.begin(), pool.end());
  return positives;
}

std::string selection_text(const Selection &sel) {
  std::ostringstream out;
  for (const auto &[key, label] : sel) out << key << '\t' << label << '\n';
  return out.str();
}

Selection parse_selection(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read '" + path + "'");
  Selection out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cols = split(line, '\t');
    if (cols.size() != 2) throw Error(path + ": malformed selection line");
    out.push_back({cols[0], cols[1]});
  }
  return out;
}

struct Featurized {
  FeatureFilter filter;
  std::vector<std::pair<std::string, FeatureVector>> vectors;  // key, filtered
};

Featurized featurize_selection(const Selection &sel,
                               const std::map<std::string, Unit> &units,
                               int window, double drop_top_fraction) {
  std::vector<FeatureVector> raw;
  raw.reserve(sel.size());
  for (const auto &[key, label] : sel) {
    auto it = units.find(key);
    if (it == units.end()) throw Error("selected unit '" + key + "' not found in corpus");
    raw.push_back(featurize(it->second.list, *it->second.sentence, window));
  }
  Featurized out;
  if (raw.empty()) throw Error("no training units were selected");
  out.filter = fit_filter(raw, drop_top_fraction);
  for (size_t i = 0; i < sel.size(); ++i) {
    out.vectors.push_back({sel[i].first, apply_filter(out.filter, raw[i])});
  }
  return out;
}

std::map<std::string, Unit> all_units(const Inputs &in, bool mentions) {
  std::map<std::string, Unit> units = index_units(in.target, mentions);
  units.merge(index_units(in.structured, mentions));
  return units;
}

std::vector<LinearModel> train_models(const Selection &sel,
                                      const std::vector<FeatureVector> &vectors,
                                      const TrainOptions &options) {
  std::map<Relation, std::vector<std::pair<std::string, FeatureVector>>> positives;
  std::vector<std::pair<std::string, FeatureVector>> pool;
  for (size_t i = 0; i < sel.size(); ++i) {
    if (sel[i].second == kPoolLabel) {
      pool.push_back({sel[i].first, vectors[i]});
      continue;
    }
    auto r = parse_relation(sel[i].second);
    if (!r) throw Error("unknown label '" + sel[i].second + "' in selection");
    positives[*r].push_back({sel[i].first, vectors[i]});
  }
  if (positives.empty()) throw Error("no positive training units were selected");
  return train(build_training_set(positives, pool, options.rng_seed), options);
}

json ir_json(const IrReport &r) {
  json per_query = json::array();
  for (const QueryResult &q : r.queries) {
    per_query.push_back({{"subject", q.subject},
                         {"relation", relation_name(q.relation)},
                         {"predicted", q.predicted},
                         {"gold", q.gold},
                         {"matched", q.matched},
                         {"precision", q.precision},
                         {"recall", q.recall},
                         {"f1", q.f1}});
  }
  return {{"queries", r.queries.size()},
          {"micro", {{"precision", r.precision}, {"recall", r.recall}, {"f1", r.f1}}},
          {"macro",
           {{"precision", r.macro_precision},
            {"recall", r.macro_recall},
            {"f1", r.macro_f1}}},
          {"interpolated_precision", r.interpolated_precision},
          {"per_query", per_query}};
}

json qa_json(const QaReport &r) {
  return {{"questions", r.questions},
          {"mrr", r.mrr},
          {"map", r.map},
          {"recall", r.recall},
          {"micro_recall", r.micro_recall}};
}

// ---------------------------------------------------------------------------
// Stage bodies. Each returns the list of files it wrote (relative names).

using Fingerprint = json;

Fingerprint fingerprint(const PipelineConfig &c, Stage stage) {
  const EdgeToggles &e = c.edges;
  switch (stage) {
    case Stage::kIngest:
      return {{"target", digest_or_empty(c.target_path)},
              {"structured", digest_or_empty(c.structured_path)}};
    case Stage::kSeeds:
      return {{"kb", file_sha256(c.kb_path)},
              {"seed_ratio", c.seed_ratio},
              {"rng_seed", c.rng_seed},
              {"structured_seeds", c.structured_seeds}};
    case Stage::kGraph:
      return {{"propagate", e.propagate},
              {"use_S", e.use_S},
              {"use_N", e.use_N},
              {"use_structured_lists", e.use_structured_lists},
              {"section_map", digest_or_empty(c.section_map_path)},
              {"neighbor_min_sim", c.neighbor_min_sim},
              {"neighbor_cap", c.neighbor_cap},
              {"section_cap", c.section_cap}};
    case Stage::kPropagate:
      return {{"propagate", e.propagate},
              {"alpha", c.prop.alpha},
              {"tol", c.prop.tol},
              {"max_iter", c.prop.max_iter}};
    case Stage::kSelect:
      return {{"mode", mode_name(c.mode)},
              {"top_n", c.top_n},
              {"train_on_structured", c.train_on_structured}};
    case Stage::kFeaturize:
      return {{"window", c.window}, {"drop_top_fraction", c.drop_top_fraction}};
    case Stage::kTrain:
      return {{"reg_lambda", c.train.reg_lambda},
              {"epochs", c.train.epochs},
              {"holdout_fraction", c.train.holdout_fraction},
              {"rng_seed", c.rng_seed}};
    case Stage::kExtract:
      return {{"mentions_only", !e.propagate}, {"window", c.window}};
    case Stage::kEvaluate:
      return {{"gold", digest_or_empty(c.gold_path)},
              {"qa_queries", digest_or_empty(c.qa_queries_path)},
              {"qa_answers", digest_or_empty(c.qa_answers_path)}};
  }
  return {};
}

std::vector<std::string> run_body(const PipelineConfig &c, Stage stage) {
  const std::string dir = stage_dir(c, stage);
  auto out = [&](const std::string &f) { return (fs::path(dir) / f).string(); };
  switch (stage) {
    case Stage::kIngest: {
      Corpus target = load_corpus(c.target_path, CorpusKind::kTarget);
      Corpus structured;
      structured.kind = CorpusKind::kStructured;
      if (!c.structured_path.empty()) {
        structured = load_corpus(c.structured_path, CorpusKind::kStructured);
      }
      save_corpus(out("target.jsonl"), target);
      save_corpus(out("structured.jsonl"), structured);
      return {"target.jsonl", "structured.jsonl"};
    }
    case Stage::kSeeds: {
      Inputs in = load_ingested(c);
      const TokenStats stats = name_stats(in.target, in.structured);
      const std::vector<Triple> kb = load_triples(c.kb_path);
      std::vector<Seed> seeds = generate_seeds(kb, in.target, stats);
      if (c.structured_seeds) {
        std::vector<Seed> more = generate_seeds(kb, in.structured, stats);
        seeds.insert(seeds.end(), more.begin(), more.end());
        std::sort(seeds.begin(), seeds.end());
        seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
      }
      if (seeds.empty()) throw Error("no KB triple matched the target corpus");
      SeedSplit split = split_seeds(seeds, c.seed_ratio, c.rng_seed);
      save_seeds(out("all.tsv"), seeds);
      save_seeds(out("development.tsv"), split.development);
      save_seeds(out("validation.tsv"), split.validation);
      return {"all.tsv", "development.tsv", "validation.tsv"};
    }
    case Stage::kGraph: {
      if (!c.edges.propagate) return {};
      Inputs in = load_ingested(c);
      json report;
      PropGraph g = build_graph(c, in, name_stats(in.target, in.structured), report);
      std::ostringstream nodes, edges, aliases;
      write_graph(g, nodes, edges, aliases);
      write_file(out("nodes.tsv"), nodes.str());
      write_file(out("edges.tsv"), edges.str());
      write_file(out("aliases.tsv"), aliases.str());
      write_file(out("report.json"), report.dump(2) + "\n");
      return {"nodes.tsv", "edges.tsv", "aliases.tsv", "report.json"};
    }
    case Stage::kPropagate: {
      if (!c.edges.propagate) return {};
      PropGraph g = load_graph(c);
      auto seeds = read_seed_file(artifact(c, Stage::kSeeds, "development.tsv"));
      ScoreTable scores = mrw(g, make_seed_vectors(g, seeds), c.prop);
      std::ostringstream s;
      write_scores(s, scores);
      write_file(out("scores.tsv"), s.str());
      return {"scores.tsv"};
    }
    case Stage::kSelect: {
      Selection sel;
      if (c.edges.propagate) {
        PropGraph g = load_graph(c);
        std::ifstream in(artifact(c, Stage::kPropagate, "scores.tsv"));
        if (!in) throw Error("propagation scores are missing; run 'propagate'");
        sel = select_from_scores(read_scores(in, g), c.top_n, training_corpus(c));
      } else {
        Inputs in = load_ingested(c);
        auto seeds = read_seed_file(artifact(c, Stage::kSeeds, "development.tsv"));
        sel = select_distant(in, c.mode == Mode::kDS2, seeds);
      }
      write_file(out("units.tsv"), selection_text(sel));
      return {"units.tsv"};
    }
    case Stage::kFeaturize: {
      Inputs in = load_ingested(c);
      Selection sel = parse_selection(artifact(c, Stage::kSelect, "units.tsv"));
      // Unit keys carry their kind, so both indexes can be searched.
      std::map<std::string, Unit> units = all_units(in, false);
      units.merge(all_units(in, true));
      Featurized f = featurize_selection(sel, units, c.window, c.drop_top_fraction);
      std::ostringstream filter, vectors;
      write_filter(filter, f.filter);
      for (const auto &[key, v] : f.vectors) write_sparse(vectors, key, v);
      write_file(out("filter.tsv"), filter.str());
      write_file(out("vectors.svm"), vectors.str());
      return {"filter.tsv", "vectors.svm"};
    }
    case Stage::kTrain: {
      Selection sel = parse_selection(artifact(c, Stage::kSelect, "units.tsv"));
      std::ifstream in(artifact(c, Stage::kFeaturize, "vectors.svm"));
      std::vector<FeatureVector> vectors;
      std::string line;
      while (std::getline(in, line)) vectors.push_back(parse_sparse(line).second);
      if (vectors.size() != sel.size()) {
        throw Error("featurized vectors do not line up with the selection; rerun 'featurize'");
      }
      TrainOptions options = c.train;
      options.rng_seed = c.rng_seed;
      std::ostringstream models;
      write_models(models, train_models(sel, vectors, options));
      write_file(out("models.tsv"), models.str());
      return {"models.tsv"};
    }
    case Stage::kExtract: {
      Inputs in = load_ingested(c);
      std::ifstream mf(artifact(c, Stage::kTrain, "models.tsv"));
      std::ifstream ff(artifact(c, Stage::kFeaturize, "filter.tsv"));
      auto models = read_models(mf);
      FeatureFilter filter = read_filter(ff);
      TripleStore store =
          extract_triples(models, in.target, filter, c.window, !c.edges.propagate);
      std::ostringstream s;
      write_triple_store(s, store);
      write_file(out("triples.tsv"), s.str());
      return {"triples.tsv"};
    }
    case Stage::kEvaluate: {
      Inputs in = load_ingested(c);
      std::ifstream tf(artifact(c, Stage::kExtract, "triples.tsv"));
      TripleStore store = read_triple_store(tf);
      json report = {{"mode", mode_name(c.mode)}, {"triples", store.size()}};
      std::vector<std::string> files{"report.json"};
      if (!c.gold_path.empty()) {
        IrReport ir = ir_eval(store, load_gold(c.gold_path),
                              name_stats(in.target, in.structured));
        report["ir"] = ir_json(ir);
        std::ostringstream csv;
        csv << "recall,precision\n";
        for (int i = 0; i <= 10; ++i) {
          csv << format_double(i / 10.0) << ','
              << format_double(ir.interpolated_precision[i]) << '\n';
        }
        write_file(out("pr_curve.csv"), csv.str());
        files.push_back("pr_curve.csv");
      }
      if (!c.qa_queries_path.empty() && !c.qa_answers_path.empty()) {
        std::map<std::string, std::vector<std::string>> answers;
        for (const ConjunctiveQuery &q : load_queries(c.qa_queries_path)) {
          auto &ranked = answers[q.id];
          for (const Answer &a : answer_query(q, store)) ranked.push_back(a.value);
        }
        report["qa"] = qa_json(qa_eval(answers, load_qa_gold(c.qa_answers_path)));
      }
      write_file(out("report.json"), report.dump(2) + "\n");
      return files;
    }
  }
  return {};
}

StageArtifact run_stage_unlocked(const PipelineConfig &c, Stage stage, bool force) {
  const std::string name(stage_name(stage));
  const std::string dir = stage_dir(c, stage);
  json inputs;
  inputs["config"] = fingerprint(c, stage);
  for (Stage up : upstream_of(stage)) {
    const std::string manifest = artifact(c, up, "manifest.json");
    if (!fs::exists(manifest)) {
      throw Error("stage '" + name + "' needs the output of stage '" +
                  std::string(stage_name(up)) + "'; run '" +
                  std::string(stage_name(up)) + "' first");
    }
    inputs["upstream"][std::string(stage_name(up))] =
        json::parse(read_file(manifest)).at("digest");
  }
  const std::string inputs_digest = sha256_hex(inputs.dump());
  const std::string manifest_path = artifact(c, stage, "manifest.json");

  if (!force && fs::exists(manifest_path)) {
    json old = json::parse(read_file(manifest_path));
    bool intact = old.value("inputs_digest", "") == inputs_digest;
    for (const auto &[file, digest] : old["outputs"].items()) {
      if (!intact) break;
      const std::string p = (fs::path(dir) / file).string();
      intact = fs::exists(p) && file_sha256(p) == digest.get<std::string>();
    }
    if (intact) return {name, old.at("digest").get<std::string>(), dir, true};
  }

  fs::create_directories(dir);
  fs::remove(manifest_path);
  std::vector<std::string> files = run_body(c, stage);
  json outputs = json::object();
  std::string all;
  for (const std::string &f : files) {
    const std::string d = file_sha256((fs::path(dir) / f).string());
    outputs[f] = d;
    all += f + ":" + d + "\n";
  }
  json manifest = {{"stage", name},
                   {"inputs", inputs},
                   {"inputs_digest", inputs_digest},
                   {"outputs", outputs},
                   {"skipped_by_mode", files.empty()},
                   {"digest", sha256_hex(all + inputs_digest)}};
  write_file(manifest_path, manifest.dump(2) + "\n");
  return {name, manifest["digest"].get<std::string>(), dir, false};
}

double get_number(const json &j, const char *key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw Error(std::string("config field '") + key + "' must be a number");
  return j[key].get<double>();
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view mode_name(Mode mode) {
  for (const auto &[m, name] : kModeNames) {
    if (m == mode) return name;
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view name) {
  for (const auto &[m, n] : kModeNames) {
    if (n == name) return m;
  }
  return std::nullopt;
}

EdgeToggles toggles_for(Mode mode) {
  switch (mode) {
    case Mode::kDS1: return {false, false, false, false};
    case Mode::kDS2: return {false, false, false, true};
    case Mode::kDSL: return {true, false, false, false};
    case Mode::kDieboldsSN: return {true, false, false, true};
    case Mode::kDieboldsS: return {true, false, true, true};
    case Mode::kDieboldsN: return {true, true, false, true};
    case Mode::kDiebolds: return {true, true, true, true};
  }
  return {};
}

void PipelineConfig::set_mode(Mode m) {
  mode = m;
  edges = toggles_for(m);
}

void PipelineConfig::validate() const {
  if (edges != toggles_for(mode)) {
    throw Error("edge toggles disagree with mode " + std::string(mode_name(mode)));
  }
  if (target_path.empty()) throw Error("config: target corpus path is required");
  if (kb_path.empty()) throw Error("config: kb path is required");
  if (out_dir.empty()) throw Error("config: output directory is required");
  if (edges.use_structured_lists && structured_path.empty()) {
    throw Error("config: mode " + std::string(mode_name(mode)) +
                " needs a structured corpus");
  }
  if (top_n < 1) throw Error("config: top_n must be positive");
  if (!(seed_ratio > 0 && seed_ratio < 1)) throw Error("config: seed_ratio must lie in (0,1)");
  if (window < 0) throw Error("config: window must be non-negative");
  if (!(drop_top_fraction >= 0 && drop_top_fraction < 1)) {
    throw Error("config: drop_top_fraction must lie in [0,1)");
  }
  if (!(neighbor_min_sim > 0 && neighbor_min_sim <= 1)) {
    throw Error("config: neighbor min_sim must lie in (0,1]");
  }
  if (neighbor_cap < 1 || section_cap < 1) throw Error("config: caps must be positive");
  prop.validate();
}

PipelineConfig parse_config(const std::string &json_text, const std::string &base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception &e) {
    throw Error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error("config must be a JSON object");
  static const std::set<std::string> known = {
      "target", "structured", "kb", "section_map", "gold", "qa_queries",
      "qa_answers", "mode", "edges", "structured_seeds", "train_on_structured", "propagation", "top_n",
      "seed_ratio", "rng_seed", "out", "neighbor", "section_cap", "features",
      "train"};
  for (const auto &[key, value] : j.items()) {
    if (!known.count(key)) throw Error("config: unknown field '" + key + "'");
  }
  PipelineConfig c;
  auto str = [&](const char *key) {
    if (!j.contains(key)) return std::string();
    if (!j[key].is_string()) throw Error(std::string("config field '") + key + "' must be a string");
    return resolve_path(base_dir, j[key].get<std::string>());
  };
  c.target_path = str("target");
  c.structured_path = str("structured");
  c.kb_path = str("kb");
  c.section_map_path = str("section_map");
  c.gold_path = str("gold");
  c.qa_queries_path = str("qa_queries");
  c.qa_answers_path = str("qa_answers");
  if (j.contains("out")) c.out_dir = str("out");
  if (j.contains("mode")) {
    auto m = parse_mode(j["mode"].get<std::string>());
    if (!m) throw Error("config: unknown mode '" + j["mode"].get<std::string>() + "'");
    c.set_mode(*m);
  }
  if (j.contains("edges")) {
    const json &e = j["edges"];
    c.edges.use_S = e.value("use_S", c.edges.use_S);
    c.edges.use_N = e.value("use_N", c.edges.use_N);
    c.edges.use_structured_lists =
        e.value("use_structured_lists", c.edges.use_structured_lists);
  }
  c.structured_seeds = j.value("structured_seeds", false);
  c.train_on_structured = j.value("train_on_structured", false);
  if (j.contains("propagation")) {
    const json &p = j["propagation"];
    c.prop.alpha = get_number(p, "alpha", c.prop.alpha);
    c.prop.tol = get_number(p, "tol", c.prop.tol);
    c.prop.max_iter = static_cast<int>(get_number(p, "max_iter", c.prop.max_iter));
  }
  c.top_n = static_cast<int>(get_number(j, "top_n", c.top_n));
  c.seed_ratio = get_number(j, "seed_ratio", c.seed_ratio);
  if (j.contains("rng_seed")) c.rng_seed = j["rng_seed"].get<uint64_t>();
  if (j.contains("neighbor")) {
    c.neighbor_min_sim = get_number(j["neighbor"], "min_sim", c.neighbor_min_sim);
    c.neighbor_cap = static_cast<int>(get_number(j["neighbor"], "cap", c.neighbor_cap));
  }
  c.section_cap = static_cast<int>(get_number(j, "section_cap", c.section_cap));
  if (j.contains("features")) {
    c.window = static_cast<int>(get_number(j["features"], "window", c.window));
    c.drop_top_fraction =
        get_number(j["features"], "drop_top_fraction", c.drop_top_fraction);
  }
  if (j.contains("train")) {
    const json &t = j["train"];
    c.train.reg_lambda = get_number(t, "reg_lambda", c.train.reg_lambda);
    c.train.epochs = static_cast<int>(get_number(t, "epochs", c.train.epochs));
    c.train.holdout_fraction = get_number(t, "holdout_fraction", c.train.holdout_fraction);
  }
  c.validate();
  return c;
}

PipelineConfig load_config(const std::string &path) {
  return parse_config(read_file(path), fs::path(path).parent_path().string());
}

std::string config_to_json(const PipelineConfig &c) {
  json j = {{"target", c.target_path},
            {"structured", c.structured_path},
            {"kb", c.kb_path},
            {"section_map", c.section_map_path},
            {"gold", c.gold_path},
            {"qa_queries", c.qa_queries_path},
            {"qa_answers", c.qa_answers_path},
            {"mode", mode_name(c.mode)},
            {"edges",
             {{"use_S", c.edges.use_S},
              {"use_N", c.edges.use_N},
              {"use_structured_lists", c.edges.use_structured_lists}}},
            {"structured_seeds", c.structured_seeds},
            {"train_on_structured", c.train_on_structured},
            {"propagation",
             {{"alpha", c.prop.alpha}, {"tol", c.prop.tol}, {"max_iter", c.prop.max_iter}}},
            {"top_n", c.top_n},
            {"seed_ratio", c.seed_ratio},
            {"rng_seed", c.rng_seed},
            {"out", c.out_dir},
            {"neighbor", {{"min_sim", c.neighbor_min_sim}, {"cap", c.neighbor_cap}}},
            {"section_cap", c.section_cap},
            {"features",
             {{"window", c.window}, {"drop_top_fraction", c.drop_top_fraction}}},
            {"train",
             {{"reg_lambda", c.train.reg_lambda},
              {"epochs", c.train.epochs},
              {"holdout_fraction", c.train.holdout_fraction}}}};
  return j.dump(2);
}

std::string_view stage_name(Stage stage) {
  return kStageNames[static_cast<size_t>(stage)];
}

std::optional<Stage> parse_stage(std::string_view name) {
  for (size_t i = 0; i < kStageNames.size(); ++i) {
    if (kStageNames[i] == name) return static_cast<Stage>(i);
  }
  return std::nullopt;
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static const char *hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string file_sha256(const std::string &path) { return sha256_hex(read_file(path)); }

PipelineLock::PipelineLock(const std::string &out_dir) {
  fs::create_directories(out_dir);
  path_ = (fs::path(out_dir) / ".lock").string();
  int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    const int err = errno;
    std::string p = path_;
    path_.clear();
    if (err == EEXIST) {
      throw Error("output directory '" + out_dir +
                  "' is in use by another run; remove " + p + " if it is stale");
    }
    throw Error("cannot create lock " + p + ": " + std::strerror(err));
  }
  const std::string pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
  ::close(fd);
}

PipelineLock::~PipelineLock() {
  if (!path_.empty()) {
    std::error_code ec;
    fs::remove(path_, ec);
  }
}

StageArtifact run_stage(const PipelineConfig &config, Stage stage, bool force) {
  config.validate();
  PipelineLock lock(config.out_dir);
  return run_stage_unlocked(config, stage, force);
}

std::vector<StageArtifact> run_all(const PipelineConfig &config, bool force) {
  config.validate();
  PipelineLock lock(config.out_dir);
  std::vector<StageArtifact> out;
  for (Stage s : kAllStages) out.push_back(run_stage_unlocked(config, s, force));
  return out;
}

EvalSummary read_eval_summary(const std::string &out_dir) {
  const std::string path = (fs::path(out_dir) / "evaluate" / "report.json").string();
  json j = json::parse(read_file(path));
  EvalSummary s;
  s.runs = 1;
  if (j.contains("ir")) {
    const json &ir = j["ir"];
    s.precision = ir["micro"]["precision"];
    s.recall = ir["micro"]["recall"];
    s.f1 = ir["micro"]["f1"];
    s.macro_precision = ir["macro"]["precision"];
    s.macro_recall = ir["macro"]["recall"];
    s.macro_f1 = ir["macro"]["f1"];
    for (int i = 0; i <= 10; ++i) s.interpolated_precision[i] = ir["interpolated_precision"][i];
  }
  if (j.contains("qa")) {
    const json &qa = j["qa"];
    QaReport r;
    r.questions = qa["questions"];
    r.mrr = qa["mrr"];
    r.map = qa["map"];
    r.recall = qa["recall"];
    r.micro_recall = qa["micro_recall"];
    s.qa = r;
  }
  return s;
}

std::string summary_to_json(const EvalSummary &s) {
  json j = {{"runs", s.runs},
            {"micro", {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}}},
            {"macro",
             {{"precision", s.macro_precision},
              {"recall", s.macro_recall},
              {"f1", s.macro_f1}}},
            {"interpolated_precision", s.interpolated_precision}};
  if (s.qa) j["qa"] = qa_json(*s.qa);
  return j.dump(2);
}

EvalSummary run_replicates(const PipelineConfig &config, int n_runs, bool force) {
  if (n_runs < 1) throw Error("run_replicates needs at least one run");
  EvalSummary mean;
  std::optional<QaReport> qa;
  for (int k = 0; k < n_runs; ++k) {
    PipelineConfig c = config;
    c.rng_seed = config.rng_seed + static_cast<uint64_t>(k);
    c.out_dir = (fs::path(config.out_dir) / ("run-" + std::to_string(k))).string();
    run_all(c, force);
    EvalSummary s = read_eval_summary(c.out_dir);
    mean.precision += s.precision;
    mean.recall += s.recall;
    mean.f1 += s.f1;
    mean.macro_precision += s.macro_precision;
    mean.macro_recall += s.macro_recall;
    mean.macro_f1 += s.macro_f1;
    for (int i = 0; i <= 10; ++i) mean.interpolated_precision[i] += s.interpolated_precision[i];
    if (s.qa) {
      if (!qa) qa = QaReport{};
      qa->questions = s.qa->questions;
      qa->mrr += s.qa->mrr;
      qa->map += s.qa->map;
      qa->recall += s.qa->recall;
      qa->micro_recall += s.qa->micro_recall;
    }
  }
  const double n = n_runs;
  mean.runs = n_runs;
  mean.precision /= n;
  mean.recall /= n;
  mean.f1 /= n;
  mean.macro_precision /= n;
  mean.macro_recall /= n;
  mean.macro_f1 /= n;
  for (double &p : mean.interpolated_precision) p /= n;
  if (qa) {
    qa->mrr /= n;
    qa->map /= n;
    qa->recall /= n;
    qa->micro_recall /= n;
    mean.qa = qa;
  }
  return mean;
}

TuneReport tune(const PipelineConfig &config, const std::vector<int> &top_n_grid,
                const std::vector<double> &seed_ratio_grid) {
  if (top_n_grid.empty() || seed_ratio_grid.empty()) throw Error("tune: empty grid");
  if (!config.edges.propagate) {
    throw Error("tune: mode " + std::string(mode_name(config.mode)) +
                " has no propagation step to tune");
  }
  for (int n : top_n_grid) {
    if (n < 1) throw Error("tune: top-N values must be positive");
  }
  for (double r : seed_ratio_grid) {
    if (!(r > 0 && r <= 1)) throw Error("tune: seed ratios must lie in (0,1]");
  }
  config.validate();
  PipelineLock lock(config.out_dir);
  for (Stage s : {Stage::kIngest, Stage::kSeeds, Stage::kGraph}) {
    run_stage_unlocked(config, s, false);
  }
  Inputs in = load_ingested(config);
  PropGraph g = load_graph(config);
  auto development = read_seed_file(artifact(config, Stage::kSeeds, "development.tsv"));
  auto validation = read_seed_file(artifact(config, Stage::kSeeds, "validation.tsv"));
  if (validation.empty()) throw Error("tune: the validation seed set is empty");
  std::map<std::string, Unit> units = all_units(in, false);

  // Pseudo-labels from the validation seeds.
  ScoreTable pseudo_scores = mrw(g, make_seed_vectors(g, validation), config.prop);
  std::vector<std::pair<std::string, Relation>> pseudo;
  for (const auto &[key, label] : select_from_scores(pseudo_scores, 200, training_corpus(config))) {
    if (label != kPoolLabel) pseudo.push_back({key, *parse_relation(label)});
  }

  TrainOptions options = config.train;
  options.rng_seed = config.rng_seed;
  TuneReport report;
  for (double ratio : seed_ratio_grid) {
    std::vector<Seed> seeds = development;
    if (ratio < 1) seeds = split_seeds(development, ratio, config.rng_seed).development;
    ScoreTable scores = mrw(g, make_seed_vectors(g, seeds), config.prop);
    for (int n : top_n_grid) {
      Selection sel = select_from_scores(scores, n, training_corpus(config));
      Featurized f = featurize_selection(sel, units, config.window, config.drop_top_fraction);
      std::vector<FeatureVector> vectors;
      std::set<std::string> trained_on;
      for (size_t i = 0; i < sel.size(); ++i) {
        vectors.push_back(f.vectors[i].second);
        if (sel[i].second != kPoolLabel) trained_on.insert(sel[i].first);
      }
      auto models = train_models(sel, vectors, options);
      int predicted = 0, correct = 0, total = 0;
      for (const auto &[key, label] : pseudo) {
        if (trained_on.count(key)) continue;
        const Unit &u = units.at(key);
        std::vector<LinearModel> candidates;
        for (const LinearModel &m : models) {
          if (relation_domain(m.relation) == u.doc->domain) candidates.push_back(m);
        }
        ++total;
        Prediction p = predict(
            candidates, apply_filter(f.filter, featurize(u.list, *u.sentence, config.window)));
        if (!p.relation) continue;
        ++predicted;
        if (*p.relation == label) ++correct;
      }
      TuneRow row{n, ratio};
      row.precision = predicted ? static_cast<double>(correct) / predicted : 0;
      row.recall = total ? static_cast<double>(correct) / total : 0;
      row.f1 = row.precision + row.recall > 0
                   ? 2 * row.precision * row.recall / (row.precision + row.recall)
                   : 0;
      report.rows.push_back(row);
      if (row.f1 > report.rows[report.best].f1) report.best = report.rows.size() - 1;
    }
  }
  return report;
}

std::string tune_to_json(const TuneReport &report) {
  json rows = json::array();
  for (const TuneRow &r : report.rows) {
    rows.push_back({{"top_n", r.top_n},
                    {"seed_ratio", r.seed_ratio},
                    {"precision", r.precision},
                    {"recall", r.recall},
                    {"f1", r.f1}});
  }
  json j = {{"rows", rows},
            {"best", {{"top_n", report.rows[report.best].top_n},
                      {"seed_ratio", report.rows[report.best].seed_ratio}}}};
  return j.dump(2);
}

}  // namespace diebolds
