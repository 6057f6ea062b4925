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


#include "diebolds/corpus.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

namespace diebolds {
namespace {

using json = nlohmann::json;

bool is_chunk_body(const std::string &pos) {
  static const std::unordered_set<std::string> kBody = {
      "JJ", "JJR", "JJS", "VBN", "NN", "NNS", "NNP", "NNPS", "FW"};
  return kBody.count(pos) > 0;
}

bool is_chunk_final(const std::string &pos) {
  static const std::unordered_set<std::string> kFinal = {"NN", "NNS", "NNP",
                                                         "NNPS", "FW"};
  return kFinal.count(pos) > 0;
}

bool is_comma(const Token &t) { return t.text == ","; }

bool is_conjunction(const Token &t) {
  std::string lower = to_lower(t.text);
  return lower == "and" || lower == "or" || t.pos == "CC";
}

// Dependency labels that attach a conjunct into the final item.
bool is_coordination_label(const std::string &label) {
  std::string upper = label;
  for (char &c : upper) c = static_cast<char>(std::toupper(c));
  return upper == "NMOD" || upper == "COORD" || upper == "CONJ";
}

enum class Gap { kNone, kComma, kConjunction };

// Classifies the tokens strictly between two chunks.
Gap classify_gap(const Sentence &s, const Mention &left, const Mention &right) {
  int first = left.end + 1, last = right.start - 1;
  // A determiner of the right chunk sits in the gap but is not punctuation.
  if (last >= first && s.token(last).pos == "DT") --last;
  int n = last - first + 1;
  if (n == 1 && is_comma(s.token(first))) return Gap::kComma;
  if (n == 1 && is_conjunction(s.token(first))) return Gap::kConjunction;
  if (n == 2 && is_comma(s.token(first)) && is_conjunction(s.token(last))) {
    return Gap::kConjunction;
  }
  return Gap::kNone;
}

[[noreturn]] void fail(int line, const std::string &field,
                       const std::string &msg) {
  throw Error("line " + std::to_string(line) + ": field '" + field + "': " +
              msg);
}

const json &require(const json &obj, const char *key, int line,
                    const std::string &path) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(line, path + key, "missing");
  return *it;
}

std::string require_string(const json &obj, const char *key, int line,
                           const std::string &path, bool non_empty) {
  const json &v = require(obj, key, line, path);
  if (!v.is_string()) fail(line, path + key, "expected a string");
  std::string s = v.get<std::string>();
  if (non_empty && s.empty()) fail(line, path + key, "must be non-empty");
  return s;
}

Document parse_document(const json &obj, int line, CorpusKind kind) {
  if (!obj.is_object()) fail(line, "<record>", "expected a JSON object");
  Document doc;
  doc.doc_id = require_string(obj, "doc_id", line, "", true);
  doc.subject = require_string(obj, "subject", line, "", true);
  std::string domain = require_string(obj, "domain", line, "", true);
  auto parsed = parse_domain(domain);
  if (!parsed) fail(line, "domain", "unknown domain '" + domain + "'");
  doc.domain = *parsed;

  const json &sentences = require(obj, "sentences", line, "");
  if (!sentences.is_array()) fail(line, "sentences", "expected an array");
  for (size_t si = 0; si < sentences.size(); ++si) {
    std::string spath = "sentences[" + std::to_string(si) + "].";
    const json &js = sentences[si];
    if (!js.is_object()) fail(line, spath, "expected an object");
    Sentence sent;
    auto sec = js.find("section");
    if (sec != js.end()) {
      if (!sec->is_string()) fail(line, spath + "section", "expected a string");
      sent.section_title = sec->get<std::string>();
    }
    if (kind == CorpusKind::kStructured && sent.section_title.empty()) {
      fail(line, spath + "section",
           "structured corpus sentences need a section title");
    }
    const json &tokens = require(js, "tokens", line, spath);
    if (!tokens.is_array()) fail(line, spath + "tokens", "expected an array");
    if (tokens.empty()) fail(line, spath + "tokens", "sentence has no tokens");
    const int n = static_cast<int>(tokens.size());
    int with_head = 0;
    for (int ti = 0; ti < n; ++ti) {
      std::string tpath = spath + "tokens[" + std::to_string(ti) + "].";
      const json &jt = tokens[ti];
      if (!jt.is_object()) fail(line, tpath, "expected an object");
      Token tok;
      tok.index = ti + 1;
      tok.text = require_string(jt, "t", line, tpath, true);
      tok.pos = require_string(jt, "p", line, tpath, true);
      auto h = jt.find("h");
      if (h != jt.end() && !h->is_null()) {
        if (!h->is_number_integer()) fail(line, tpath + "h", "expected an int");
        int head = h->get<int>();
        if (head < 0 || head > n) {
          fail(line, tpath + "h",
               "head " + std::to_string(head) + " outside sentence of " +
                   std::to_string(n) + " tokens");
        }
        if (head == tok.index) fail(line, tpath + "h", "token heads itself");
        tok.head = head;
        ++with_head;
      }
      auto d = jt.find("d");
      if (d != jt.end() && !d->is_null()) {
        if (!d->is_string()) fail(line, tpath + "d", "expected a string");
        tok.deplabel = d->get<std::string>();
      }
      sent.tokens.push_back(std::move(tok));
    }
    if (with_head != 0 && with_head != n) {
      fail(line, spath + "tokens",
           "dependency heads must be given for all tokens or none");
    }
    doc.sentences.push_back(std::move(sent));
  }
  return doc;
}

json document_to_json(const Document &doc) {
  json sentences = json::array();
  for (const Sentence &s : doc.sentences) {
    json tokens = json::array();
    for (const Token &t : s.tokens) {
      json jt = {{"t", t.text}, {"p", t.pos}};
      if (t.head) jt["h"] = *t.head;
      if (!t.deplabel.empty()) jt["d"] = t.deplabel;
      tokens.push_back(std::move(jt));
    }
    sentences.push_back({{"section", s.section_title}, {"tokens", tokens}});
  }
  return {{"doc_id", doc.doc_id},
          {"subject", doc.subject},
          {"domain", std::string(domain_name(doc.domain))},
          {"sentences", sentences}};
}

}  // namespace

bool Sentence::has_dependencies() const {
  if (tokens.empty()) return false;
  for (const Token &t : tokens) {
    if (!t.head) return false;
  }
  return true;
}

std::string_view corpus_kind_name(CorpusKind kind) {
  return kind == CorpusKind::kTarget ? "target" : "structured";
}

std::optional<CorpusKind> parse_corpus_kind(std::string_view name) {
  if (name == "target") return CorpusKind::kTarget;
  if (name == "structured") return CorpusKind::kStructured;
  return std::nullopt;
}

Corpus parse_corpus(std::istream &in, CorpusKind kind) {
  Corpus corpus;
  corpus.kind = kind;
  std::set<std::string> ids;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error &e) {
      fail(lineno, "<record>", std::string("invalid JSON: ") + e.what());
    }
    Document doc = parse_document(obj, lineno, kind);
    if (!ids.insert(doc.doc_id).second) {
      fail(lineno, "doc_id", "duplicate doc_id '" + doc.doc_id + "'");
    }
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

Corpus load_corpus(const std::string &path, CorpusKind kind) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file '" + path + "'");
  try {
    return parse_corpus(in, kind);
  } catch (const Error &e) {
    throw Error(path + ": " + e.what());
  }
}

void write_corpus(std::ostream &out, const Corpus &corpus) {
  for (const Document &doc : corpus.documents) {
    out << document_to_json(doc).dump() << "\n";
  }
}

void save_corpus(const std::string &path, const Corpus &corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write corpus file '" + path + "'");
  write_corpus(out, corpus);
}

std::vector<Mention> chunk_nps(const Sentence &sentence,
                               const SentenceAnchor &anchor) {
  std::vector<Mention> out;
  const int n = sentence.size();
  int i = 1;
  while (i <= n) {
    int body = i;
    if (sentence.token(i).pos == "DT") ++body;
    // Longest run of body tags; the chunk ends at its last nominal.
    int last_final = 0;
    int j = body;
    while (j <= n && is_chunk_body(sentence.token(j).pos)) {
      if (is_chunk_final(sentence.token(j).pos)) last_final = j;
      ++j;
    }
    if (last_final == 0) {
      ++i;
      continue;
    }
    Mention m;
    m.doc_id = anchor.doc_id;
    m.subject = anchor.subject;
    m.ref = anchor.ref;
    m.start = body;
    m.end = last_final;
    std::vector<std::string> words;
    for (int k = body; k <= last_final; ++k) {
      words.push_back(sentence.token(k).text);
    }
    m.surface = join(words, " ");
    m.normalized = to_lower(m.surface);
    out.push_back(std::move(m));
    i = last_final + 1;
  }
  return out;
}

std::vector<CoordList> extract_coord_lists(const Sentence &sentence,
                                           const std::vector<Mention> &chunks) {
  std::vector<CoordList> out;
  auto singleton = [&](const Mention &m) {
    CoordList l;
    l.items = {m};
    l.is_singleton = true;
    l.ref = m.ref;
    out.push_back(std::move(l));
  };
  const bool deps = sentence.has_dependencies();
  const size_t n = chunks.size();
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n &&
           classify_gap(sentence, chunks[j], chunks[j + 1]) == Gap::kComma) {
      ++j;
    }
    if (j + 1 < n &&
        classify_gap(sentence, chunks[j], chunks[j + 1]) ==
            Gap::kConjunction) {
      const size_t last = j + 1;
      std::vector<Mention> items;
      for (size_t k = i; k < last; ++k) {
        bool keep = true;
        if (deps) {
          const Token &head = sentence.token(chunks[k].end);
          keep = head.head && *head.head == chunks[last].end &&
                 is_coordination_label(head.deplabel);
        }
        if (keep) {
          items.push_back(chunks[k]);
        } else {
          singleton(chunks[k]);
        }
      }
      items.push_back(chunks[last]);
      if (items.size() == 1) {
        singleton(items.front());
      } else {
        CoordList l;
        l.ref = items.front().ref;
        l.items = std::move(items);
        l.is_singleton = false;
        out.push_back(std::move(l));
      }
      i = last + 1;
    } else {
      for (size_t k = i; k <= j; ++k) singleton(chunks[k]);
      i = j + 1;
    }
  }
  // Emit in order of first token so list ordinals follow the sentence.
  std::stable_sort(out.begin(), out.end(),
                   [](const CoordList &a, const CoordList &b) {
                     return a.items.front().start < b.items.front().start;
                   });
  return out;
}

std::vector<CoordList> extract_coord_lists(const Sentence &sentence,
                                           const SentenceAnchor &anchor) {
  return extract_coord_lists(sentence, chunk_nps(sentence, anchor));
}

bool is_self_mention(const Document &doc, const Mention &mention) {
  return mention.normalized == to_lower(doc.subject);
}

std::vector<CoordList> mention_lists(const Sentence &sentence,
                                     const SentenceAnchor &anchor) {
  std::vector<CoordList> out;
  for (Mention &m : chunk_nps(sentence, anchor)) {
    CoordList list;
    list.ref = anchor.ref;
    list.items.push_back(std::move(m));
    out.push_back(std::move(list));
  }
  return out;
}

std::vector<SentenceLists> extract_corpus_lists(const Corpus &corpus,
                                               bool mentions_only) {
  std::vector<SentenceLists> out;
  for (size_t d = 0; d < corpus.documents.size(); ++d) {
    const Document &doc = corpus.documents[d];
    for (size_t s = 0; s < doc.sentences.size(); ++s) {
      SentenceAnchor anchor{doc.doc_id, doc.subject,
                            {static_cast<int>(d), static_cast<int>(s)}};
      SentenceLists sl;
      sl.ref = anchor.ref;
      sl.lists = mentions_only ? mention_lists(doc.sentences[s], anchor)
                               : extract_coord_lists(doc.sentences[s], anchor);
      out.push_back(std::move(sl));
    }
  }
  return out;
}

const Sentence &resolve(const Corpus &corpus, SentenceRef ref) {
  if (ref.document < 0 ||
      ref.document >= static_cast<int>(corpus.documents.size())) {
    throw Error("sentence reference to unknown document " +
                std::to_string(ref.document));
  }
  const Document &doc = corpus.documents[ref.document];
  if (ref.sentence < 0 ||
      ref.sentence >= static_cast<int>(doc.sentences.size())) {
    throw Error("sentence reference to unknown sentence " +
                std::to_string(ref.sentence) + " of document " + doc.doc_id);
  }
  return doc.sentences[ref.sentence];
}

}  // namespace diebolds
