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


#ifndef DIEBOLDS_CORPUS_H_
#define DIEBOLDS_CORPUS_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "diebolds/common.h"

namespace diebolds {

// A token of a pre-tagged sentence. Indices are 1-based; a head of 0 marks
// the dependency root.
struct Token {
  int index = 0;
  std::string text;
  std::string pos;
  std::optional<int> head;
  std::string deplabel;
};

struct Sentence {
  std::vector<Token> tokens;
  std::string section_title;

  // True when every token carries a dependency head.
  bool has_dependencies() const;
  const Token &token(int index) const { return tokens.at(index - 1); }
  int size() const { return static_cast<int>(tokens.size()); }
};

struct Document {
  std::string doc_id;
  std::string subject;
  Domain domain = Domain::kDrug;
  std::vector<Sentence> sentences;
};

enum class CorpusKind { kTarget, kStructured };

std::string_view corpus_kind_name(CorpusKind kind);
std::optional<CorpusKind> parse_corpus_kind(std::string_view name);

struct Corpus {
  CorpusKind kind = CorpusKind::kTarget;
  std::vector<Document> documents;
};

// Position of a sentence inside a corpus.
struct SentenceRef {
  int document = 0;
  int sentence = 0;

  auto operator<=>(const SentenceRef &) const = default;
};

// Identifies the sentence a mention is read from. Only used to stamp the
// mentions produced by the chunker.
struct SentenceAnchor {
  std::string doc_id;
  std::string subject;
  SentenceRef ref;
};

// A noun-phrase chunk. `start` and `end` are inclusive 1-based token
// indices and cover exactly the tokens of `surface` (no determiner).
struct Mention {
  std::string doc_id;
  std::string subject;
  SentenceRef ref;
  int start = 0;
  int end = 0;
  std::string surface;
  std::string normalized;
};

struct CoordList {
  std::vector<Mention> items;
  bool is_singleton = true;
  SentenceRef ref;

  // Token index of the list head: the last token of the last item.
  int head_token() const { return items.back().end; }
  int first_token() const { return items.front().start; }
};

// Reads the one-JSON-object-per-line interchange format. Every structural
// problem is reported with its 1-based line number.
Corpus load_corpus(const std::string &path, CorpusKind kind);
Corpus parse_corpus(std::istream &in, CorpusKind kind);
void write_corpus(std::ostream &out, const Corpus &corpus);
void save_corpus(const std::string &path, const Corpus &corpus);

// Greedy left-to-right longest-match chunker over the tag pattern
//   DT? (JJ|JJR|JJS|VBN|NN|NNS|NNP|NNPS|FW)* (NN|NNS|NNP|NNPS|FW)
std::vector<Mention> chunk_nps(const Sentence &sentence,
                               const SentenceAnchor &anchor = {});

// Groups chunks joined by "NP (, NP)* ,? CC NP" into coordinate lists.
// Every chunk ends up in exactly one list; leftovers become singletons.
std::vector<CoordList> extract_coord_lists(const Sentence &sentence,
                                           const std::vector<Mention> &chunks);
std::vector<CoordList> extract_coord_lists(const Sentence &sentence,
                                           const SentenceAnchor &anchor = {});

// Lists of one sentence, with their ordinal as used in list node keys.
// True when the mention names the document subject itself; such mentions
// never stand for a relation object.
bool is_self_mention(const Document &doc, const Mention &mention);

// Every NP chunk of the sentence as its own singleton list.
std::vector<CoordList> mention_lists(const Sentence &sentence,
                                     const SentenceAnchor &anchor = {});

struct SentenceLists {
  SentenceRef ref;
  std::vector<CoordList> lists;
};

// Chunks and list-extracts every sentence of a corpus.
std::vector<SentenceLists> extract_corpus_lists(const Corpus &corpus,
                                               bool mentions_only = false);

const Sentence &resolve(const Corpus &corpus, SentenceRef ref);

}  // namespace diebolds

#endif  // DIEBOLDS_CORPUS_H_
