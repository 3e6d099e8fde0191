// Copyright 2026 The Wembed Authors.
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

#ifndef WEMBED_INGEST_H_
#define WEMBED_INGEST_H_

#include <cstdint>
#include <functional>
#include <istream>
#include <memory>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "wembed/entity.h"

namespace wembed {

inline constexpr std::string_view kEntityPrefix =
    "http://www.wikidata.org/entity/";
inline constexpr std::string_view kDirectPropertyPrefix =
    "http://www.wikidata.org/prop/direct/";

// Why a syntactically valid line did not produce an item-property-item triple.
enum class SkipReason {
  kBlank,
  kComment,
  kLiteral,         // object is a literal value
  kNonEntityIri,    // some IRI outside the item/direct-property namespaces
  kBlankNode,       // subject or object is a blank node
};

const char *SkipReasonName(SkipReason reason);

struct Skipped {
  SkipReason reason;
};

struct Malformed {
  std::string message;
};

using ParseOutcome = std::variant<Triple, Skipped, Malformed>;

// Classifies one physical line of an N-Triples file. Only the line-oriented
// N-Triples subset is accepted; Turtle/N3 constructs (prefixed names, ';',
// ',', 'a') are reported as Malformed.
ParseOutcome ParseLine(std::string_view line);

// Counters for one extraction run. Blank nodes are accounted as
// non-entity IRIs; blank and comment lines only appear in lines_read.
struct ExtractionStats {
  uint64_t lines_read = 0;
  uint64_t triples_emitted = 0;
  uint64_t skipped_literal = 0;
  uint64_t skipped_non_entity_iri = 0;
  uint64_t skipped_malformed = 0;
  uint64_t skipped_blank_or_comment = 0;

  void Record(const ParseOutcome &outcome);
  ExtractionStats &operator+=(const ExtractionStats &other);
  bool Consistent() const;

  // JSON object with the five public counters.
  std::string ToJson() const;

  friend bool operator==(const ExtractionStats &,
                         const ExtractionStats &) = default;
};

// Thrown when the input stream fails mid-way; carries what was counted.
class ExtractionError : public std::runtime_error {
 public:
  ExtractionError(const std::string &what, ExtractionStats partial)
      : std::runtime_error(what), partial_(partial) {}
  const ExtractionStats &partial() const { return partial_; }

 private:
  ExtractionStats partial_;
};

using TripleSink = std::function<void(const Triple &)>;

// Single pass over `input`, forwarding entity triples to `sink` in input
// order. Memory use is bounded by the longest line.
ExtractionStats ExtractTriples(std::istream &input, const TripleSink &sink);

// Triple text format: "Q22 P31 Q3336843\n" per triple, no header.
void WriteTriple(std::ostream &out, const Triple &triple);
void WriteTriples(std::span<const Triple> triples, const std::string &path);

// Parses one line of the triple text format. Throws std::invalid_argument.
Triple ParseTripleLine(std::string_view line);

// Streaming reader over a triple file.
class TripleReader {
 public:
  explicit TripleReader(const std::string &path);
  explicit TripleReader(std::istream &input);
  ~TripleReader();

  TripleReader(const TripleReader &) = delete;
  TripleReader &operator=(const TripleReader &) = delete;

  // Returns false at end of input. Throws std::runtime_error naming the line
  // number on a malformed line.
  bool Next(Triple *triple);

  uint64_t line_number() const { return line_number_; }

 private:
  std::unique_ptr<std::istream> owned_;
  std::istream *input_;
  std::string line_;
  uint64_t line_number_ = 0;
};

std::vector<Triple> ReadTriples(const std::string &path);

}  // namespace wembed

#endif  // WEMBED_INGEST_H_
