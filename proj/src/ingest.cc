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

#include "wembed/ingest.h"

#include <fstream>
#include <optional>

namespace wembed {

namespace {

enum class TermType { kIri, kBlankNode, kLiteral };

struct Term {
  TermType type;
  std::string_view value;  // IRI without brackets, or blank node label
};

bool IsSpace(char c) { return c == ' ' || c == '\t'; }

bool IsAlpha(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool IsDigit(char c) { return c >= '0' && c <= '9'; }

bool IsHex(char c) {
  return IsDigit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

// Cursor over one line. Each Parse* method either consumes a term or
// leaves an error message.
class LineParser {
 public:
  explicit LineParser(std::string_view line) : line_(line) {}

  void SkipSpace() {
    while (pos_ < line_.size() && IsSpace(line_[pos_])) ++pos_;
  }

  bool AtEnd() const { return pos_ >= line_.size(); }
  char Peek() const { return AtEnd() ? '\0' : line_[pos_]; }
  const std::string &error() const { return error_; }

  std::optional<Term> ParseSubject() {
    if (Peek() == '<') return ParseIri();
    if (Peek() == '_') return ParseBlankNode();
    return Fail("subject must be an IRI or blank node");
  }

  std::optional<Term> ParsePredicate() {
    if (Peek() == '<') return ParseIri();
    return Fail("predicate must be an IRI");
  }

  std::optional<Term> ParseObject() {
    if (Peek() == '<') return ParseIri();
    if (Peek() == '_') return ParseBlankNode();
    if (Peek() == '"') return ParseLiteral();
    return Fail("object must be an IRI, blank node or literal");
  }

  // Requires at least one space or tab.
  bool RequireSpace() {
    if (AtEnd() || !IsSpace(Peek())) {
      Fail("expected whitespace between terms");
      return false;
    }
    SkipSpace();
    return true;
  }

  bool ParseTerminator() {
    SkipSpace();
    if (Peek() != '.') {
      Fail("missing terminating '.'");
      return false;
    }
    ++pos_;
    SkipSpace();
    if (!AtEnd() && Peek() != '#') {
      Fail("unexpected content after '.'");
      return false;
    }
    return true;
  }

 private:
  std::nullopt_t Fail(std::string message) {
    if (error_.empty()) {
      error_ = std::move(message) + " at column " + std::to_string(pos_ + 1);
    }
    return std::nullopt;
  }

  std::optional<Term> ParseIri() {
    size_t start = ++pos_;
    while (pos_ < line_.size()) {
      char c = line_[pos_];
      if (c == '>') {
        std::string_view iri = line_.substr(start, pos_ - start);
        ++pos_;
        return Term{TermType::kIri, iri};
      }
      if (static_cast<unsigned char>(c) <= 0x20 || c == '<' || c == '"' ||
          c == '{' || c == '}' || c == '|' || c == '^' || c == '`') {
        return Fail("invalid character in IRI");
      }
      if (c == '\\') {
        if (!SkipUnicodeEscape()) return Fail("invalid escape in IRI");
        continue;
      }
      ++pos_;
    }
    return Fail("unterminated IRI");
  }

  std::optional<Term> ParseBlankNode() {
    if (line_.substr(pos_, 2) != "_:") return Fail("bad blank node");
    pos_ += 2;
    size_t start = pos_;
    while (pos_ < line_.size()) {
      char c = line_[pos_];
      if (IsAlpha(c) || IsDigit(c) || c == '_' || c == '-' || c == '.' ||
          static_cast<unsigned char>(c) >= 0x80) {
        ++pos_;
      } else {
        break;
      }
    }
    // A label may not end with '.'; give it back to the terminator.
    while (pos_ > start && line_[pos_ - 1] == '.') --pos_;
    if (pos_ == start) return Fail("empty blank node label");
    return Term{TermType::kBlankNode, line_.substr(start, pos_ - start)};
  }

  std::optional<Term> ParseLiteral() {
    size_t start = ++pos_;
    bool closed = false;
    while (pos_ < line_.size()) {
      char c = line_[pos_];
      if (c == '"') {
        closed = true;
        break;
      }
      if (c == '\\') {
        if (pos_ + 1 >= line_.size()) break;
        char e = line_[pos_ + 1];
        if (e == 't' || e == 'b' || e == 'n' || e == 'r' || e == 'f' ||
            e == '"' || e == '\'' || e == '\\') {
          pos_ += 2;
          continue;
        }
        if (!SkipUnicodeEscape()) return Fail("invalid escape in literal");
        continue;
      }
      ++pos_;
    }
    if (!closed) return Fail("unterminated literal");
    std::string_view value = line_.substr(start, pos_ - start);
    ++pos_;
    if (Peek() == '@') {
      ++pos_;
      size_t tag = pos_;
      while (IsAlpha(Peek())) ++pos_;
      if (pos_ == tag) return Fail("empty language tag");
      while (Peek() == '-') {
        ++pos_;
        size_t sub = pos_;
        while (IsAlpha(Peek()) || IsDigit(Peek())) ++pos_;
        if (pos_ == sub) return Fail("bad language tag");
      }
    } else if (Peek() == '^') {
      if (line_.substr(pos_, 3) != "^^<") return Fail("bad datatype marker");
      pos_ += 2;
      if (!ParseIri()) return std::nullopt;
    }
    return Term{TermType::kLiteral, value};
  }

  // At a backslash: consumes \uXXXX or \UXXXXXXXX.
  bool SkipUnicodeEscape() {
    if (pos_ + 1 >= line_.size()) return false;
    size_t digits;
    if (line_[pos_ + 1] == 'u') {
      digits = 4;
    } else if (line_[pos_ + 1] == 'U') {
      digits = 8;
    } else {
      return false;
    }
    if (pos_ + 2 + digits > line_.size()) return false;
    for (size_t i = 0; i < digits; ++i) {
      if (!IsHex(line_[pos_ + 2 + i])) return false;
    }
    pos_ += 2 + digits;
    return true;
  }

  std::string_view line_;
  size_t pos_ = 0;
  std::string error_;
};

std::optional<EntityId> EntityFromIri(const Term &term, std::string_view prefix,
                                      EntityId::Kind kind) {
  if (term.type != TermType::kIri) return std::nullopt;
  if (!term.value.starts_with(prefix)) return std::nullopt;
  auto id = EntityId::Parse(term.value.substr(prefix.size()));
  if (!id || id->kind() != kind) return std::nullopt;
  return id;
}

}  // namespace

const char *SkipReasonName(SkipReason reason) {
  switch (reason) {
    case SkipReason::kBlank: return "blank";
    case SkipReason::kComment: return "comment";
    case SkipReason::kLiteral: return "literal";
    case SkipReason::kNonEntityIri: return "non_entity_iri";
    case SkipReason::kBlankNode: return "blank_node";
  }
  return "unknown";
}

ParseOutcome ParseLine(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  LineParser parser(line);
  parser.SkipSpace();
  if (parser.AtEnd()) return Skipped{SkipReason::kBlank};
  if (parser.Peek() == '#') return Skipped{SkipReason::kComment};

  auto subject = parser.ParseSubject();
  if (!subject || !parser.RequireSpace()) return Malformed{parser.error()};
  auto predicate = parser.ParsePredicate();
  if (!predicate || !parser.RequireSpace()) return Malformed{parser.error()};
  auto object = parser.ParseObject();
  if (!object || !parser.ParseTerminator()) return Malformed{parser.error()};

  if (object->type == TermType::kLiteral) return Skipped{SkipReason::kLiteral};
  if (subject->type == TermType::kBlankNode ||
      object->type == TermType::kBlankNode) {
    return Skipped{SkipReason::kBlankNode};
  }
  auto s = EntityFromIri(*subject, kEntityPrefix, EntityId::Kind::kItem);
  auto p = EntityFromIri(*predicate, kDirectPropertyPrefix,
                         EntityId::Kind::kProperty);
  auto o = EntityFromIri(*object, kEntityPrefix, EntityId::Kind::kItem);
  if (!s || !p || !o) return Skipped{SkipReason::kNonEntityIri};
  return Triple{*s, *p, *o};
}

void ExtractionStats::Record(const ParseOutcome &outcome) {
  ++lines_read;
  if (std::holds_alternative<Triple>(outcome)) {
    ++triples_emitted;
  } else if (std::holds_alternative<Malformed>(outcome)) {
    ++skipped_malformed;
  } else {
    switch (std::get<Skipped>(outcome).reason) {
      case SkipReason::kBlank:
      case SkipReason::kComment:
        ++skipped_blank_or_comment;
        break;
      case SkipReason::kLiteral:
        ++skipped_literal;
        break;
      case SkipReason::kNonEntityIri:
      case SkipReason::kBlankNode:
        ++skipped_non_entity_iri;
        break;
    }
  }
}

ExtractionStats &ExtractionStats::operator+=(const ExtractionStats &other) {
  lines_read += other.lines_read;
  triples_emitted += other.triples_emitted;
  skipped_literal += other.skipped_literal;
  skipped_non_entity_iri += other.skipped_non_entity_iri;
  skipped_malformed += other.skipped_malformed;
  skipped_blank_or_comment += other.skipped_blank_or_comment;
  return *this;
}

bool ExtractionStats::Consistent() const {
  return lines_read == triples_emitted + skipped_literal +
                           skipped_non_entity_iri + skipped_malformed +
                           skipped_blank_or_comment;
}

std::string ExtractionStats::ToJson() const {
  return "{\"lines_read\":" + std::to_string(lines_read) +
         ",\"triples_emitted\":" + std::to_string(triples_emitted) +
         ",\"skipped_literal\":" + std::to_string(skipped_literal) +
         ",\"skipped_non_entity_iri\":" +
         std::to_string(skipped_non_entity_iri) +
         ",\"skipped_malformed\":" + std::to_string(skipped_malformed) + "}";
}

ExtractionStats ExtractTriples(std::istream &input, const TripleSink &sink) {
  ExtractionStats stats;
  std::string line;
  while (std::getline(input, line)) {
    ParseOutcome outcome = ParseLine(line);
    stats.Record(outcome);
    if (const Triple *t = std::get_if<Triple>(&outcome)) sink(*t);
  }
  if (input.bad()) {
    throw ExtractionError("read error after line " +
                              std::to_string(stats.lines_read),
                          stats);
  }
  return stats;
}

void WriteTriple(std::ostream &out, const Triple &triple) {
  out << triple.subject.str() << ' ' << triple.predicate.str() << ' '
      << triple.object.str() << '\n';
}

void WriteTriples(std::span<const Triple> triples, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (const Triple &t : triples) WriteTriple(out, t);
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

Triple ParseTripleLine(std::string_view line) {
  size_t a = line.find(' ');
  size_t b = a == std::string_view::npos ? a : line.find(' ', a + 1);
  if (b == std::string_view::npos) {
    throw std::invalid_argument("expected three space-separated tokens");
  }
  auto s = EntityId::Parse(line.substr(0, a));
  auto p = EntityId::Parse(line.substr(a + 1, b - a - 1));
  auto o = EntityId::Parse(line.substr(b + 1));
  if (!s || !p || !o || !s->is_item() || !p->is_property() || !o->is_item()) {
    throw std::invalid_argument("expected 'Q<n> P<n> Q<n>'");
  }
  return Triple{*s, *p, *o};
}

TripleReader::TripleReader(const std::string &path)
    : owned_(std::make_unique<std::ifstream>(path, std::ios::binary)),
      input_(owned_.get()) {
  if (!*input_) throw std::runtime_error("cannot open triple file: " + path);
}

TripleReader::TripleReader(std::istream &input) : input_(&input) {}

TripleReader::~TripleReader() = default;

bool TripleReader::Next(Triple *triple) {
  if (!std::getline(*input_, line_)) {
    if (input_->bad()) {
      throw std::runtime_error("read error after line " +
                               std::to_string(line_number_));
    }
    return false;
  }
  ++line_number_;
  try {
    *triple = ParseTripleLine(line_);
  } catch (const std::invalid_argument &e) {
    throw std::runtime_error("malformed triple at line " +
                             std::to_string(line_number_) + ": " + e.what());
  }
  return true;
}

std::vector<Triple> ReadTriples(const std::string &path) {
  TripleReader reader(path);
  std::vector<Triple> triples;
  Triple t;
  while (reader.Next(&t)) triples.push_back(t);
  return triples;
}

}  // namespace wembed
