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

#ifndef WEMBED_ENTITY_H_
#define WEMBED_ENTITY_H_

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wembed {

// Identifier of a Wikidata item ("Q22") or property ("P31"). These are the
// "words" of the embedding.
class EntityId {
 public:
  enum class Kind : uint8_t { kItem, kProperty };

  // Largest number accepted; keeps the packed key within 63 bits.
  static constexpr uint64_t kMaxNumber = (uint64_t{1} << 62) - 1;

  EntityId() = default;
  EntityId(Kind kind, uint64_t number);

  // Parses the serialized form. Accepts exactly ^[QP][1-9][0-9]*$.
  static std::optional<EntityId> Parse(std::string_view text);

  // Like Parse() but throws std::invalid_argument.
  static EntityId FromString(std::string_view text);

  static EntityId Item(uint64_t number) { return {Kind::kItem, number}; }
  static EntityId Property(uint64_t number) { return {Kind::kProperty, number}; }

  Kind kind() const { return kind_; }
  uint64_t number() const { return number_; }
  bool is_item() const { return kind_ == Kind::kItem; }
  bool is_property() const { return kind_ == Kind::kProperty; }
  bool valid() const { return number_ != 0; }

  std::string str() const;

  // Dense 64-bit key, unique per identifier.
  uint64_t key() const {
    return (number_ << 1) | (kind_ == Kind::kProperty ? 1 : 0);
  }

  friend bool operator==(const EntityId &, const EntityId &) = default;
  friend auto operator<=>(const EntityId &a, const EntityId &b) {
    return a.key() <=> b.key();
  }

 private:
  Kind kind_ = Kind::kItem;
  uint64_t number_ = 0;
};

std::ostream &operator<<(std::ostream &os, const EntityId &id);

// One item-property-item edge of the knowledge graph.
struct Triple {
  EntityId subject;
  EntityId predicate;
  EntityId object;

  friend bool operator==(const Triple &, const Triple &) = default;
};

// Builds a triple and checks the kind of every position.
Triple MakeTriple(EntityId subject, EntityId predicate, EntityId object);

std::ostream &operator<<(std::ostream &os, const Triple &t);

}  // namespace wembed

template <>
struct std::hash<wembed::EntityId> {
  size_t operator()(const wembed::EntityId &id) const noexcept {
    return std::hash<uint64_t>()(id.key());
  }
};

#endif  // WEMBED_ENTITY_H_
