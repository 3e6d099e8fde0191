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

#include "wembed/entity.h"

#include <charconv>

namespace wembed {

EntityId::EntityId(Kind kind, uint64_t number) : kind_(kind), number_(number) {
  if (number == 0 || number > kMaxNumber) {
    throw std::invalid_argument("entity number out of range: " +
                                std::to_string(number));
  }
}

std::optional<EntityId> EntityId::Parse(std::string_view text) {
  if (text.size() < 2) return std::nullopt;
  Kind kind;
  if (text[0] == 'Q') {
    kind = Kind::kItem;
  } else if (text[0] == 'P') {
    kind = Kind::kProperty;
  } else {
    return std::nullopt;
  }
  std::string_view digits = text.substr(1);
  if (digits[0] < '1' || digits[0] > '9') return std::nullopt;
  uint64_t number = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(),
                                   number);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) {
    return std::nullopt;
  }
  if (number > kMaxNumber) return std::nullopt;
  return EntityId(kind, number);
}

EntityId EntityId::FromString(std::string_view text) {
  auto id = Parse(text);
  if (!id) {
    throw std::invalid_argument("invalid entity id: '" + std::string(text) +
                                "'");
  }
  return *id;
}

std::string EntityId::str() const {
  char buf[24];
  buf[0] = is_item() ? 'Q' : 'P';
  auto [ptr, ec] = std::to_chars(buf + 1, buf + sizeof(buf), number_);
  return std::string(buf, ptr);
}

std::ostream &operator<<(std::ostream &os, const EntityId &id) {
  return os << id.str();
}

Triple MakeTriple(EntityId subject, EntityId predicate, EntityId object) {
  if (!subject.is_item() || !predicate.is_property() || !object.is_item()) {
    throw std::invalid_argument("triple must be item-property-item: " +
                                subject.str() + " " + predicate.str() + " " +
                                object.str());
  }
  return Triple{subject, predicate, object};
}

std::ostream &operator<<(std::ostream &os, const Triple &t) {
  return os << t.subject << ' ' << t.predicate << ' ' << t.object;
}

}  // namespace wembed
