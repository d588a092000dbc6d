#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace mixreason {

// The nine if-then inference dimensions. Integer codes are stable and are
// written into checkpoints, so never reorder.
enum class Relation : std::uint8_t {
  xIntent = 0,
  xNeed,
  xAttr,
  xReact,
  xWant,
  xEffect,
  oReact,
  oWant,
  oEffect,
};

inline constexpr std::size_t kNumRelations = 9;

inline constexpr std::array<Relation, kNumRelations> kAllRelations = {
    Relation::xIntent, Relation::xNeed,  Relation::xAttr,  Relation::xReact,  Relation::xWant,
    Relation::xEffect, Relation::oReact, Relation::oWant, Relation::oEffect,
};

inline constexpr std::array<std::string_view, kNumRelations> kRelationNames = {
    "xIntent", "xNeed", "xAttr", "xReact", "xWant", "xEffect", "oReact", "oWant", "oEffect",
};

constexpr std::size_t code(Relation r) { return static_cast<std::size_t>(r); }

constexpr std::string_view name(Relation r) { return kRelationNames[code(r)]; }

// Case-sensitive, matching the on-disk spelling.
constexpr std::optional<Relation> relation_from_name(std::string_view s) {
  for (std::size_t i = 0; i < kNumRelations; ++i) {
    if (kRelationNames[i] == s) return kAllRelations[i];
  }
  return std::nullopt;
}

}  // namespace mixreason
