#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "madurl/common.hpp"

namespace madurl {

inline constexpr int kLexicalSlots = 49;
inline constexpr int kWebSlots = 40;
inline constexpr int kFeatureSlots = kLexicalSlots + kWebSlots;  // 89

using LexicalFeatures = std::array<double, kLexicalSlots>;
using WebFeatures = std::array<double, kWebSlots>;

struct FeatureVector {
    std::vector<double> values;  // kFeatureSlots entries, schema order
};

struct SlotInfo {
    const char* name;
    const char* subgroup;  // linguistic | human | deepweb | urlseg | host | content
    const char* encoding;
    bool sentinel_missing;  // -1 marks "provider unavailable" on this slot
};

// Fixed slot layout: the 49 lexical slots first, then the 40 web slots.
const std::array<SlotInfo, kFeatureSlots>& feature_schema();

// Stable identifier of the slot layout; models refuse vectors built against
// a different schema.
std::uint64_t feature_schema_hash();

struct SchemaMismatch : Error {
    explicit SchemaMismatch(const std::string& what) : Error("schema mismatch: " + what) {}
};

FeatureVector assemble_feature_vector(const LexicalFeatures& lex, const WebFeatures& web);

}  // namespace madurl
