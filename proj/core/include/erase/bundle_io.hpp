#pragma once

#include <string>

#include "erase/graph.hpp"

namespace erase {

inline constexpr const char* kSpecVersion = "1.0";

// Directory layout: meta.json, edges.tsv, features.tsv, labels.tsv, split.tsv.
// Parse errors carry "<file>:<line>: message".
GraphBundle load_bundle(const std::string& dir);

// Writes the canonical layout. Doubles use shortest round-trip formatting,
// so save -> load -> save is byte-identical.
void save_bundle(const GraphBundle& bundle, const std::string& dir);

// Shortest decimal string that round-trips the value.
std::string format_double(double v);

}  // namespace erase
