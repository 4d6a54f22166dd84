#pragma once

#include <filesystem>
#include <string>

#include "walkbounds/chain.hpp"
#include "walkbounds/generators.hpp"

namespace walkbounds {

/// Chain+partition JSON document:
///   {"states": ["a","b","c"],
///    "transitions": [[0,0.5,0.5],[0.5,0,0.5],[0,0,1]],
///    "partition": {"A":["a"],"B":["b"],"C":["c"]}}
/// Parsing applies the same validation as build_chain/build_partition.
/// Serialization is lossless: probabilities round-trip exactly.
Generated parse_document(const std::string& json_text);
Generated read_document(const std::filesystem::path& path);

std::string document_to_json(const Chain& chain, const Partition& partition);
void write_document(const std::filesystem::path& path, const Chain& chain,
                    const Partition& partition);

}  // namespace walkbounds
