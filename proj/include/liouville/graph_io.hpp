#pragma once

#include "liouville/graph.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace liouville {

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view bytes);

/// Canonical text form:
///
///     version 1
///     variant standard|unbalanced
///     depth N
///     seed S
///     level n edges k        (for n = 1..N, followed by k lines "i j", i <= j)
///     sha256 <hex of all preceding bytes>
std::string serialize_graph(const LeveledGraph& g);

/// Inverse of serialize_graph. Throws ParseError (with line context) on
/// malformed input or checksum mismatch, ValidationError on invariant violations.
LeveledGraph deserialize_graph(std::string_view text);

void write_graph_file(const LeveledGraph& g, const std::filesystem::path& path);
LeveledGraph read_graph_file(const std::filesystem::path& path);

} // namespace liouville
