#include "liouville/graph_io.hpp"

#include "liouville/errors.hpp"
#include "liouville/rng.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

namespace liouville {

namespace {

constexpr std::string_view kChecksumPrefix = "sha256 ";

class LineReader {
public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool done() const { return pos_ >= text_.size(); }
  int line_number() const { return line_; }

  std::string_view next() {
    if (done())
      throw ParseError("line " + std::to_string(line_ + 1) + ": unexpected end of file");
    const auto end = text_.find('\n', pos_);
    if (end == std::string_view::npos)
      throw ParseError("line " + std::to_string(line_ + 1) + ": missing trailing newline");
    auto line = text_.substr(pos_, end - pos_);
    pos_ = end + 1;
    ++line_;
    return line;
  }

  std::size_t offset() const { return pos_; }

private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 0;
};

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    const auto space = line.find(' ', pos);
    const auto end = space == std::string_view::npos ? line.size() : space;
    out.push_back(line.substr(pos, end - pos));
    pos = end + 1;
  }
  return out;
}

template <typename Int>
Int parse_int(std::string_view token, int line, std::string_view field) {
  Int value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty())
    throw ParseError("line " + std::to_string(line) + ": field '" + std::string(field) +
                     "' expects an integer, got '" + std::string(token) + "'");
  return value;
}

std::vector<std::string_view> expect_keyword(LineReader& reader, std::string_view keyword,
                                             std::size_t tokens) {
  const auto line = reader.next();
  auto parts = split(line);
  if (parts.size() != tokens || parts[0] != keyword)
    throw ParseError("line " + std::to_string(reader.line_number()) + ": expected '" +
                     std::string(keyword) + "' with " + std::to_string(tokens - 1) +
                     " value(s), got '" + std::string(line) + "'");
  return parts;
}

} // namespace

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &length) != 1)
    throw std::runtime_error("sha256 digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int k = 0; k < length; ++k) {
    out.push_back(kHex[digest[k] >> 4]);
    out.push_back(kHex[digest[k] & 0xf]);
  }
  return out;
}

std::string serialize_graph(const LeveledGraph& g) {
  std::ostringstream out;
  out << "version 1\n";
  out << "variant " << to_string(g.variant()) << "\n";
  out << "depth " << g.depth() << "\n";
  out << "seed " << g.master_seed() << "\n";
  for (int n = 1; n <= g.depth(); ++n) {
    if (g.variant() == GraphVariant::standard) {
      const auto& edges = g.layer(n).edges;
      out << "level " << n << " edges " << edges.size() << "\n";
      for (const auto& [i, j] : edges)
        out << i << " " << j << "\n";
    } else {
      out << "level " << n << " edges 0\n";
    }
  }
  std::string body = out.str();
  const std::string digest = sha256_hex(body);
  body.append(kChecksumPrefix).append(digest).append("\n");
  return body;
}

LeveledGraph deserialize_graph(std::string_view text) {
  LineReader reader(text);

  auto parts = expect_keyword(reader, "version", 2);
  if (parts[1] != "1")
    throw ParseError("line 1: unsupported version '" + std::string(parts[1]) + "'");

  parts = expect_keyword(reader, "variant", 2);
  GraphVariant variant;
  if (parts[1] == "standard")
    variant = GraphVariant::standard;
  else if (parts[1] == "unbalanced")
    variant = GraphVariant::unbalancedTree;
  else
    throw ParseError("line 2: field 'variant' must be standard or unbalanced, got '" +
                     std::string(parts[1]) + "'");

  parts = expect_keyword(reader, "depth", 2);
  const int depth = parse_int<int>(parts[1], reader.line_number(), "depth");
  if (depth < 0 || depth > kMaxDepth)
    throw ParseError("line 3: field 'depth' out of range [0, " + std::to_string(kMaxDepth) + "]");

  parts = expect_keyword(reader, "seed", 2);
  const auto seed = parse_int<std::uint64_t>(parts[1], reader.line_number(), "seed");

  std::vector<ExpanderLayer> layers(static_cast<std::size_t>(depth) + 1);
  layers[0].level = 0;
  layers[0].model = ExpanderModel::forced;
  for (int n = 1; n <= depth; ++n) {
    parts = expect_keyword(reader, "level", 4);
    const int line = reader.line_number();
    if (parse_int<int>(parts[1], line, "level") != n)
      throw ParseError("line " + std::to_string(line) + ": expected level " + std::to_string(n));
    if (parts[2] != "edges")
      throw ParseError("line " + std::to_string(line) + ": expected 'edges' keyword");
    const auto count = parse_int<std::int64_t>(parts[3], line, "edges");
    if (count < 0 || count > 3 * level_size(n))
      throw ParseError("line " + std::to_string(line) + ": field 'edges' out of range");

    auto& layer = layers[static_cast<std::size_t>(n)];
    layer.level = n;
    layer.generatorSeed = derive_seed(seed, static_cast<std::uint64_t>(n));
    if (layer.num_vertices() <= 4)
      layer.model = ExpanderModel::forced;
    layer.edges.reserve(static_cast<std::size_t>(count));
    for (std::int64_t k = 0; k < count; ++k) {
      auto pair = split(reader.next());
      const int edgeLine = reader.line_number();
      if (pair.size() != 2)
        throw ParseError("line " + std::to_string(edgeLine) + ": expected 'i j'");
      const auto i = parse_int<std::int64_t>(pair[0], edgeLine, "i");
      const auto j = parse_int<std::int64_t>(pair[1], edgeLine, "j");
      layer.edges.emplace_back(std::min(i, j), std::max(i, j));
    }
    std::sort(layer.edges.begin(), layer.edges.end());
  }

  const std::size_t bodyEnd = reader.offset();
  const auto checksumLine = reader.next();
  if (!checksumLine.starts_with(kChecksumPrefix))
    throw ParseError("line " + std::to_string(reader.line_number()) + ": expected 'sha256 <hex>'");
  const auto expected = checksumLine.substr(kChecksumPrefix.size());
  if (expected != sha256_hex(text.substr(0, bodyEnd)))
    throw ParseError("line " + std::to_string(reader.line_number()) +
                     ": checksum mismatch (file modified or truncated)");
  if (!reader.done())
    throw ParseError("line " + std::to_string(reader.line_number() + 1) +
                     ": trailing content after checksum");

  if (variant == GraphVariant::unbalancedTree) {
    for (int n = 1; n <= depth; ++n)
      if (!layers[static_cast<std::size_t>(n)].edges.empty())
        throw ValidationError("unbalanced tree file lists expander edges at level " +
                              std::to_string(n));
    return LeveledGraph::unbalanced_tree(depth);
  }
  return LeveledGraph::from_layers(depth, seed, std::move(layers));
}

void write_graph_file(const LeveledGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw ArgumentError("cannot write graph file " + path.string());
  out << serialize_graph(g);
}

LeveledGraph read_graph_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ArgumentError("cannot open graph file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return deserialize_graph(buffer.str());
}

} // namespace liouville
