#pragma once

#include <compare>
#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace speechtree {

/// A constituency tree node. Leaves carry a POS tag in `label` and the token
/// in `word`; internal nodes have a nonempty `children` list and an empty
/// `word`. Labels, tags and words never contain whitespace or parentheses
/// (PTB uses -LRB-/-RRB- tokens for literal brackets).
struct Tree {
  std::string label;
  std::string word;
  std::vector<Tree> children;

  bool is_leaf() const { return children.empty(); }
  bool operator==(const Tree&) const = default;

  static Tree leaf(std::string tag, std::string word);
  static Tree internal(std::string label, std::vector<Tree> children);
};

/// Raised on malformed bracketed input; `offset` is the byte position of the
/// offending token in the original text.
struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t offset);
  std::size_t offset;
};

/// A labeled token span, end-exclusive, over the punctuation-deleted yield.
struct Span {
  std::string label;
  std::size_t start = 0;
  std::size_t end = 0;

  auto operator<=>(const Span&) const = default;
};

struct SpanOptions {
  bool exclude_preterminals = true;
  bool strip_function_tags = true;
  std::set<std::string> punctuation_tags;

  SpanOptions();
};

/// Tags whose leaves are deleted before span computation: the conventional
/// evalb list plus `#`, the restart-end marker.
const std::set<std::string>& default_punctuation_tags();

/// Reads a sequence of bracketed trees. Whitespace (including newlines) is
/// insignificant; a top-level `( ... )` wrapper with no label is stripped.
std::vector<Tree> parse_trees(std::string_view text);

/// Single-line bracketed form with one space between elements.
std::string serialize(const Tree& tree);

/// Left-to-right leaves; pointers remain valid while the tree is unchanged.
std::vector<const Tree*> yield_leaves(const Tree& tree);

/// Left-to-right leaf words.
std::vector<std::string> yield_words(const Tree& tree);

std::size_t leaf_count(const Tree& tree);

/// Label prefix before the first `-` or `=`; labels that start with `-`
/// (-LRB-, -RRB-, -NONE-) are left alone.
std::string strip_function_tag(const std::string& label);

/// Labeled spans over token indices assigned after deleting leaves whose tag
/// is in `punctuation_tags`. Spans that cover no surviving token are dropped.
std::vector<Span> labeled_spans(const Tree& tree, const SpanOptions& options = {});

/// Keeps the first min(keep, |yield|) leaves and deletes every internal node
/// whose yield became empty. keep must be >= 1.
Tree truncate_to_prefix(const Tree& tree, std::size_t keep);

}  // namespace speechtree
