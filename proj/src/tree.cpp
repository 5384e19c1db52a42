#include "speechtree/tree.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

namespace speechtree {

namespace {

bool valid_atom(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c == '(' || c == ')' || c == ' ' || c == '\t' || c == '\n' || c == '\r') return false;
  }
  return true;
}

}  // namespace

Tree Tree::leaf(std::string tag, std::string word) {
  if (!valid_atom(tag)) throw std::invalid_argument("invalid leaf tag: '" + tag + "'");
  if (!valid_atom(word)) throw std::invalid_argument("invalid leaf word: '" + word + "'");
  Tree t;
  t.label = std::move(tag);
  t.word = std::move(word);
  return t;
}

Tree Tree::internal(std::string label, std::vector<Tree> children) {
  if (!valid_atom(label)) throw std::invalid_argument("invalid node label: '" + label + "'");
  if (children.empty()) throw std::invalid_argument("internal node '" + label + "' needs children");
  Tree t;
  t.label = std::move(label);
  t.children = std::move(children);
  return t;
}

ParseError::ParseError(const std::string& what, std::size_t offset)
    : std::runtime_error(what + " at byte " + std::to_string(offset)), offset(offset) {}

const std::set<std::string>& default_punctuation_tags() {
  static const std::set<std::string> tags = {".", ",", ":", "``", "''", "-LRB-", "-RRB-", "#"};
  return tags;
}

SpanOptions::SpanOptions() : punctuation_tags(default_punctuation_tags()) {}

namespace {

struct Frame {
  std::string label;
  bool has_label = false;
  std::vector<Tree> children;
  std::vector<std::string> words;
  std::size_t open_offset = 0;
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

// Closes a frame into a node; unlabeled frames are only legal as the
// top-level wrapper, which the caller handles.
Tree close_frame(Frame&& f, std::size_t close_offset) {
  if (!f.words.empty() && !f.children.empty())
    throw ParseError("node '" + f.label + "' mixes words and subtrees", close_offset);
  if (f.words.size() > 1)
    throw ParseError("leaf '" + f.label + "' has " + std::to_string(f.words.size()) + " words",
                     close_offset);
  if (f.words.size() == 1) return Tree::leaf(std::move(f.label), std::move(f.words.front()));
  if (f.children.empty()) throw ParseError("empty node", f.open_offset);
  return Tree::internal(std::move(f.label), std::move(f.children));
}

}  // namespace

std::vector<Tree> parse_trees(std::string_view text) {
  std::vector<Tree> trees;
  std::vector<Frame> stack;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    char c = text[i];
    if (is_space(c)) {
      ++i;
    } else if (c == '(') {
      Frame f;
      f.open_offset = i;
      stack.push_back(std::move(f));
      ++i;
    } else if (c == ')') {
      if (stack.empty()) throw ParseError("unbalanced ')'", i);
      Frame f = std::move(stack.back());
      stack.pop_back();
      if (!f.has_label) {
        // Wrapper form "( tree )": accepted at the top level only.
        if (!stack.empty())
          throw ParseError("missing node label", f.open_offset);
        if (f.children.size() != 1 || !f.words.empty())
          throw ParseError("unlabeled wrapper must contain exactly one tree", f.open_offset);
        trees.push_back(std::move(f.children.front()));
      } else {
        Tree node = close_frame(std::move(f), i);
        if (stack.empty()) {
          trees.push_back(std::move(node));
        } else {
          stack.back().children.push_back(std::move(node));
        }
      }
      ++i;
    } else {
      std::size_t start = i;
      while (i < n && !is_space(text[i]) && text[i] != '(' && text[i] != ')') ++i;
      std::string atom(text.substr(start, i - start));
      if (stack.empty()) throw ParseError("token outside parentheses", start);
      Frame& top = stack.back();
      if (!top.has_label && top.children.empty() && top.words.empty()) {
        top.label = std::move(atom);
        top.has_label = true;
      } else {
        top.words.push_back(std::move(atom));
      }
    }
  }
  if (!stack.empty()) throw ParseError("unclosed '('", stack.back().open_offset);
  return trees;
}

namespace {

void serialize_into(const Tree& t, std::string& out) {
  out += '(';
  out += t.label;
  if (t.is_leaf()) {
    out += ' ';
    out += t.word;
  } else {
    for (const Tree& c : t.children) {
      out += ' ';
      serialize_into(c, out);
    }
  }
  out += ')';
}

}  // namespace

std::string serialize(const Tree& tree) {
  std::string out;
  serialize_into(tree, out);
  return out;
}

namespace {

void collect_leaves(const Tree& t, std::vector<const Tree*>& out) {
  if (t.is_leaf()) {
    out.push_back(&t);
    return;
  }
  for (const Tree& c : t.children) collect_leaves(c, out);
}

}  // namespace

std::vector<const Tree*> yield_leaves(const Tree& tree) {
  std::vector<const Tree*> out;
  collect_leaves(tree, out);
  return out;
}

std::vector<std::string> yield_words(const Tree& tree) {
  std::vector<std::string> out;
  for (const Tree* leaf : yield_leaves(tree)) out.push_back(leaf->word);
  return out;
}

std::size_t leaf_count(const Tree& tree) {
  if (tree.is_leaf()) return 1;
  std::size_t n = 0;
  for (const Tree& c : tree.children) n += leaf_count(c);
  return n;
}

std::string strip_function_tag(const std::string& label) {
  if (label.empty() || label.front() == '-') return label;
  std::size_t cut = label.find_first_of("-=");
  if (cut == std::string::npos) return label;
  return label.substr(0, cut);
}

namespace {

void span_walk(const Tree& t, const SpanOptions& o, std::size_t& next, std::vector<Span>& out) {
  if (t.is_leaf()) {
    if (o.punctuation_tags.count(t.label)) return;
    if (!o.exclude_preterminals) {
      std::string label = o.strip_function_tags ? strip_function_tag(t.label) : t.label;
      out.push_back(Span{std::move(label), next, next + 1});
    }
    ++next;
    return;
  }
  std::string label = o.strip_function_tags ? strip_function_tag(t.label) : t.label;
  std::size_t slot = out.size();
  out.push_back(Span{std::move(label), next, next});
  for (const Tree& c : t.children) span_walk(c, o, next, out);
  out[slot].end = next;
}

}  // namespace

std::vector<Span> labeled_spans(const Tree& tree, const SpanOptions& options) {
  std::vector<Span> out;
  std::size_t next = 0;
  span_walk(tree, options, next, out);
  std::erase_if(out, [](const Span& s) { return s.start >= s.end; });
  return out;
}

namespace {

std::optional<Tree> truncate_walk(const Tree& t, std::size_t& budget) {
  if (budget == 0) return std::nullopt;
  if (t.is_leaf()) {
    --budget;
    return t;
  }
  Tree out;
  out.label = t.label;
  for (const Tree& c : t.children) {
    if (budget == 0) break;
    if (auto kept = truncate_walk(c, budget)) out.children.push_back(std::move(*kept));
  }
  if (out.children.empty()) return std::nullopt;
  return out;
}

}  // namespace

Tree truncate_to_prefix(const Tree& tree, std::size_t keep) {
  if (keep == 0) throw std::invalid_argument("truncate_to_prefix: keep must be >= 1");
  std::size_t budget = keep;
  return *truncate_walk(tree, budget);
}

}  // namespace speechtree
