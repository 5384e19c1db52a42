#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "speechtree/tree.hpp"

namespace testutil {

inline std::string data_dir() {
#ifdef SPEECHTREE_TEST_DATA_DIR
  return SPEECHTREE_TEST_DATA_DIR;
#else
  return "tests/data";
#endif
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::vector<speechtree::Tree> fixture_trees() {
  return speechtree::parse_trees(slurp(data_dir() + "/fixtures.mrg"));
}

// ---------------------------------------------------------------------------
// Random tree generation for property tests. mt19937 is fully specified, so
// the sequences (and therefore the tests) are reproducible everywhere.

inline speechtree::Tree random_leaf(std::mt19937& rng, bool allow_punct = true) {
  static const std::vector<std::pair<std::string, std::vector<std::string>>> lexicon = {
      {"DT", {"the", "a", "this"}},
      {"NN", {"report", "market", "audit", "year-end", "profit"}},
      {"NNS", {"analysts", "workers"}},
      {"NNP", {"Meridian", "Hartwell"}},
      {"VBZ", {"is", "says", "owns"}},
      {"VBD", {"rose", "fell"}},
      {"JJ", {"strong", "new", "broad"}},
      {"IN", {"in", "of", "since"}},
      {"RB", {"sharply", "nearly"}},
      {"UH", {"uh", "um"}},
  };
  static const std::vector<std::pair<std::string, std::string>> punct = {
      {".", "."}, {",", ","}, {":", ";"}, {"``", "``"}, {"''", "''"}, {"#", "#"},
  };
  if (allow_punct && rng() % 8 == 0) {
    const auto& p = punct[rng() % punct.size()];
    return speechtree::Tree::leaf(p.first, p.second);
  }
  const auto& entry = lexicon[rng() % lexicon.size()];
  return speechtree::Tree::leaf(entry.first, entry.second[rng() % entry.second.size()]);
}

// Random bracketing over the given leaves (in order).
inline speechtree::Tree random_tree_over(std::vector<speechtree::Tree> leaves,
                                         std::mt19937& rng) {
  static const std::vector<std::string> labels = {"S",  "NP", "NP-SBJ", "VP",  "PP",
                                                  "PP-PRD", "ADJP", "SBAR", "FRAG", "X"};
  if (leaves.size() == 1) {
    if (rng() % 2 == 0) return std::move(leaves.front());
    std::vector<speechtree::Tree> child;
    child.push_back(std::move(leaves.front()));
    return speechtree::Tree::internal(labels[rng() % labels.size()], std::move(child));
  }
  // Split into 2..4 consecutive parts and recurse.
  std::size_t parts = 2 + rng() % std::min<std::size_t>(3, leaves.size() - 1);
  std::vector<std::size_t> cuts = {0, leaves.size()};
  while (cuts.size() < parts + 1) {
    std::size_t c = 1 + rng() % (leaves.size() - 1);
    bool dup = false;
    for (std::size_t existing : cuts) dup = dup || existing == c;
    if (!dup) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<speechtree::Tree> children;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    std::vector<speechtree::Tree> slice(
        std::make_move_iterator(leaves.begin() + static_cast<std::ptrdiff_t>(cuts[i])),
        std::make_move_iterator(leaves.begin() + static_cast<std::ptrdiff_t>(cuts[i + 1])));
    if (slice.size() == 1) {
      children.push_back(std::move(slice.front()));
    } else {
      children.push_back(random_tree_over(std::move(slice), rng));
    }
  }
  return speechtree::Tree::internal(labels[rng() % labels.size()], std::move(children));
}

inline speechtree::Tree random_sentence(std::mt19937& rng, std::size_t max_tokens,
                                        bool allow_punct = true) {
  std::size_t n = 1 + rng() % max_tokens;
  std::vector<speechtree::Tree> leaves;
  for (std::size_t i = 0; i < n; ++i) leaves.push_back(random_leaf(rng, allow_punct));
  std::vector<speechtree::Tree> wrapped;
  wrapped.push_back(random_tree_over(std::move(leaves), rng));
  if (wrapped.front().is_leaf()) return speechtree::Tree::internal("S", std::move(wrapped));
  return std::move(wrapped.front());
}

}  // namespace testutil
