#include "speechtree/augment.hpp"

#include <algorithm>
#include <span>
#include <utility>

namespace speechtree {

namespace {

bool is_edited_label(const std::string& label) {
  return label == "EDITED_REP" || label == "EDITED_RES";
}

// Unicode scalar count (non-continuation bytes).
std::size_t scalar_length(std::string_view s) {
  std::size_t n = 0;
  for (char c : s)
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  return n;
}

// Byte prefix covering the first `count` scalars.
std::string scalar_prefix(std::string_view s, std::size_t count) {
  std::size_t seen = 0;
  std::size_t i = 0;
  for (; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) {
      if (seen == count) break;
      ++seen;
    }
  }
  return std::string(s.substr(0, i));
}

Tree* node_at(Tree& t, std::span<const std::size_t> path) {
  Tree* cur = &t;
  for (std::size_t idx : path) {
    if (idx >= cur->children.size()) throw std::logic_error("edit path out of range");
    cur = &cur->children[idx];
  }
  return cur;
}

void remove_at(Tree& t, std::span<const std::size_t> path) {
  if (path.empty()) throw std::logic_error("edit path cannot point at the root");
  Tree* parent = node_at(t, path.first(path.size() - 1));
  std::size_t idx = path.back();
  if (idx >= parent->children.size()) throw std::logic_error("edit path out of range");
  parent->children.erase(parent->children.begin() + static_cast<std::ptrdiff_t>(idx));
}

Tree& leftmost_leaf(Tree& t) {
  Tree* cur = &t;
  while (!cur->is_leaf()) cur = &cur->children.front();
  return *cur;
}

// Yield position of the node at `path` (the count of leaves strictly left of
// its subtree).
std::size_t leaf_ordinal(const Tree& t, std::span<const std::size_t> path) {
  std::size_t ord = 0;
  const Tree* cur = &t;
  for (std::size_t idx : path) {
    if (idx >= cur->children.size()) throw std::logic_error("edit path out of range");
    for (std::size_t j = 0; j < idx; ++j) ord += leaf_count(cur->children[j]);
    cur = &cur->children[idx];
  }
  return ord;
}

struct VbzPass {
  const AugmentationConfig& cfg;
  DecisionSource& ds;
  EditLog& log;
  std::vector<std::size_t> path;

  void run(Tree& node, bool frozen) {
    if (node.is_leaf()) {
      if (!frozen && node.label == "VBZ" && node.word == "is" && ds.chance(cfg.p_vbz)) {
        log.push_back(Edit{EditKind::VBZ, path, std::nullopt, node.word, std::nullopt});
        node.word = "'s";
      }
      return;
    }
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      path.push_back(i);
      Tree& child = node.children[i];
      run(child, frozen || is_edited_label(child.label));
      path.pop_back();
    }
  }
};

struct RepetitionPass {
  const AugmentationConfig& cfg;
  DecisionSource& ds;
  EditLog& log;
  std::vector<std::size_t> path;

  Tree build_copy(const Tree& xp) {
    const auto& d = cfg.repetition_len_dist;
    const std::array<double, 3> weights{d.one, d.two, d.three};
    std::size_t len = 1 + ds.pick_weighted(weights);
    auto leaves = yield_leaves(xp);
    std::size_t n = std::min(len, leaves.size());
    Tree rep;
    rep.label = "EDITED_REP";
    for (std::size_t j = 0; j < n; ++j) {
      Tree copy = *leaves[j];
      if (ds.chance(cfg.p_eq_marker)) copy.word += "=";
      rep.children.push_back(std::move(copy));
      if (ds.chance(cfg.p_comma)) rep.children.push_back(Tree::leaf(",", ","));
    }
    return rep;
  }

  void run(Tree& node, bool frozen) {
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      if (node.children[i].is_leaf()) continue;
      bool child_edited = is_edited_label(node.children[i].label);
      if (!frozen && !child_edited && ds.chance(cfg.p_repetition)) {
        Tree rep = build_copy(node.children[i]);
        node.children.insert(node.children.begin() + static_cast<std::ptrdiff_t>(i),
                             std::move(rep));
        path.push_back(i);
        log.push_back(Edit{EditKind::REPETITION, path, node.children[i], "", std::nullopt});
        path.pop_back();
        ++i;  // stay on the original constituent; the copy is never revisited
      }
      path.push_back(i);
      Tree& child = node.children[i];
      run(child, frozen || is_edited_label(child.label));
      path.pop_back();
    }
  }
};

// Shared walker for the two leaf-insertion passes. `ordinal` counts every
// pre-existing leaf, so skip sets authored against the input yield line up.
struct LeafInsertPass {
  const AugmentationConfig& cfg;
  DecisionSource& ds;
  EditLog& log;
  const std::set<std::size_t>& skip;
  bool partial = false;  // else filler
  std::vector<std::size_t> path;
  std::size_t ordinal = 0;

  std::size_t prefix_len(std::size_t word_len) {
    if (word_len == 3) return 2;  // fixed rule, no draw
    if (word_len == 4) {
      const std::array<double, 2> w{cfg.partial_len_4.two, cfg.partial_len_4.three};
      return 2 + ds.pick_weighted(w);
    }
    const std::array<double, 3> w{cfg.partial_len_gt4.two, cfg.partial_len_gt4.three,
                                  cfg.partial_len_gt4.four};
    return 2 + ds.pick_weighted(w);
  }

  void run(Tree& node, bool frozen) {
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      if (!node.children[i].is_leaf()) {
        path.push_back(i);
        Tree& child = node.children[i];
        run(child, frozen || is_edited_label(child.label));
        path.pop_back();
        continue;
      }
      std::size_t ord = ordinal++;
      bool eligible = !frozen && !cfg.punctuation_tags.count(node.children[i].label) &&
                      !skip.count(ord);
      std::size_t word_len = 0;
      if (partial && eligible) {
        word_len = scalar_length(node.children[i].word);
        eligible = word_len >= cfg.min_partial_word_len;
      }
      if (!eligible) continue;
      double p = partial ? cfg.p_partial : cfg.p_filler;
      if (!ds.chance(p)) continue;
      Tree inserted = partial
          ? Tree::leaf("PT", scalar_prefix(node.children[i].word, prefix_len(word_len)) + "-")
          : Tree::leaf("UH", cfg.filler_lexicon[ds.pick_index(cfg.filler_lexicon.size())]);
      node.children.insert(node.children.begin() + static_cast<std::ptrdiff_t>(i),
                           std::move(inserted));
      path.push_back(i);
      log.push_back(Edit{partial ? EditKind::PARTIAL : EditKind::FILLER, path, node.children[i],
                         "", std::nullopt});
      path.pop_back();
      ++i;  // skip the inserted leaf; the original one has been handled
    }
  }
};

// Removes a tree's final leaf when its tag is punctuation, pruning ancestors
// that would be left childless. Records what was cut and where for undo.
void drop_final_punct(Tree& t, const AugmentationConfig& cfg, GroupAssembly::PerTree& rec) {
  if (t.is_leaf() || leaf_count(t) < 2) return;
  std::vector<std::size_t> path;
  const Tree* cur = &t;
  while (!cur->is_leaf()) {
    path.push_back(cur->children.size() - 1);
    cur = &cur->children.back();
  }
  if (!cfg.punctuation_tags.count(cur->label)) return;
  // Move the cut up while the parent would be emptied; never cut the root.
  std::size_t depth = path.size();
  while (depth > 1) {
    Tree* parent = node_at(t, std::span(path).first(depth - 1));
    if (parent->children.size() > 1) break;
    --depth;
  }
  Tree* parent = node_at(t, std::span(path).first(depth - 1));
  std::size_t idx = path[depth - 1];
  rec.removed_final = std::move(parent->children[idx]);
  rec.removed_final_path.assign(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(depth));
  parent->children.erase(parent->children.begin() + static_cast<std::ptrdiff_t>(idx));
}

// Lowercases the first character of the first word unless the leaf is a
// proper noun. ASCII only; transcripts are English.
void lowercase_first(Tree& t, const AugmentationConfig& cfg, GroupAssembly::PerTree& rec) {
  Tree& leaf = leftmost_leaf(t);
  if (cfg.proper_noun_tags.count(leaf.label)) return;
  if (leaf.word.empty()) return;
  char c = leaf.word.front();
  if (c >= 'A' && c <= 'Z') {
    rec.original_first_word = leaf.word;
    leaf.word.front() = static_cast<char>(c - 'A' + 'a');
  }
}

void restore_group_tree(Tree& t, const GroupAssembly::PerTree& rec) {
  if (rec.removed_final) {
    Tree* parent = node_at(t, std::span(rec.removed_final_path)
                                  .first(rec.removed_final_path.size() - 1));
    parent->children.insert(
        parent->children.begin() +
            static_cast<std::ptrdiff_t>(rec.removed_final_path.back()),
        *rec.removed_final);
  }
  if (rec.original_first_word) leftmost_leaf(t).word = *rec.original_first_word;
}

}  // namespace

AugmentResult apply_vbz(Tree tree, const AugmentationConfig& cfg, DecisionSource& decisions) {
  EditLog log;
  VbzPass pass{cfg, decisions, log, {}};
  pass.run(tree, is_edited_label(tree.label));
  return {std::move(tree), std::move(log)};
}

AugmentResult apply_repetition(Tree tree, const AugmentationConfig& cfg,
                               DecisionSource& decisions) {
  EditLog log;
  if (!tree.is_leaf()) {
    RepetitionPass pass{cfg, decisions, log, {}};
    pass.run(tree, is_edited_label(tree.label));
  }
  return {std::move(tree), std::move(log)};
}

AugmentResult apply_partial(Tree tree, const AugmentationConfig& cfg, DecisionSource& decisions,
                            const std::set<std::size_t>& skip_leaf_ordinals) {
  EditLog log;
  if (!tree.is_leaf()) {  // a bare-leaf root has no place for a left sister
    LeafInsertPass pass{cfg, decisions, log, skip_leaf_ordinals, /*partial=*/true, {}, 0};
    pass.run(tree, is_edited_label(tree.label));
  }
  return {std::move(tree), std::move(log)};
}

AugmentResult apply_filler(Tree tree, const AugmentationConfig& cfg, DecisionSource& decisions,
                           const std::set<std::size_t>& skip_leaf_ordinals) {
  EditLog log;
  if (!tree.is_leaf()) {
    LeafInsertPass pass{cfg, decisions, log, skip_leaf_ordinals, /*partial=*/false, {}, 0};
    pass.run(tree, is_edited_label(tree.label));
  }
  return {std::move(tree), std::move(log)};
}

namespace {

// Remaps yield ordinals across one pass's insertions. Edits are recorded in
// traversal order, so their paths are valid in the post-pass tree and their
// positions ascend.
std::set<std::size_t> advance_ordinals(const std::set<std::size_t>& ordinals,
                                       const Tree& post_tree, const EditLog& pass_edits) {
  if (ordinals.empty()) return ordinals;
  std::vector<std::pair<std::size_t, std::size_t>> inserts;  // (post position, leaf count)
  for (const Edit& e : pass_edits) {
    if (e.kind == EditKind::REPETITION || e.kind == EditKind::PARTIAL ||
        e.kind == EditKind::FILLER)
      inserts.emplace_back(leaf_ordinal(post_tree, e.path), leaf_count(*e.payload_tree));
  }
  std::set<std::size_t> out;
  for (std::size_t o : ordinals) {
    std::size_t shifted = o;
    std::size_t cum = 0;
    for (auto [post_start, len] : inserts) {
      if (post_start - cum > o) break;  // insertion past this leaf in pre-pass terms
      shifted += len;
      cum += len;
    }
    out.insert(shifted);
  }
  return out;
}

}  // namespace

AugmentResult augment_tree(Tree tree, const AugmentationConfig& cfg, DecisionSource& decisions,
                           const std::set<std::size_t>& skip_leaf_ordinals) {
  AugmentResult rep = apply_repetition(std::move(tree), cfg, decisions);
  std::set<std::size_t> skip = advance_ordinals(skip_leaf_ordinals, rep.tree, rep.edits);
  AugmentResult vbz = apply_vbz(std::move(rep.tree), cfg, decisions);
  AugmentResult partial = apply_partial(std::move(vbz.tree), cfg, decisions, skip);

  // Words inserted by the partial pass never host a filler either.
  skip = advance_ordinals(skip, partial.tree, partial.edits);
  for (const Edit& e : partial.edits)
    if (e.kind == EditKind::PARTIAL) skip.insert(leaf_ordinal(partial.tree, e.path));
  AugmentResult filler = apply_filler(std::move(partial.tree), cfg, decisions, skip);

  EditLog log = std::move(rep.edits);
  log.insert(log.end(), std::make_move_iterator(vbz.edits.begin()),
             std::make_move_iterator(vbz.edits.end()));
  log.insert(log.end(), std::make_move_iterator(partial.edits.begin()),
             std::make_move_iterator(partial.edits.end()));
  log.insert(log.end(), std::make_move_iterator(filler.edits.begin()),
             std::make_move_iterator(filler.edits.end()));
  return {std::move(filler.tree), std::move(log)};
}

AugmentResult combine_trees(std::vector<Tree> trees, const AugmentationConfig& cfg) {
  if (trees.size() < 2 || trees.size() > 3)
    throw std::invalid_argument("combine_trees: need 2 or 3 trees");
  GroupAssembly assembly;
  assembly.arity = static_cast<int>(trees.size());
  assembly.inputs.resize(trees.size());
  for (std::size_t i = 0; i < trees.size(); ++i) {
    if (i + 1 < trees.size()) drop_final_punct(trees[i], cfg, assembly.inputs[i]);
    if (i > 0) lowercase_first(trees[i], cfg, assembly.inputs[i]);
  }
  std::vector<Tree> children;
  std::size_t ordinal = 0;
  for (std::size_t i = 0; i < trees.size(); ++i) {
    if (i > 0) {
      children.push_back(Tree::leaf("CC", "and"));
      assembly.inserted_leaf_ordinals.push_back(ordinal++);
    }
    ordinal += leaf_count(trees[i]);
    children.push_back(std::move(trees[i]));
  }
  Tree root = Tree::internal("S", std::move(children));
  Edit edit{EditKind::COMBINE, {}, std::nullopt, "", std::move(assembly)};
  EditLog log;
  log.push_back(std::move(edit));
  return {std::move(root), std::move(log)};
}

AugmentResult make_restart(std::vector<Tree> trees, const AugmentationConfig& cfg,
                           DecisionSource& decisions) {
  if (trees.size() < 2 || trees.size() > 3)
    throw std::invalid_argument("make_restart: need 2 or 3 trees");
  const std::size_t target = trees.size() == 2 ? 0 : 1;
  const std::size_t total = leaf_count(trees[target]);
  if (total < 2) throw std::invalid_argument("make_restart: truncation target needs >= 2 leaves");

  GroupAssembly assembly;
  assembly.arity = static_cast<int>(trees.size());
  assembly.truncated_slot = static_cast<int>(target);
  assembly.inputs.resize(trees.size());
  Tree original = trees[target];

  int k = decisions.pick_int(cfg.restart_keep_min, cfg.restart_keep_max);
  std::size_t keep = std::min(static_cast<std::size_t>(k), total - 1);
  Tree truncated = truncate_to_prefix(trees[target], keep);

  Tree res;
  res.label = "EDITED_RES";
  if (truncated.is_leaf()) {
    res.children.push_back(std::move(truncated));
  } else {
    res.children = std::move(truncated.children);  // the old root label is discarded
  }
  bool hash_added = decisions.chance(cfg.p_hash);
  if (hash_added) res.children.push_back(Tree::leaf("#", "#"));

  std::vector<Tree> slots;
  if (trees.size() == 2) {
    slots.push_back(std::move(res));
    slots.push_back(std::move(trees[1]));
  } else {
    slots.push_back(std::move(trees[0]));
    slots.push_back(std::move(res));
    slots.push_back(std::move(trees[2]));
  }
  GroupAssembly::PerTree unused;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    bool is_res = i == target;
    if (!is_res && i + 1 < slots.size()) drop_final_punct(slots[i], cfg, assembly.inputs[i]);
    // The truncated slot's undo record is the stored original tree, so its
    // lowercase change needs no bookkeeping.
    if (i > 0) lowercase_first(slots[i], cfg, is_res ? unused : assembly.inputs[i]);
  }
  if (hash_added) {
    std::size_t ord = trees.size() == 2 ? keep : leaf_count(slots[0]) + keep;
    assembly.inserted_leaf_ordinals.push_back(ord);
  }

  Tree root = Tree::internal("S", std::move(slots));
  Edit edit{EditKind::RESTART, {}, std::move(original), "", std::move(assembly)};
  EditLog log;
  log.push_back(std::move(edit));
  return {std::move(root), std::move(log)};
}

std::vector<Tree> revert_edits(const Tree& augmented, const EditLog& edits) {
  Tree t = augmented;
  for (auto it = edits.rbegin(); it != edits.rend(); ++it) {
    const Edit& e = *it;
    switch (e.kind) {
      case EditKind::VBZ:
        node_at(t, e.path)->word = e.payload_word;
        break;
      case EditKind::REPETITION:
      case EditKind::PARTIAL:
      case EditKind::FILLER: {
        if (e.payload_tree && *node_at(t, e.path) != *e.payload_tree)
          throw std::logic_error("edit log does not match the tree");
        remove_at(t, e.path);
        break;
      }
      case EditKind::COMBINE: {
        if (std::next(it) != edits.rend())
          throw std::logic_error("group edit must be the first entry of a log");
        const GroupAssembly& a = *e.group;
        std::size_t expected = 2 * static_cast<std::size_t>(a.arity) - 1;
        if (t.children.size() != expected)
          throw std::logic_error("edit log does not match the tree");
        std::vector<Tree> sources;
        for (int i = 0; i < a.arity; ++i) {
          Tree part = std::move(t.children[2 * static_cast<std::size_t>(i)]);
          restore_group_tree(part, a.inputs[static_cast<std::size_t>(i)]);
          sources.push_back(std::move(part));
        }
        return sources;
      }
      case EditKind::RESTART: {
        if (std::next(it) != edits.rend())
          throw std::logic_error("group edit must be the first entry of a log");
        const GroupAssembly& a = *e.group;
        if (t.children.size() != static_cast<std::size_t>(a.arity))
          throw std::logic_error("edit log does not match the tree");
        std::vector<Tree> sources;
        for (int i = 0; i < a.arity; ++i) {
          if (i == a.truncated_slot) {
            sources.push_back(*e.payload_tree);
          } else {
            Tree part = std::move(t.children[static_cast<std::size_t>(i)]);
            restore_group_tree(part, a.inputs[static_cast<std::size_t>(i)]);
            sources.push_back(std::move(part));
          }
        }
        return sources;
      }
    }
  }
  std::vector<Tree> sources;
  sources.push_back(std::move(t));
  return sources;
}

GroupingOutcome group_corpus(const std::vector<Tree>& trees, const AugmentationConfig& cfg,
                             DecisionSource& decisions) {
  GroupingOutcome out;
  const auto& gd = cfg.grouping_dist;
  const std::array<double, 5> weights{gd.none, gd.combine2, gd.combine3, gd.restart2,
                                      gd.restart3};
  std::size_t pos = 0;
  while (pos < trees.size()) {
    std::size_t cat = decisions.pick_weighted(weights);
    GroupKind kind = GroupKind::None;
    std::size_t arity = 1;
    switch (cat) {
      case 0: out.drawn.none++; break;
      case 1: out.drawn.combine2++; kind = GroupKind::Combine; arity = 2; break;
      case 2: out.drawn.combine3++; kind = GroupKind::Combine; arity = 3; break;
      case 3: out.drawn.restart2++; kind = GroupKind::Restart; arity = 2; break;
      case 4: out.drawn.restart3++; kind = GroupKind::Restart; arity = 3; break;
      default: break;
    }
    std::size_t avail = trees.size() - pos;
    if (arity > avail) arity = avail >= 2 ? 2 : 1;
    if (arity == 1) kind = GroupKind::None;
    if (kind == GroupKind::Restart) {
      std::size_t target = pos + (arity == 2 ? 0 : 1);
      if (leaf_count(trees[target]) < 2) kind = GroupKind::Combine;
    }
    TreeGroup group;
    group.kind = kind;
    for (std::size_t i = 0; i < arity; ++i) group.members.push_back(pos + i);
    out.groups.push_back(std::move(group));
    pos += arity;
  }
  return out;
}

CorpusAugmentation augment_corpus(const std::vector<Tree>& trees, const AugmentationConfig& cfg,
                                  std::uint64_t seed, std::uint64_t epoch,
                                  std::uint64_t iterations) {
  if (iterations == 0) throw std::invalid_argument("augment_corpus: iterations must be >= 1");
  cfg.validate();
  CorpusAugmentation out;
  auto add = [](GroupingTally& into, const GroupingTally& from) {
    into.none += from.none;
    into.combine2 += from.combine2;
    into.combine3 += from.combine3;
    into.restart2 += from.restart2;
    into.restart3 += from.restart3;
  };
  for (std::uint64_t it = 0; it < iterations; ++it) {
    DecisionSource grouping_stream = DecisionSource::seeded(seed, epoch + it, 0);
    GroupingOutcome grouping = group_corpus(trees, cfg, grouping_stream);
    add(out.drawn, grouping.drawn);
    for (std::size_t g = 0; g < grouping.groups.size(); ++g) {
      const TreeGroup& group = grouping.groups[g];
      DecisionSource stream = DecisionSource::seeded(seed, epoch + it, g + 1);
      AugmentResult built;
      switch (group.kind) {
        case GroupKind::None:
          built.tree = trees[group.members.front()];
          out.realized.none++;
          break;
        case GroupKind::Combine: {
          std::vector<Tree> members;
          for (std::size_t m : group.members) members.push_back(trees[m]);
          built = combine_trees(std::move(members), cfg);
          (group.members.size() == 2 ? out.realized.combine2 : out.realized.combine3)++;
          break;
        }
        case GroupKind::Restart: {
          std::vector<Tree> members;
          for (std::size_t m : group.members) members.push_back(trees[m]);
          built = make_restart(std::move(members), cfg, stream);
          (group.members.size() == 2 ? out.realized.restart2 : out.realized.restart3)++;
          break;
        }
      }
      std::set<std::size_t> skip;
      if (!built.edits.empty() && built.edits.front().group) {
        const auto& ords = built.edits.front().group->inserted_leaf_ordinals;
        skip.insert(ords.begin(), ords.end());
      }
      AugmentResult augmented = augment_tree(std::move(built.tree), cfg, stream, skip);
      EditLog log = std::move(built.edits);
      log.insert(log.end(), std::make_move_iterator(augmented.edits.begin()),
                 std::make_move_iterator(augmented.edits.end()));
      out.outputs.push_back(
          AugmentedTree{std::move(augmented.tree), std::move(log), group.kind, group.members});
    }
  }
  return out;
}

}  // namespace speechtree
