#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "speechtree/tree.hpp"

namespace speechtree {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Prefix-length odds for 4-character words.
struct PartialLen4 {
  double two = 0.5;
  double three = 0.5;
};

/// Prefix-length odds for words longer than 4 characters.
struct PartialLenGt4 {
  double two = 0.3;
  double three = 0.3;
  double four = 0.4;
};

/// Repeated-span length odds, decoded in the order 1, 2, 3.
struct RepetitionLenDist {
  double one = 1.0 / 3.0;
  double two = 1.0 / 3.0;
  double three = 1.0 / 3.0;
};

/// Corpus grouping odds, decoded in the order listed here.
struct GroupingDist {
  double none = 0.65;
  double combine2 = 0.20;
  double combine3 = 0.10;
  double restart2 = 0.02;
  double restart3 = 0.03;
};

/// Every probability and distribution driving the augmentations. The README
/// documents the JSON mirror. 3-character words always keep their first two
/// characters, so there is no distribution for them.
struct AugmentationConfig {
  double p_partial = 0.20;
  PartialLen4 partial_len_4;
  PartialLenGt4 partial_len_gt4;
  double p_filler = 0.10;
  std::vector<std::string> filler_lexicon = {"uh", "um", "eh", "mhm"};
  double p_repetition = 0.30;
  RepetitionLenDist repetition_len_dist;
  double p_eq_marker = 0.70;
  double p_comma = 0.20;
  double p_vbz = 0.50;
  GroupingDist grouping_dist;
  int restart_keep_min = 3;
  int restart_keep_max = 6;
  double p_hash = 0.50;
  std::set<std::string> punctuation_tags = default_punctuation_tags();
  std::set<std::string> proper_noun_tags = {"NNP", "NNPS"};
  std::size_t min_partial_word_len = 3;

  /// Throws ConfigError on out-of-range probabilities, distributions that do
  /// not sum to 1 (tolerance 1e-9), an empty filler lexicon, inverted restart
  /// bounds, or min_partial_word_len < 3.
  void validate() const;
};

/// Parses the JSON mirror of AugmentationConfig. Absent fields keep their
/// defaults; unknown fields are an error. Validates before returning.
AugmentationConfig parse_config_json(const std::string& text);
AugmentationConfig load_config_file(const std::string& path);

/// Canonical JSON form of the effective config (sorted keys), used for
/// manifest hashing and round-trips.
std::string config_canonical_json(const AugmentationConfig& config);

struct ScriptExhausted : std::logic_error {
  ScriptExhausted() : std::logic_error("scripted decision source exhausted") {}
};

/// A deterministic stream of uniform draws in [0,1). Seeded streams are a
/// pure function of (seed, epoch, stream index), derived with a splitmix64
/// avalanche of the three values; scripted streams replay a fixed list and
/// throw once it runs out (a test misconfiguration).
class DecisionSource {
 public:
  static DecisionSource seeded(std::uint64_t seed, std::uint64_t epoch, std::uint64_t stream);
  static DecisionSource scripted(std::vector<double> draws);

  double next();
  bool chance(double p) { return next() < p; }
  /// Uniform over [0, n).
  std::size_t pick_index(std::size_t n);
  /// Uniform over [lo, hi], both inclusive.
  int pick_int(int lo, int hi);
  /// Cumulative-threshold decode over weights in the given order; the last
  /// entry absorbs rounding slack.
  std::size_t pick_weighted(std::span<const double> weights);

  std::uint64_t draws_consumed() const { return consumed_; }
  /// Scripted draws not yet consumed; 0 for seeded sources.
  std::size_t script_remaining() const;

 private:
  DecisionSource() = default;
  bool scripted_ = false;
  std::uint64_t state_ = 0;
  std::vector<double> script_;
  std::size_t script_pos_ = 0;
  std::uint64_t consumed_ = 0;
};

enum class EditKind { VBZ, REPETITION, PARTIAL, FILLER, COMBINE, RESTART };

/// Bookkeeping for undoing a COMBINE or RESTART assembly.
struct GroupAssembly {
  struct PerTree {
    /// First-leaf word before lowercasing, set only when it changed.
    std::optional<std::string> original_first_word;
    /// Final punctuation chain removed from a non-final tree, with the
    /// child-index path where it must be reinserted.
    std::optional<Tree> removed_final;
    std::vector<std::size_t> removed_final_path;
  };
  int arity = 0;
  /// Input slot that was truncated into EDITED_RES; -1 for COMBINE.
  int truncated_slot = -1;
  std::vector<PerTree> inputs;
  /// Yield positions of leaves this assembly added ((CC and) separators, the
  /// (# #) marker); later passes must not draw for them.
  std::vector<std::size_t> inserted_leaf_ordinals;
};

/// One reversible augmentation step. Insert edits carry the inserted subtree
/// and the child-index path where it landed; VBZ carries the original word;
/// group edits carry the assembly record (and, for RESTART, the designated
/// tree as it was before truncation).
struct Edit {
  EditKind kind;
  std::vector<std::size_t> path;
  std::optional<Tree> payload_tree;
  std::string payload_word;
  std::optional<GroupAssembly> group;
};

using EditLog = std::vector<Edit>;

struct AugmentResult {
  Tree tree;
  EditLog edits;
};

/// Undoes every edit in reverse order. Returns the source tree(s): one tree
/// unless the log ends a COMBINE/RESTART assembly, in which case the original
/// 2 or 3 inputs come back in order.
std::vector<Tree> revert_edits(const Tree& augmented, const EditLog& edits);

// Tree-internal augmentations. Each consumes draws only at eligible sites,
// in pre-order; subtrees under an EDITED_* label are never touched.

/// (VBZ is) -> (VBZ 's) with probability p_vbz.
AugmentResult apply_vbz(Tree tree, const AugmentationConfig& config, DecisionSource& decisions);

/// Inserts a flat EDITED_REP copy of a constituent's first 1..3 leaves as its
/// left sister; copied words optionally take an `=` suffix and a `(, ,)`
/// after them. Eligible constituents are non-root internal nodes outside
/// EDITED_* material.
AugmentResult apply_repetition(Tree tree, const AugmentationConfig& config,
                               DecisionSource& decisions);

/// Inserts a `(PT prefix-)` left sister before eligible words (>= 3
/// characters, non-punctuation tag). Prefix length: 3-char words keep 2
/// characters with no draw; longer words draw from the configured odds.
/// skip_leaf_ordinals marks yield positions (over the input tree) that must
/// not receive a draw; augment_tree uses it to exclude leaves inserted by an
/// earlier pass.
AugmentResult apply_partial(Tree tree, const AugmentationConfig& config, DecisionSource& decisions,
                            const std::set<std::size_t>& skip_leaf_ordinals = {});

/// Inserts a `(UH word)` left sister before eligible leaves (any length,
/// non-punctuation tag), drawing the filler from the lexicon.
AugmentResult apply_filler(Tree tree, const AugmentationConfig& config, DecisionSource& decisions,
                           const std::set<std::size_t>& skip_leaf_ordinals = {});

/// The composite pass: REPETITION, then VBZ, then PARTIAL, then FILLER, one
/// decision stream threaded through in that order. skip_leaf_ordinals marks
/// yield positions of the input tree that were inserted by an earlier step
/// (group separators); they never receive partial or filler draws.
AugmentResult augment_tree(Tree tree, const AugmentationConfig& config, DecisionSource& decisions,
                           const std::set<std::size_t>& skip_leaf_ordinals = {});

/// Joins 2 or 3 trees under a new S with (CC and) between them; non-final
/// trees drop a final punctuation leaf, non-initial trees lowercase the first
/// word unless it is a proper noun. Consumes no draws.
AugmentResult combine_trees(std::vector<Tree> trees, const AugmentationConfig& config);

/// Joins 2 or 3 trees under a new S, truncating the first (arity 2) or middle
/// (arity 3) tree to a drawn prefix of 3..6 words and wrapping its remains in
/// EDITED_RES, optionally ending with a `(# #)` leaf. The truncation target
/// must have at least 2 leaves.
AugmentResult make_restart(std::vector<Tree> trees, const AugmentationConfig& config,
                           DecisionSource& decisions);

enum class GroupKind { None, Combine, Restart };

struct TreeGroup {
  GroupKind kind = GroupKind::None;
  /// Indices into the input corpus, consecutive and in order.
  std::vector<std::size_t> members;
};

/// Tally by drawn or realized category.
struct GroupingTally {
  std::uint64_t none = 0;
  std::uint64_t combine2 = 0;
  std::uint64_t combine3 = 0;
  std::uint64_t restart2 = 0;
  std::uint64_t restart3 = 0;

  std::uint64_t total() const { return none + combine2 + combine3 + restart2 + restart3; }
};

struct GroupingOutcome {
  std::vector<TreeGroup> groups;
  /// Categories as drawn, before end-of-corpus or tiny-tree degradation.
  GroupingTally drawn;
};

/// Scans the corpus left to right, drawing one grouping category per
/// unconsumed tree. Draws that do not fit degrade: 3-tree groups to 2-tree
/// ones, then to none; restarts whose truncation target has < 2 leaves
/// become combines of the same arity.
GroupingOutcome group_corpus(const std::vector<Tree>& trees, const AugmentationConfig& config,
                             DecisionSource& decisions);

struct AugmentedTree {
  Tree tree;
  EditLog edits;
  GroupKind kind = GroupKind::None;
  std::vector<std::size_t> sources;  ///< input indices this output came from
};

struct CorpusAugmentation {
  std::vector<AugmentedTree> outputs;
  GroupingTally drawn;     ///< grouping categories as drawn
  GroupingTally realized;  ///< groups actually built, after degradation
};

/// Runs `iterations` full augmentation passes over the corpus and
/// concatenates the outputs. Grouping for iteration i draws from stream
/// (seed, epoch+i, 0); group g (0-based) builds and augments from stream
/// (seed, epoch+i, g+1), so per-group work is independent and order-free.
CorpusAugmentation augment_corpus(const std::vector<Tree>& trees,
                                  const AugmentationConfig& config, std::uint64_t seed,
                                  std::uint64_t epoch, std::uint64_t iterations);

}  // namespace speechtree
