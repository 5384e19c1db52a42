#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "speechtree/tree.hpp"

namespace speechtree {

struct AlignmentError : std::runtime_error {
  AlignmentError(const std::string& what, std::size_t index)
      : std::runtime_error(what + " (index " + std::to_string(index) + ")"), index(index) {}
  std::size_t index;
};

/// Match/gold/predicted counts with percent precision, recall, and F1.
/// The zero-division convention is 0 throughout.
struct MatchCounts {
  std::uint64_t matched = 0;
  std::uint64_t gold = 0;
  std::uint64_t predicted = 0;

  double precision() const {
    return predicted == 0 ? 0.0 : 100.0 * static_cast<double>(matched) / static_cast<double>(predicted);
  }
  double recall() const {
    return gold == 0 ? 0.0 : 100.0 * static_cast<double>(matched) / static_cast<double>(gold);
  }
  double f1() const {
    double p = precision(), r = recall();
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }
};

using BracketScoreReport = MatchCounts;

/// Per-tag counts (matched = correct positions) plus micro accuracy.
struct TagScoreReport {
  std::map<std::string, MatchCounts> per_tag;
  std::uint64_t total_tokens = 0;
  std::uint64_t correct_tokens = 0;

  double accuracy() const {
    return total_tokens == 0
               ? 0.0
               : 100.0 * static_cast<double>(correct_tokens) / static_cast<double>(total_tokens);
  }
};

/// Restart detection counts. Precision is over predicted EDITED_RES spans
/// (a span is correct when it covers at least one annotated restart start);
/// recall is over annotated starts (recalled when covered by any span).
struct RestartScore {
  std::uint64_t matched_spans = 0;
  std::uint64_t predicted_spans = 0;
  std::uint64_t recalled_starts = 0;
  std::uint64_t gold_starts = 0;

  double precision() const {
    return predicted_spans == 0
               ? 0.0
               : 100.0 * static_cast<double>(matched_spans) / static_cast<double>(predicted_spans);
  }
  double recall() const {
    return gold_starts == 0
               ? 0.0
               : 100.0 * static_cast<double>(recalled_starts) / static_cast<double>(gold_starts);
  }
  double f1() const {
    double p = precision(), r = recall();
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }
};

/// Exact-span repetition-run scores bucketed by run length 1, 2, 3, >=4.
struct LengthBucketScores {
  std::array<MatchCounts, 4> buckets;

  static const char* bucket_name(std::size_t i);
  /// Bucket index for a run length (>=1).
  static std::size_t bucket_of(std::size_t run_length);
};

struct DysfluencyReport {
  MatchCounts repetition;  ///< token-level _RE detection
  LengthBucketScores by_length;
  RestartScore restart;
};

struct TaggedToken {
  std::string tag;
  std::string word;

  bool operator==(const TaggedToken&) const = default;
};

using TagSeq = std::vector<std::string>;

/// Position-wise tag comparison over aligned sentences. Distinct tag strings
/// are distinct classes unless strip_re maps `X_RE` to `X` on both sides.
TagScoreReport score_pos(const std::vector<TagSeq>& gold, const std::vector<TagSeq>& pred,
                         bool strip_re = false);

/// Micro PARSEVAL over labeled_spans of aligned tree pairs (multiset
/// intersection). Tree pairs must have equal yields after punctuation
/// deletion.
BracketScoreReport score_brackets(const std::vector<Tree>& gold, const std::vector<Tree>& pred,
                                  const SpanOptions& options = {});

/// Leaf (tag, word) sequence with `_RE` appended (once) to the tag of every
/// leaf dominated by an EDITED_REP node.
std::vector<TaggedToken> propagate_re(const Tree& tree);

/// Token-level detection where positive = tag carries the `_RE` suffix.
MatchCounts score_repetition(const std::vector<TagSeq>& gold, const std::vector<TagSeq>& pred);

/// Exact-match scoring of maximal `_RE` runs, bucketed by gold/pred run
/// length.
LengthBucketScores score_repetition_by_length(const std::vector<TagSeq>& gold,
                                              const std::vector<TagSeq>& pred);

/// Scores predicted EDITED_RES spans against annotated restart starts.
/// Token indices run over each tree's full yield (no punctuation deletion).
RestartScore score_restart(const std::vector<Tree>& pred,
                           const std::vector<std::vector<std::size_t>>& gold_starts);

/// `X_RE` -> `X`; other tags unchanged.
std::string strip_re_suffix(const std::string& tag);

/// Half-up rounding to 2 decimals, the form percentages are reported in.
double round2(double value);

}  // namespace speechtree
