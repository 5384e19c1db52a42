#include "speechtree/eval.hpp"

#include <algorithm>
#include <cmath>

namespace speechtree {

namespace {

bool has_re_suffix(const std::string& tag) {
  return tag.size() > 3 && tag.compare(tag.size() - 3, 3, "_RE") == 0;
}

void check_alignment(std::size_t gold_size, std::size_t pred_size, const char* what) {
  if (gold_size != pred_size)
    throw AlignmentError(std::string(what) + " count mismatch: gold " + std::to_string(gold_size) +
                             " vs pred " + std::to_string(pred_size),
                         0);
}

// Maximal runs of _RE-positive positions as [start, end) pairs.
std::vector<std::pair<std::size_t, std::size_t>> re_runs(const TagSeq& tags) {
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  std::size_t i = 0;
  while (i < tags.size()) {
    if (!has_re_suffix(tags[i])) {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < tags.size() && has_re_suffix(tags[i])) ++i;
    runs.emplace_back(start, i);
  }
  return runs;
}

}  // namespace

std::string strip_re_suffix(const std::string& tag) {
  return has_re_suffix(tag) ? tag.substr(0, tag.size() - 3) : tag;
}

double round2(double value) { return std::floor(value * 100.0 + 0.5) / 100.0; }

const char* LengthBucketScores::bucket_name(std::size_t i) {
  static const char* names[4] = {"1", "2", "3", ">=4"};
  return names[i];
}

std::size_t LengthBucketScores::bucket_of(std::size_t run_length) {
  return run_length >= 4 ? 3 : run_length - 1;
}

TagScoreReport score_pos(const std::vector<TagSeq>& gold, const std::vector<TagSeq>& pred,
                         bool strip_re) {
  check_alignment(gold.size(), pred.size(), "sentence");
  TagScoreReport report;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != pred[s].size())
      throw AlignmentError("token count mismatch in sentence " + std::to_string(s) + ": gold " +
                               std::to_string(gold[s].size()) + " vs pred " +
                               std::to_string(pred[s].size()),
                           s);
    for (std::size_t i = 0; i < gold[s].size(); ++i) {
      std::string g = strip_re ? strip_re_suffix(gold[s][i]) : gold[s][i];
      std::string p = strip_re ? strip_re_suffix(pred[s][i]) : pred[s][i];
      report.total_tokens++;
      report.per_tag[g].gold++;
      report.per_tag[p].predicted++;
      if (g == p) {
        report.correct_tokens++;
        report.per_tag[g].matched++;
      }
    }
  }
  return report;
}

BracketScoreReport score_brackets(const std::vector<Tree>& gold, const std::vector<Tree>& pred,
                                  const SpanOptions& options) {
  check_alignment(gold.size(), pred.size(), "tree");
  BracketScoreReport report;
  for (std::size_t t = 0; t < gold.size(); ++t) {
    auto surviving_words = [&](const Tree& tree) {
      std::vector<std::string> words;
      for (const Tree* leaf : yield_leaves(tree))
        if (!options.punctuation_tags.count(leaf->label)) words.push_back(leaf->word);
      return words;
    };
    if (surviving_words(gold[t]) != surviving_words(pred[t]))
      throw AlignmentError("yield mismatch at tree " + std::to_string(t), t);

    std::map<Span, std::uint64_t> gold_spans;
    for (Span& s : labeled_spans(gold[t], options)) gold_spans[std::move(s)]++;
    std::map<Span, std::uint64_t> pred_spans;
    for (Span& s : labeled_spans(pred[t], options)) pred_spans[std::move(s)]++;
    for (const auto& [span, count] : gold_spans) report.gold += count;
    for (const auto& [span, count] : pred_spans) {
      report.predicted += count;
      auto it = gold_spans.find(span);
      if (it != gold_spans.end()) report.matched += std::min(count, it->second);
    }
  }
  return report;
}

namespace {

void propagate_walk(const Tree& t, bool in_rep, std::vector<TaggedToken>& out) {
  if (t.is_leaf()) {
    std::string tag = t.label;
    if (in_rep && !has_re_suffix(tag)) tag += "_RE";
    out.push_back(TaggedToken{std::move(tag), t.word});
    return;
  }
  bool rep = in_rep || t.label == "EDITED_REP";
  for (const Tree& c : t.children) propagate_walk(c, rep, out);
}

}  // namespace

std::vector<TaggedToken> propagate_re(const Tree& tree) {
  std::vector<TaggedToken> out;
  propagate_walk(tree, false, out);
  return out;
}

MatchCounts score_repetition(const std::vector<TagSeq>& gold, const std::vector<TagSeq>& pred) {
  check_alignment(gold.size(), pred.size(), "sentence");
  MatchCounts counts;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != pred[s].size())
      throw AlignmentError("token count mismatch in sentence " + std::to_string(s), s);
    for (std::size_t i = 0; i < gold[s].size(); ++i) {
      bool g = has_re_suffix(gold[s][i]);
      bool p = has_re_suffix(pred[s][i]);
      if (g) counts.gold++;
      if (p) counts.predicted++;
      if (g && p) counts.matched++;
    }
  }
  return counts;
}

LengthBucketScores score_repetition_by_length(const std::vector<TagSeq>& gold,
                                              const std::vector<TagSeq>& pred) {
  check_alignment(gold.size(), pred.size(), "sentence");
  LengthBucketScores scores;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != pred[s].size())
      throw AlignmentError("token count mismatch in sentence " + std::to_string(s), s);
    auto gruns = re_runs(gold[s]);
    auto pruns = re_runs(pred[s]);
    for (const auto& run : gruns)
      scores.buckets[LengthBucketScores::bucket_of(run.second - run.first)].gold++;
    for (const auto& run : pruns) {
      std::size_t b = LengthBucketScores::bucket_of(run.second - run.first);
      scores.buckets[b].predicted++;
      // Exact span match; an identical run necessarily shares the bucket.
      if (std::find(gruns.begin(), gruns.end(), run) != gruns.end()) scores.buckets[b].matched++;
    }
  }
  return scores;
}

namespace {

void restart_spans(const Tree& t, std::size_t& next,
                   std::vector<std::pair<std::size_t, std::size_t>>& out) {
  if (t.is_leaf()) {
    ++next;
    return;
  }
  std::size_t start = next;
  for (const Tree& c : t.children) restart_spans(c, next, out);
  if (t.label == "EDITED_RES") out.emplace_back(start, next);
}

}  // namespace

RestartScore score_restart(const std::vector<Tree>& pred,
                           const std::vector<std::vector<std::size_t>>& gold_starts) {
  check_alignment(gold_starts.size(), pred.size(), "sentence");
  RestartScore score;
  for (std::size_t s = 0; s < pred.size(); ++s) {
    std::size_t tokens = leaf_count(pred[s]);
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    std::size_t next = 0;
    restart_spans(pred[s], next, spans);
    for (std::size_t start : gold_starts[s]) {
      if (start >= tokens)
        throw AlignmentError("restart start " + std::to_string(start) +
                                 " out of range in sentence " + std::to_string(s),
                             s);
    }
    score.gold_starts += gold_starts[s].size();
    score.predicted_spans += spans.size();
    for (const auto& span : spans) {
      bool hit = std::any_of(gold_starts[s].begin(), gold_starts[s].end(), [&](std::size_t g) {
        return g >= span.first && g < span.second;
      });
      if (hit) score.matched_spans++;
    }
    for (std::size_t g : gold_starts[s]) {
      bool covered = std::any_of(spans.begin(), spans.end(),
                                 [&](const auto& sp) { return g >= sp.first && g < sp.second; });
      if (covered) score.recalled_starts++;
    }
  }
  return score;
}

}  // namespace speechtree
