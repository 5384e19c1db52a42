// Acceptance suite: runs every acceptance criterion and prints one line per
// criterion. Exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "speechtree/augment.hpp"
#include "speechtree/eval.hpp"
#include "speechtree/transcripts.hpp"
#include "speechtree/tree.hpp"
#include "test_util.hpp"

using namespace speechtree;
namespace fs = std::filesystem;

namespace {

struct Failure {
  std::string message;
};

void require(bool cond, const std::string& message) {
  if (!cond) throw Failure{message};
}

template <typename T>
void require_eq(const T& got, const T& want, const std::string& what) {
  if (!(got == want)) {
    std::ostringstream os;
    os << what << ": got " << got << ", want " << want;
    throw Failure{os.str()};
  }
}

std::string cli_path() {
#ifdef SPEECHTREE_CLI_PATH
  return SPEECHTREE_CLI_PATH;
#else
  return "./tools/speechtree";
#endif
}

int run_cli(const std::string& args) {
  std::string cmd = cli_path() + " " + args + " 2>/dev/null";
  return std::system(cmd.c_str());
}

fs::path tmp_root() { return fs::temp_directory_path() / "speechtree_acceptance_tmp"; }

const char* kPercentageTree =
    "(S (NP-SBJ (DT The) (NN percentage) (NN change)) "
    "(VP (VBZ is) (PP-PRD (IN since) (NP (NN year-end)))) (. .))";

const char* kPercentageTreeDysfluent =
    "(S (EDITED_REP (DT The=) (NN percentage=) (, ,)) "
    "(NP-SBJ (DT The) (UH um) (NN percentage) (PT chan-) (NN change)) "
    "(VP (UH uh) (VBZ 's) (EDITED_REP (IN since) (NN year-end=)) "
    "(PP-PRD (IN since) (NP (NN year-end)))) (. .))";

// --------------------------------------------------------------------------
// 1. Scripted tree-internal exactness

void criterion_scripted_internal() {
  auto start = std::chrono::steady_clock::now();
  AugmentationConfig cfg;
  auto ds = DecisionSource::scripted({
      // repetition: NP-SBJ hit, length 2, The('=' yes, comma no),
      // percentage('=' yes, comma yes); VP miss; PP-PRD hit, length 2,
      // since(no, no), year-end('=' yes, no); NP miss
      0.10, 0.50, 0.10, 0.90, 0.10, 0.10, 0.90, 0.10, 0.50, 0.90, 0.90, 0.10, 0.90, 0.90,
      // vbz: hit
      0.20,
      // partial: The no, percentage no, change hit with prefix length 4,
      // since no, year-end no
      0.90, 0.90, 0.10, 0.70, 0.90, 0.90,
      // filler: The no, percentage hit index 1 (um), change no,
      // 's hit index 0 (uh), since no, year-end no
      0.90, 0.05, 0.30, 0.90, 0.05, 0.10, 0.90, 0.90,
  });
  auto result = augment_tree(parse_trees(kPercentageTree)[0], cfg, ds);
  require_eq(serialize(result.tree), std::string(kPercentageTreeDysfluent), "scripted tree-internal output");
  require(ds.script_remaining() == 0, "tree-internal script not fully consumed");
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  require(secs < 1.0, "scripted tree-internal run took " + std::to_string(secs) + "s (limit 1s)");
}

// --------------------------------------------------------------------------
// 2. Scripted restart exactness

void criterion_scripted_restart() {
  auto start = std::chrono::steady_clock::now();
  AugmentationConfig cfg;
  Tree t1 = parse_trees(
      "(S (NP-SBJ (DT The) (ADJP (RB closely) (VBN held)) (NNP Hertz) (NNP Corp.)) "
      "(VP (VBD had) (NP (NP (JJ annual) (NN revenue)) "
      "(PP (IN of) (NP (QP (RB about) ($ $) (CD 2) (CD billion)))))) (. .))")[0];
  Tree t2 = parse_trees(
      "(S (NP-SBJ (NNP Hertz) (NNP Equipment)) "
      "(VP (VBZ is) (NP-PRD (DT a) (JJ major) (NN supplier))) (. .))")[0];

  auto ds = DecisionSource::scripted({0.30, 0.10});  // keep 4 words; add (# #)
  auto result = make_restart({t1, t2}, cfg, ds);
  require(ds.script_remaining() == 0, "restart script not fully consumed");

  // The (# #) marker is appended flat, as the last child of EDITED_RES.
  require_eq(serialize(result.tree),
             std::string("(S (EDITED_RES (NP-SBJ (DT The) (ADJP (RB closely) (VBN held)) "
                         "(NNP Hertz)) (# #)) (S (NP-SBJ (NNP Hertz) (NNP Equipment)) "
                         "(VP (VBZ is) (NP-PRD (DT a) (JJ major) (NN supplier))) (. .)))"),
             "scripted restart output");
  std::vector<std::string> want_yield = {"The",   "closely",   "held", "Hertz", "#",
                                         "Hertz", "Equipment", "is",   "a",     "major",
                                         "supplier", "."};
  require(yield_words(result.tree) == want_yield, "restart yield mismatch");

  // the restart prefix is exactly the first tree's first four words plus #
  const Tree& res = result.tree.children[0];
  require(res.label == "EDITED_RES", "EDITED_RES not leftmost");
  require(yield_words(res) == std::vector<std::string>{"The", "closely", "held", "Hertz", "#"},
          "EDITED_RES yield mismatch");
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  require(secs < 1.0, "scripted restart run took " + std::to_string(secs) + "s (limit 1s)");
}

// --------------------------------------------------------------------------
// 3. Round trip over the bundled fixture

void criterion_round_trip() {
  std::string text = testutil::slurp(testutil::data_dir() + "/fixtures.mrg");
  auto trees = parse_trees(text);
  require(trees.size() >= 100, "fixture corpus has fewer than 100 trees");
  std::istringstream lines(text);
  std::string line;
  std::size_t i = 0;
  std::size_t diffs = 0;
  while (std::getline(lines, line)) {
    if (i >= trees.size()) {
      ++diffs;
      break;
    }
    if (serialize(trees[i]) != line) ++diffs;
    if (!(parse_trees(serialize(trees[i]))[0] == trees[i])) ++diffs;
    ++i;
  }
  require_eq(diffs, std::size_t{0}, "round-trip diffs");
  require_eq(i, trees.size(), "tree count vs line count");
}

// --------------------------------------------------------------------------
// 4. Determinism of cmd_augment

void criterion_determinism() {
  fs::path tmp = tmp_root();
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  std::string input = testutil::data_dir() + "/fixtures.mrg";

  auto augment = [&](const std::string& out, int seed, int iterations) {
    std::ostringstream cmd;
    cmd << "augment --input " << input << " --output " << (tmp / out).string() << " --seed "
        << seed << " --epoch 0 --iterations " << iterations;
    require(run_cli(cmd.str()) == 0, "cmd_augment failed");
  };

  // identical command line twice: every produced byte must match
  augment("a.mrg", 17, 1);
  auto a1 = testutil::slurp((tmp / "a.mrg").string());
  auto m1 = testutil::slurp((tmp / "a.mrg.manifest.json").string());
  augment("a.mrg", 17, 1);
  require(testutil::slurp((tmp / "a.mrg").string()) == a1, "same seed produced different bytes");
  require(testutil::slurp((tmp / "a.mrg.manifest.json").string()) == m1,
          "same seed produced different manifests");

  augment("b.mrg", 18, 1);
  auto b = testutil::slurp((tmp / "b.mrg").string());
  require(a1 != b, "different seed produced identical bytes");

  // ten iterations: output count within grouping bounds, drawn category
  // frequencies within 0.05 of the configured distribution
  augment("ten.mrg", 17, 10);
  auto input_trees = parse_trees(testutil::slurp(input));
  auto ten = parse_trees(testutil::slurp((tmp / "ten.mrg").string()));
  std::size_t n = input_trees.size() * 10;
  require(ten.size() >= (n + 2) / 3 && ten.size() <= n,
          "iterations=10 output count " + std::to_string(ten.size()) + " outside bounds");

  AugmentationConfig cfg;
  auto result = augment_corpus(input_trees, cfg, 17, 0, 10);
  require_eq(result.outputs.size(), ten.size(), "library/CLI output count");
  double total = static_cast<double>(result.drawn.total());
  auto freq_ok = [&](std::uint64_t count, double want) {
    return std::fabs(static_cast<double>(count) / total - want) <= 0.05;
  };
  require(freq_ok(result.drawn.none, cfg.grouping_dist.none) &&
              freq_ok(result.drawn.combine2, cfg.grouping_dist.combine2) &&
              freq_ok(result.drawn.combine3, cfg.grouping_dist.combine3) &&
              freq_ok(result.drawn.restart2, cfg.grouping_dist.restart2) &&
              freq_ok(result.drawn.restart3, cfg.grouping_dist.restart3),
          "drawn grouping frequencies off by more than 0.05");
}

// --------------------------------------------------------------------------
// 5. Invertibility, 100 seeds x fixture corpus

void criterion_invertibility() {
  auto trees = testutil::fixture_trees();
  AugmentationConfig cfg;
  std::size_t failures = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto result = augment_corpus(trees, cfg, seed, 0, 1);
    for (const AugmentedTree& out : result.outputs) {
      auto sources = revert_edits(out.tree, out.edits);
      if (sources.size() != out.sources.size()) {
        ++failures;
        continue;
      }
      for (std::size_t i = 0; i < sources.size(); ++i)
        if (!(sources[i] == trees[out.sources[i]])) ++failures;
    }
  }
  require_eq(failures, std::size_t{0}, "invertibility failures");
}

// --------------------------------------------------------------------------
// 6. Rate calibration

void criterion_rates() {
  auto start = std::chrono::steady_clock::now();
  AugmentationConfig cfg;
  Tree proto = parse_trees(
      "(S (NP (DT the) (NN plant)) (VP (VBZ is) (ADJP (JJ green))) (. .))")[0];
  const std::size_t trees_n = 20000;

  // count eligible sites straight off the prototype
  std::size_t filler_sites_per = 0, partial_sites_per = 0, vbz_sites_per = 0;
  for (const Tree* leaf : yield_leaves(proto)) {
    if (cfg.punctuation_tags.count(leaf->label)) continue;
    ++filler_sites_per;
    if (leaf->word.size() >= cfg.min_partial_word_len) ++partial_sites_per;
    if (leaf->label == "VBZ" && leaf->word == "is") ++vbz_sites_per;
  }

  std::size_t filler_hits = 0, partial_hits = 0, vbz_hits = 0;
  for (std::size_t i = 0; i < trees_n; ++i) {
    auto ds_f = DecisionSource::seeded(2024, 0, i);
    filler_hits += apply_filler(proto, cfg, ds_f).edits.size();
    auto ds_p = DecisionSource::seeded(2024, 1, i);
    partial_hits += apply_partial(proto, cfg, ds_p).edits.size();
    auto ds_v = DecisionSource::seeded(2024, 2, i);
    vbz_hits += apply_vbz(proto, cfg, ds_v).edits.size();
  }
  double filler_sites = static_cast<double>(filler_sites_per * trees_n);
  double partial_sites = static_cast<double>(partial_sites_per * trees_n);
  double vbz_sites = static_cast<double>(vbz_sites_per * trees_n);
  require(filler_sites >= 20000 && partial_sites >= 20000 && vbz_sites >= 20000,
          "not enough eligible sites");

  double filler_rate = static_cast<double>(filler_hits) / filler_sites;
  double partial_rate = static_cast<double>(partial_hits) / partial_sites;
  double vbz_rate = static_cast<double>(vbz_hits) / vbz_sites;
  require(filler_rate >= 0.09 && filler_rate <= 0.11,
          "filler rate " + std::to_string(filler_rate) + " outside [0.09, 0.11]");
  require(partial_rate >= 0.185 && partial_rate <= 0.215,
          "partial rate " + std::to_string(partial_rate) + " outside [0.185, 0.215]");
  require(vbz_rate >= 0.47 && vbz_rate <= 0.53,
          "vbz rate " + std::to_string(vbz_rate) + " outside [0.47, 0.53]");

  // grouping: >= 10,000 draws, each category within 0.02
  std::vector<Tree> corpus(trees_n, proto);
  auto ds = DecisionSource::seeded(2024, 3, 0);
  auto grouping = group_corpus(corpus, cfg, ds);
  double draws = static_cast<double>(grouping.drawn.total());
  require(draws >= 10000, "only " + std::to_string(draws) + " grouping draws");
  auto check_freq = [&](std::uint64_t count, double want, const char* name) {
    double got = static_cast<double>(count) / draws;
    require(std::fabs(got - want) <= 0.02,
            std::string(name) + " frequency " + std::to_string(got) + " not within 0.02 of " +
                std::to_string(want));
  };
  check_freq(grouping.drawn.none, cfg.grouping_dist.none, "none");
  check_freq(grouping.drawn.combine2, cfg.grouping_dist.combine2, "combine2");
  check_freq(grouping.drawn.combine3, cfg.grouping_dist.combine3, "combine3");
  check_freq(grouping.drawn.restart2, cfg.grouping_dist.restart2, "restart2");
  check_freq(grouping.drawn.restart3, cfg.grouping_dist.restart3, "restart3");

  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  require(secs < 30.0, "rate calibration took " + std::to_string(secs) + "s (limit 30s)");
}

// --------------------------------------------------------------------------
// 7. evalb oracles

void criterion_evalb() {
  auto gold = parse_trees("(S (NP (DT a) (NN b)) (VP (VB c)))");
  auto pred = parse_trees("(S (NP (DT a)) (VP (NN b) (VB c)))");
  auto r = score_brackets(gold, pred);
  require(round2(r.precision()) == 33.33 && round2(r.recall()) == 33.33 &&
              round2(r.f1()) == 33.33,
          "hand fixture did not score 33.33/33.33/33.33");

  auto same = score_brackets(gold, gold);
  require(same.precision() == 100.0 && same.recall() == 100.0 && same.f1() == 100.0,
          "identical trees did not score 100");

  std::mt19937 rng(404);
  SpanOptions options;
  for (int iter = 0; iter < 1000; ++iter) {
    std::size_t n = 1 + rng() % 6;
    std::vector<Tree> leaves;
    for (std::size_t i = 0; i < n; ++i) leaves.push_back(testutil::random_leaf(rng));
    std::vector<Tree> g{testutil::random_tree_over(leaves, rng)};
    std::vector<Tree> p{testutil::random_tree_over(leaves, rng)};
    auto scored = score_brackets(g, p, options);
    auto oracle = testoracle::intersect_spans(
        testoracle::spans_from_string(serialize(g[0]), options.exclude_preterminals,
                                      options.strip_function_tags, options.punctuation_tags),
        testoracle::spans_from_string(serialize(p[0]), options.exclude_preterminals,
                                      options.strip_function_tags, options.punctuation_tags));
    if (scored.gold != oracle.gold || scored.predicted != oracle.predicted ||
        scored.matched != oracle.matched)
      throw Failure{"oracle disagreement on " + serialize(g[0]) + " vs " + serialize(p[0])};
  }
}

// --------------------------------------------------------------------------
// 8. POS scorer fixtures

void criterion_pos() {
  std::vector<TagSeq> gold = {{"DT", "NN", "UH"}};
  std::vector<TagSeq> pred = {{"DT", "JJ", "UH"}};
  auto r = score_pos(gold, pred);
  require(round2(r.accuracy()) == 66.67, "accuracy != 66.67");
  require(r.per_tag.at("NN").f1() == 0.0, "NN F1 != 0");
  require(r.per_tag.at("JJ").f1() == 0.0 && r.per_tag.at("JJ").predicted == 1 &&
              r.per_tag.at("JJ").gold == 0,
          "JJ counts wrong");

  std::vector<TagSeq> gold_re = {{"DT_RE", "DT"}};
  std::vector<TagSeq> pred_re = {{"DT", "DT"}};
  auto stripped = score_pos(gold_re, pred_re, true);
  require(stripped.accuracy() == 100.0, "strip_re accuracy != 100");
  require(stripped.per_tag.at("DT").f1() == 100.0, "strip_re DT F1 != 100");
}

// --------------------------------------------------------------------------
// 9. Dysfluency scorers

void criterion_dysfluency() {
  std::vector<TagSeq> gold = {{"DT_RE", "NN_RE", "DT", "NN"}};
  std::vector<TagSeq> pred = {{"DT", "NN_RE", "DT_RE", "NN"}};
  auto rep = score_repetition(gold, pred);
  require(round2(rep.precision()) == 50.0 && round2(rep.recall()) == 50.0 &&
              round2(rep.f1()) == 50.0,
          "token-level repetition != 50.00");

  auto contained = score_restart(
      parse_trees("(S (EDITED_RES (DT a) (NN b) (NN c) (NN d)) (NP (NN e)))"), {{2}});
  require(contained.f1() == 100.0, "restart containment case != 100");
  auto missed = score_restart(
      parse_trees("(S (EDITED_RES (DT a) (NN b)) (NP (NN c) (NN d) (NN e) (NN f)))"), {{5}});
  require(missed.precision() == 0.0 && missed.recall() == 0.0, "restart miss case != 0");

  std::vector<TagSeq> g3 = {{"A_RE", "B_RE", "C_RE", "D"}};
  std::vector<TagSeq> p2 = {{"A_RE", "B_RE", "C", "D"}};
  auto buckets = score_repetition_by_length(g3, p2);
  require(buckets.buckets[2].gold == 1 && buckets.buckets[2].recall() == 0.0,
          "bucket-3 recall != 0");
  require(buckets.buckets[1].predicted == 1 && buckets.buckets[1].precision() == 0.0,
          "bucket-2 precision != 0");
  auto exact = score_repetition_by_length(g3, g3);
  require(exact.buckets[2].f1() == 100.0, "bucket-3 exact match != 100");
}

// --------------------------------------------------------------------------
// 10. Transcript ingestion

void criterion_transcripts() {
  auto tokens = parse_transcript_line("the= the pl- um #");
  require(tokens.size() == 5, "token count != 5");
  require(tokens[0].is_repetition && tokens[0].surface == "the", "token 0 not a repetition");
  require(!tokens[1].is_repetition && !tokens[1].is_partial && tokens[1].surface == "the",
          "token 1 flagged");
  require(tokens[2].is_partial && tokens[2].surface == "pl-", "token 2 not partial");
  require(!tokens[3].is_partial && tokens[3].surface == "um", "token 3 flagged");
  require(tokens[4].is_restart_end, "token 4 not restart end");

  std::vector<std::vector<MarkedToken>> sents;
  for (const char* line : {"a b", "a b c d"}) sents.push_back(parse_transcript_line(line));
  auto stats = corpus_stats(sents);
  require(stats.mean_tokens && std::fabs(*stats.mean_tokens - 3.0) < 1e-12, "mean != 3.0");
  require(stats.std_tokens && std::fabs(*stats.std_tokens - 1.0) < 1e-12, "std != 1.0");

  // same checks through the CLI surface
  fs::path tmp = tmp_root();
  fs::create_directories(tmp);
  {
    std::ofstream raw(tmp / "stats_input.txt", std::ios::binary);
    raw << "a b\na b c d\n";
  }
  require(run_cli("tokenize --input " + (tmp / "stats_input.txt").string() + " --output " +
                  (tmp / "tokens.tsv").string()) == 0,
          "cmd tokenize failed");
  require(run_cli("stats --input " + (tmp / "stats_input.txt").string() + " --json > " +
                  (tmp / "stats.json").string()) == 0,
          "cmd stats failed");
  auto j = nlohmann::json::parse(testutil::slurp((tmp / "stats.json").string()));
  require(j["sentences"] == 2 && j["tokens"] == 6, "CLI stats counts wrong");
  require(j["mean_tokens"] == 3.0 && j["std_tokens"] == 1.0, "CLI stats mean/std wrong");
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    const char* name;
    std::function<void()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "scripted augment_tree matches frozen output", criterion_scripted_internal},
      {2, "scripted make_restart matches frozen output", criterion_scripted_restart},
      {3, "round trip over the bundled fixture corpus", criterion_round_trip},
      {4, "cmd_augment determinism and iteration bounds", criterion_determinism},
      {5, "edit-log invertibility, 100 seeds x corpus", criterion_invertibility},
      {6, "rate calibration (filler/partial/vbz/grouping)", criterion_rates},
      {7, "evalb hand fixtures and span-intersection oracle", criterion_evalb},
      {8, "POS scorer hand fixtures", criterion_pos},
      {9, "dysfluency scorer fixtures", criterion_dysfluency},
      {10, "transcript ingestion and stats", criterion_transcripts},
  };

  auto suite_start = std::chrono::steady_clock::now();
  int failed = 0;
  for (const Criterion& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    std::string verdict = "PASS";
    std::string detail;
    try {
      c.run();
    } catch (const Failure& f) {
      verdict = "FAIL";
      detail = f.message;
      ++failed;
    } catch (const std::exception& e) {
      verdict = "FAIL";
      detail = std::string("exception: ") + e.what();
      ++failed;
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2d  %-48s %s (%.2fs)%s%s\n", c.number, c.name, verdict.c_str(), secs,
                detail.empty() ? "" : " -- ", detail.c_str());
  }
  double total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - suite_start).count();
  std::printf("acceptance: %zu/%zu criteria passed in %.1fs\n", criteria.size() - failed,
              criteria.size(), total);
  return failed == 0 ? 0 : 1;
}
