#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "speechtree/augment.hpp"
#include "speechtree/eval.hpp"
#include "speechtree/transcripts.hpp"
#include "speechtree/tree.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr std::uint64_t kDefaultSeed = 42;  // fixed, never wall-clock
constexpr const char* kConfigEnvVar = "SPEECHTREE_CONFIG";

using nlohmann::json;
using namespace speechtree;

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << content;
  if (!out) throw DataError("write failed: " + path);
}

std::vector<Tree> load_trees(const std::string& path) {
  try {
    return parse_trees(read_file(path));
  } catch (const ParseError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::vector<TagSeq> load_tag_file(const std::string& path) {
  auto sentences = read_tagged_file(read_file(path));
  std::vector<TagSeq> tags;
  for (const auto& sent : sentences) {
    TagSeq seq;
    for (const auto& tok : sent) seq.push_back(tok.tag);
    tags.push_back(std::move(seq));
  }
  return tags;
}

// One line per sentence, space-separated 0-based token indices; an empty
// line means no restart starts.
std::vector<std::vector<std::size_t>> load_restart_starts(const std::string& path) {
  std::vector<std::vector<std::size_t>> out;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::size_t> starts;
    std::istringstream fields(line);
    std::string field;
    while (fields >> field) {
      try {
        starts.push_back(std::stoull(field));
      } catch (const std::exception&) {
        throw DataError(path + ": bad token index '" + field + "'");
      }
    }
    out.push_back(std::move(starts));
  }
  return out;
}

std::string fnv1a64_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

AugmentationConfig resolve_config(const std::string& flag_path, std::string& used_path) {
  used_path = flag_path;
  if (used_path.empty()) {
    if (const char* env = std::getenv(kConfigEnvVar)) used_path = env;
  }
  if (used_path.empty()) return AugmentationConfig{};
  return load_config_file(used_path);
}

json counts_json(const MatchCounts& c) {
  return json{{"matched", c.matched},
              {"gold", c.gold},
              {"predicted", c.predicted},
              {"precision", round2(c.precision())},
              {"recall", round2(c.recall())},
              {"f1", round2(c.f1())}};
}

// ---------------------------------------------------------------------------
// augment

struct AugmentArgs {
  std::string input, output, config;
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t epoch = 0;
  std::uint64_t iterations = 1;
};

int run_augment(const AugmentArgs& args) {
  std::string config_path;
  AugmentationConfig cfg = resolve_config(args.config, config_path);
  std::vector<Tree> trees = load_trees(args.input);

  CorpusAugmentation result =
      augment_corpus(trees, cfg, args.seed, args.epoch, args.iterations);

  std::string body;
  for (const AugmentedTree& out : result.outputs) {
    body += serialize(out.tree);
    body += '\n';
  }
  write_file(args.output, body);

  json manifest{
      {"tool", "speechtree"},
      {"version", kVersion},
      {"command", "augment"},
      {"input", args.input},
      {"output", args.output},
      {"config_path", config_path.empty() ? json(nullptr) : json(config_path)},
      {"config_hash", fnv1a64_hex(config_canonical_json(cfg))},
      // effective values, so defaulted fields are on record
      {"config", json::parse(config_canonical_json(cfg))},
      {"seed", args.seed},
      {"epoch", args.epoch},
      {"iterations", args.iterations},
      {"trees_in", trees.size()},
      {"trees_out", result.outputs.size()},
      {"groups",
       json{{"none", result.realized.none},
            {"combine2", result.realized.combine2},
            {"combine3", result.realized.combine3},
            {"restart2", result.realized.restart2},
            {"restart3", result.realized.restart3}}},
  };
  write_file(args.output + ".manifest.json", manifest.dump(2) + "\n");

  std::fprintf(stderr, "augmented %zu trees into %zu (seed %llu, epoch %llu, %llu iteration%s)\n",
               trees.size(), result.outputs.size(),
               static_cast<unsigned long long>(args.seed),
               static_cast<unsigned long long>(args.epoch),
               static_cast<unsigned long long>(args.iterations),
               args.iterations == 1 ? "" : "s");
  return 0;
}

// ---------------------------------------------------------------------------
// score-pos

int run_score_pos(const std::string& gold_path, const std::string& pred_path, bool strip_re,
                  bool as_json) {
  TagScoreReport report = score_pos(load_tag_file(gold_path), load_tag_file(pred_path), strip_re);
  if (as_json) {
    json per_tag = json::object();
    for (const auto& [tag, c] : report.per_tag) per_tag[tag] = counts_json(c);
    json j{{"total_tokens", report.total_tokens},
           {"correct_tokens", report.correct_tokens},
           {"accuracy", round2(report.accuracy())},
           {"per_tag", per_tag}};
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  // Paper-style table: most frequent tags first.
  std::vector<std::pair<std::string, MatchCounts>> rows(report.per_tag.begin(),
                                                        report.per_tag.end());
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.second.gold > b.second.gold; });
  std::printf("%-8s %8s %8s %8s %10s %8s %8s\n", "tag", "gold", "pred", "correct", "precision",
              "recall", "f1");
  for (const auto& [tag, c] : rows)
    std::printf("%-8s %8llu %8llu %8llu %10.2f %8.2f %8.2f\n", tag.c_str(),
                static_cast<unsigned long long>(c.gold),
                static_cast<unsigned long long>(c.predicted),
                static_cast<unsigned long long>(c.matched), round2(c.precision()),
                round2(c.recall()), round2(c.f1()));
  std::printf("total: %llu tokens, %llu correct, accuracy %.2f\n",
              static_cast<unsigned long long>(report.total_tokens),
              static_cast<unsigned long long>(report.correct_tokens), round2(report.accuracy()));
  return 0;
}

// ---------------------------------------------------------------------------
// score-evalb

int run_score_evalb(const std::string& gold_path, const std::string& pred_path,
                    bool include_preterminals, bool keep_function_tags, bool as_json) {
  SpanOptions options;
  options.exclude_preterminals = !include_preterminals;
  options.strip_function_tags = !keep_function_tags;
  BracketScoreReport report =
      score_brackets(load_trees(gold_path), load_trees(pred_path), options);
  if (as_json) {
    std::cout << counts_json(report).dump(2) << "\n";
    return 0;
  }
  std::printf("brackets: gold %llu, predicted %llu, matched %llu\n",
              static_cast<unsigned long long>(report.gold),
              static_cast<unsigned long long>(report.predicted),
              static_cast<unsigned long long>(report.matched));
  std::printf("precision %.2f  recall %.2f  f1 %.2f\n", round2(report.precision()),
              round2(report.recall()), round2(report.f1()));
  return 0;
}

// ---------------------------------------------------------------------------
// score-dysfluency

int run_score_dysfluency(const std::string& gold_path, const std::string& pred_path,
                         bool by_length, const std::string& restart_path, bool as_json) {
  std::vector<Tree> pred_trees = load_trees(pred_path);
  std::vector<TagSeq> pred_tags;
  for (const Tree& t : pred_trees) {
    TagSeq seq;
    for (const TaggedToken& tok : propagate_re(t)) seq.push_back(tok.tag);
    pred_tags.push_back(std::move(seq));
  }

  DysfluencyReport report;
  bool have_repetition = !gold_path.empty();
  if (have_repetition) {
    std::vector<TagSeq> gold_tags = load_tag_file(gold_path);
    report.repetition = score_repetition(gold_tags, pred_tags);
    if (by_length) report.by_length = score_repetition_by_length(gold_tags, pred_tags);
  }
  bool have_restart = !restart_path.empty();
  if (have_restart) report.restart = score_restart(pred_trees, load_restart_starts(restart_path));

  if (as_json) {
    json j = json::object();
    if (have_repetition) {
      j["repetition"] = counts_json(report.repetition);
      if (by_length) {
        json buckets = json::object();
        for (std::size_t b = 0; b < 4; ++b)
          buckets[LengthBucketScores::bucket_name(b)] = counts_json(report.by_length.buckets[b]);
        j["by_length"] = buckets;
      }
    }
    if (have_restart) {
      j["restart"] = json{{"matched_spans", report.restart.matched_spans},
                          {"predicted_spans", report.restart.predicted_spans},
                          {"recalled_starts", report.restart.recalled_starts},
                          {"gold_starts", report.restart.gold_starts},
                          {"precision", round2(report.restart.precision())},
                          {"recall", round2(report.restart.recall())},
                          {"f1", round2(report.restart.f1())}};
    }
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  if (have_repetition) {
    const MatchCounts& r = report.repetition;
    std::printf("repetition (token level): precision %.2f  recall %.2f  f1 %.2f  "
                "(gold %llu, predicted %llu, matched %llu)\n",
                round2(r.precision()), round2(r.recall()), round2(r.f1()),
                static_cast<unsigned long long>(r.gold),
                static_cast<unsigned long long>(r.predicted),
                static_cast<unsigned long long>(r.matched));
    if (by_length) {
      std::printf("%-8s %8s %10s %8s %8s\n", "length", "gold", "precision", "recall", "f1");
      for (std::size_t b = 0; b < 4; ++b) {
        const MatchCounts& c = report.by_length.buckets[b];
        std::printf("%-8s %8llu %10.2f %8.2f %8.2f\n", LengthBucketScores::bucket_name(b),
                    static_cast<unsigned long long>(c.gold), round2(c.precision()),
                    round2(c.recall()), round2(c.f1()));
      }
    }
  }
  if (have_restart) {
    const RestartScore& r = report.restart;
    std::printf("restart: precision %.2f  recall %.2f  f1 %.2f  "
                "(spans %llu, starts %llu)\n",
                round2(r.precision()), round2(r.recall()), round2(r.f1()),
                static_cast<unsigned long long>(r.predicted_spans),
                static_cast<unsigned long long>(r.gold_starts));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// tokenize / stats

std::string flags_of(const MarkedToken& t) {
  std::string f;
  if (t.is_repetition) f += '=';
  if (t.is_partial) f += '-';
  if (t.is_restart_end) f += '#';
  if (f.empty()) f = "_";
  return f;
}

int run_tokenize(const std::string& input, const std::string& output) {
  std::istringstream in(read_file(input));
  std::string body;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    auto tokens = parse_transcript_line(line);
    if (tokens.empty()) continue;
    if (!first) body += '\n';
    first = false;
    for (const MarkedToken& t : tokens) {
      body += original_token(t);
      body += '\t';
      body += t.surface;
      body += '\t';
      body += flags_of(t);
      body += '\n';
    }
  }
  write_file(output, body);
  return 0;
}

int run_stats(const std::string& input, const std::string& format, bool as_json) {
  std::vector<std::vector<MarkedToken>> sentences;
  if (format == "tagged") {
    sentences = read_tagged_file(read_file(input));
  } else {
    std::istringstream in(read_file(input));
    std::string line;
    while (std::getline(in, line)) {
      auto tokens = parse_transcript_line(line);
      if (!tokens.empty()) sentences.push_back(std::move(tokens));
    }
  }
  CorpusStats stats = corpus_stats(sentences);
  if (as_json) {
    json j{{"sentences", stats.sentences}, {"tokens", stats.tokens}};
    j["mean_tokens"] = stats.mean_tokens ? json(round2(*stats.mean_tokens)) : json(nullptr);
    j["std_tokens"] = stats.std_tokens ? json(round2(*stats.std_tokens)) : json(nullptr);
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::printf("sentences %zu\n", stats.sentences);
  std::printf("tokens    %zu\n", stats.tokens);
  if (stats.mean_tokens)
    std::printf("tokens/sentence %.2f (%.2f)\n", round2(*stats.mean_tokens),
                round2(*stats.std_tokens));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Treebank dysfluency augmentation and scoring toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  AugmentArgs aug;
  CLI::App* augment = app.add_subcommand("augment", "Augment a bracketed tree file");
  augment->add_option("--input", aug.input, "Input tree file")->required();
  augment->add_option("--output", aug.output, "Output tree file (one tree per line)")->required();
  augment->add_option("--config", aug.config,
                      "Config JSON (default: $" + std::string(kConfigEnvVar) +
                          ", else built-in rates)");
  augment->add_option("--seed", aug.seed, "Random seed");
  augment->add_option("--epoch", aug.epoch, "Epoch number (varies the draw streams)");
  augment->add_option("--iterations", aug.iterations, "Full passes over the corpus")
      ->check(CLI::PositiveNumber);

  std::string gold, pred;
  bool strip_re = false, as_json = false;
  CLI::App* score_pos_cmd = app.add_subcommand("score-pos", "POS accuracy and per-tag F1");
  score_pos_cmd->add_option("--gold", gold, "Gold tagged file")->required();
  score_pos_cmd->add_option("--pred", pred, "Predicted tagged file")->required();
  score_pos_cmd->add_flag("--strip-re", strip_re, "Map X_RE tags to X before comparing");
  score_pos_cmd->add_flag("--json", as_json, "Emit JSON");

  bool include_preterminals = false, keep_function_tags = false;
  CLI::App* evalb = app.add_subcommand("score-evalb", "Labeled bracket precision/recall/F1");
  evalb->add_option("--gold", gold, "Gold tree file")->required();
  evalb->add_option("--pred", pred, "Predicted tree file")->required();
  evalb->add_flag("--include-preterminals", include_preterminals, "Score POS-level spans too");
  evalb->add_flag("--keep-function-tags", keep_function_tags, "Compare full labels");
  evalb->add_flag("--json", as_json, "Emit JSON");

  bool by_length = false;
  std::string restart_gold;
  CLI::App* dysf = app.add_subcommand("score-dysfluency",
                                      "Repetition (_RE) and restart (EDITED_RES) recovery");
  dysf->add_option("--gold", gold, "Gold tagged file with _RE markup");
  dysf->add_option("--pred", pred, "Predicted tree file")->required();
  dysf->add_flag("--by-length", by_length, "Break repetition runs down by length");
  dysf->add_option("--restart-gold", restart_gold,
                   "Restart-start file (one line of token indices per sentence)");
  dysf->add_flag("--json", as_json, "Emit JSON");

  std::string input, output;
  CLI::App* tokenize = app.add_subcommand("tokenize", "Decode transcript markup to a token file");
  tokenize->add_option("--input", input, "Raw transcript (one utterance per line)")->required();
  tokenize->add_option("--output", output, "Flagged token file")->required();

  std::string stats_format = "raw";
  CLI::App* stats = app.add_subcommand("stats", "Sentence/token counts and length stats");
  stats->add_option("--input", input, "Input file")->required();
  stats->add_option("--format", stats_format, "Input format")
      ->check(CLI::IsMember({"raw", "tagged"}));
  stats->add_flag("--json", as_json, "Emit JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (augment->parsed()) return run_augment(aug);
    if (score_pos_cmd->parsed()) return run_score_pos(gold, pred, strip_re, as_json);
    if (evalb->parsed())
      return run_score_evalb(gold, pred, include_preterminals, keep_function_tags, as_json);
    if (dysf->parsed()) {
      if (gold.empty() && restart_gold.empty())
        throw DataError("score-dysfluency needs --gold and/or --restart-gold");
      return run_score_dysfluency(gold, pred, by_length, restart_gold, as_json);
    }
    if (tokenize->parsed()) return run_tokenize(input, output);
    if (stats->parsed()) return run_stats(input, stats_format, as_json);
  } catch (const std::exception& e) {
    std::cerr << "speechtree: error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
