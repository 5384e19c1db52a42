#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "speechtree/augment.hpp"

namespace speechtree {

namespace {

using nlohmann::json;

void require_prob(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must be in [0,1]");
}

void require_dist(std::initializer_list<double> probs, const char* name) {
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " entries must be in [0,1]");
    sum += p;
  }
  if (std::fabs(sum - 1.0) > 1e-9)
    throw ConfigError(std::string(name) + " must sum to 1 (got " + std::to_string(sum) + ")");
}

double get_number(const json& j, const char* field) {
  if (!j.is_number()) throw ConfigError(std::string(field) + " must be a number");
  return j.get<double>();
}

// Reads a {"key": prob, ...} object with exactly the given keys, in order.
std::vector<double> get_dist(const json& j, const char* field,
                             std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(std::string(field) + " must be an object");
  if (j.size() != keys.size())
    throw ConfigError(std::string(field) + " must have exactly " + std::to_string(keys.size()) +
                      " entries");
  std::vector<double> out;
  for (const char* key : keys) {
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(std::string(field) + " is missing key '" + key + "'");
    out.push_back(get_number(*it, field));
  }
  return out;
}

std::set<std::string> get_string_set(const json& j, const char* field) {
  if (!j.is_array()) throw ConfigError(std::string(field) + " must be an array of strings");
  std::set<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw ConfigError(std::string(field) + " must be an array of strings");
    out.insert(v.get<std::string>());
  }
  return out;
}

}  // namespace

void AugmentationConfig::validate() const {
  require_prob(p_partial, "p_partial");
  require_prob(p_filler, "p_filler");
  require_prob(p_repetition, "p_repetition");
  require_prob(p_eq_marker, "p_eq_marker");
  require_prob(p_comma, "p_comma");
  require_prob(p_vbz, "p_vbz");
  require_prob(p_hash, "p_hash");
  require_dist({partial_len_4.two, partial_len_4.three}, "partial_len_4");
  require_dist({partial_len_gt4.two, partial_len_gt4.three, partial_len_gt4.four},
               "partial_len_gt4");
  require_dist({repetition_len_dist.one, repetition_len_dist.two, repetition_len_dist.three},
               "repetition_len_dist");
  require_dist({grouping_dist.none, grouping_dist.combine2, grouping_dist.combine3,
                grouping_dist.restart2, grouping_dist.restart3},
               "grouping_dist");
  if (filler_lexicon.empty()) throw ConfigError("filler_lexicon must be nonempty");
  for (const std::string& w : filler_lexicon) {
    if (w.empty() || w.find_first_of(" \t\n\r()") != std::string::npos)
      throw ConfigError("filler_lexicon entry '" + w + "' is not a valid token");
  }
  if (restart_keep_min < 1) throw ConfigError("restart_keep_min must be >= 1");
  if (restart_keep_min > restart_keep_max)
    throw ConfigError("restart_keep_min must be <= restart_keep_max");
  // The prefix-length rules are defined for words of 3+ characters.
  if (min_partial_word_len < 3) throw ConfigError("min_partial_word_len must be >= 3");
}

AugmentationConfig parse_config_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  AugmentationConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "p_partial") {
      cfg.p_partial = get_number(value, "p_partial");
    } else if (key == "partial_len_3") {
      // Fixed rule: 3-character words always keep their first two characters.
      auto d = get_dist(value, "partial_len_3", {"2"});
      if (std::fabs(d[0] - 1.0) > 1e-9)
        throw ConfigError("partial_len_3 is fixed at {\"2\": 1.0}");
    } else if (key == "partial_len_4") {
      auto d = get_dist(value, "partial_len_4", {"2", "3"});
      cfg.partial_len_4 = {d[0], d[1]};
    } else if (key == "partial_len_gt4") {
      auto d = get_dist(value, "partial_len_gt4", {"2", "3", "4"});
      cfg.partial_len_gt4 = {d[0], d[1], d[2]};
    } else if (key == "p_filler") {
      cfg.p_filler = get_number(value, "p_filler");
    } else if (key == "filler_lexicon") {
      if (!value.is_array() || value.empty())
        throw ConfigError("filler_lexicon must be a nonempty array");
      cfg.filler_lexicon.clear();
      for (const auto& v : value) {
        if (!v.is_string()) throw ConfigError("filler_lexicon must contain strings");
        cfg.filler_lexicon.push_back(v.get<std::string>());
      }
    } else if (key == "p_repetition") {
      cfg.p_repetition = get_number(value, "p_repetition");
    } else if (key == "repetition_len_dist") {
      auto d = get_dist(value, "repetition_len_dist", {"1", "2", "3"});
      cfg.repetition_len_dist = {d[0], d[1], d[2]};
    } else if (key == "p_eq_marker") {
      cfg.p_eq_marker = get_number(value, "p_eq_marker");
    } else if (key == "p_comma") {
      cfg.p_comma = get_number(value, "p_comma");
    } else if (key == "p_vbz") {
      cfg.p_vbz = get_number(value, "p_vbz");
    } else if (key == "grouping_dist") {
      auto d = get_dist(value, "grouping_dist",
                        {"none", "combine2", "combine3", "restart2", "restart3"});
      cfg.grouping_dist = {d[0], d[1], d[2], d[3], d[4]};
    } else if (key == "restart_keep_min") {
      cfg.restart_keep_min = value.get<int>();
    } else if (key == "restart_keep_max") {
      cfg.restart_keep_max = value.get<int>();
    } else if (key == "p_hash") {
      cfg.p_hash = get_number(value, "p_hash");
    } else if (key == "punctuation_tags") {
      cfg.punctuation_tags = get_string_set(value, "punctuation_tags");
    } else if (key == "proper_noun_tags") {
      cfg.proper_noun_tags = get_string_set(value, "proper_noun_tags");
    } else if (key == "min_partial_word_len") {
      long long v = value.get<long long>();
      if (v < 0) throw ConfigError("min_partial_word_len must be >= 3");
      cfg.min_partial_word_len = static_cast<std::size_t>(v);
    } else {
      throw ConfigError("unknown config field '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

AugmentationConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str());
}

std::string config_canonical_json(const AugmentationConfig& cfg) {
  json j;
  j["p_partial"] = cfg.p_partial;
  j["partial_len_3"] = json{{"2", 1.0}};
  j["partial_len_4"] = json{{"2", cfg.partial_len_4.two}, {"3", cfg.partial_len_4.three}};
  j["partial_len_gt4"] = json{{"2", cfg.partial_len_gt4.two},
                              {"3", cfg.partial_len_gt4.three},
                              {"4", cfg.partial_len_gt4.four}};
  j["p_filler"] = cfg.p_filler;
  j["filler_lexicon"] = cfg.filler_lexicon;
  j["p_repetition"] = cfg.p_repetition;
  j["repetition_len_dist"] = json{{"1", cfg.repetition_len_dist.one},
                                  {"2", cfg.repetition_len_dist.two},
                                  {"3", cfg.repetition_len_dist.three}};
  j["p_eq_marker"] = cfg.p_eq_marker;
  j["p_comma"] = cfg.p_comma;
  j["p_vbz"] = cfg.p_vbz;
  j["grouping_dist"] = json{{"none", cfg.grouping_dist.none},
                            {"combine2", cfg.grouping_dist.combine2},
                            {"combine3", cfg.grouping_dist.combine3},
                            {"restart2", cfg.grouping_dist.restart2},
                            {"restart3", cfg.grouping_dist.restart3}};
  j["restart_keep_min"] = cfg.restart_keep_min;
  j["restart_keep_max"] = cfg.restart_keep_max;
  j["p_hash"] = cfg.p_hash;
  j["punctuation_tags"] = cfg.punctuation_tags;
  j["proper_noun_tags"] = cfg.proper_noun_tags;
  j["min_partial_word_len"] = cfg.min_partial_word_len;
  return j.dump();
}

}  // namespace speechtree
