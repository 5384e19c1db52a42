#include "speechtree/transcripts.hpp"

#include <cmath>
#include <sstream>

namespace speechtree {

namespace {

MarkedToken decode_token(std::string_view raw) {
  MarkedToken t;
  if (raw == "#") {
    t.is_restart_end = true;
    return t;
  }
  std::string s(raw);
  if (s.size() >= 2 && s.back() == '=') {
    t.is_repetition = true;
    s.pop_back();
  }
  if (s.size() >= 2 && s.back() == '-') t.is_partial = true;
  t.surface = std::move(s);
  return t;
}

}  // namespace

std::string original_token(const MarkedToken& token) {
  if (token.is_restart_end && token.surface.empty()) return "#";
  return token.is_repetition ? token.surface + "=" : token.surface;
}

std::vector<MarkedToken> parse_transcript_line(std::string_view line) {
  std::vector<MarkedToken> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(decode_token(line.substr(start, i - start)));
  }
  return out;
}

std::vector<std::vector<MarkedToken>> read_tagged_file(std::string_view text) {
  std::vector<std::vector<MarkedToken>> sentences;
  std::vector<MarkedToken> current;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, (eol == std::string_view::npos ? text.size() : eol) - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    if (line.empty()) {
      if (!current.empty()) {
        sentences.push_back(std::move(current));
        current.clear();
      }
    } else {
      std::size_t tab = line.find('\t');
      if (tab == std::string_view::npos || line.find('\t', tab + 1) != std::string_view::npos)
        throw FormatError("expected 2 tab-separated fields", line_no);
      MarkedToken t = decode_token(line.substr(0, tab));
      t.tag = std::string(line.substr(tab + 1));
      current.push_back(std::move(t));
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  if (!current.empty()) sentences.push_back(std::move(current));
  return sentences;
}

std::string write_tagged_file(const std::vector<std::vector<MarkedToken>>& sentences) {
  std::string out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i > 0) out += '\n';
    for (const MarkedToken& t : sentences[i]) {
      out += original_token(t);
      out += '\t';
      out += t.tag;
      out += '\n';
    }
  }
  return out;
}

CorpusStats corpus_stats(const std::vector<std::vector<MarkedToken>>& sentences) {
  CorpusStats s;
  s.sentences = sentences.size();
  for (const auto& sent : sentences) s.tokens += sent.size();
  if (s.sentences == 0) return s;
  double mean = static_cast<double>(s.tokens) / static_cast<double>(s.sentences);
  double var = 0.0;
  for (const auto& sent : sentences) {
    double d = static_cast<double>(sent.size()) - mean;
    var += d * d;
  }
  var /= static_cast<double>(s.sentences);  // population variance
  s.mean_tokens = mean;
  s.std_tokens = std::sqrt(var);
  return s;
}

}  // namespace speechtree
