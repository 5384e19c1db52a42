#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace speechtree {

struct FormatError : std::runtime_error {
  FormatError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " at line " + std::to_string(line)), line(line) {}
  std::size_t line;
};

/// A transcript token with its dysfluency markup decoded. `surface` drops a
/// trailing `=` but keeps a trailing `-` (partial words are written with
/// their hyphen, matching the PT convention); the bare restart marker `#`
/// has an empty surface.
struct MarkedToken {
  std::string surface;
  std::string tag;  ///< empty when untagged
  bool is_repetition = false;
  bool is_partial = false;
  bool is_restart_end = false;

  bool operator==(const MarkedToken&) const = default;
};

/// The token as it appeared in the transcript (surface plus markers).
std::string original_token(const MarkedToken& token);

/// Decodes one whitespace-tokenized utterance. Markup is taken as found:
/// trailing `=` means repetition, a trailing `-` on a token of length >= 2
/// means partial word, a bare `#` ends a restart. Anything else is a plain
/// token; no input is rejected.
std::vector<MarkedToken> parse_transcript_line(std::string_view line);

/// Reads a token TAB tag file, one token per line, blank line between
/// sentences. Token markup is decoded as in parse_transcript_line; tags
/// (including `_RE` suffixes, `PT`, and `#`) pass through verbatim.
std::vector<std::vector<MarkedToken>> read_tagged_file(std::string_view text);

/// Inverse of read_tagged_file (original tokens, trailing newline).
std::string write_tagged_file(const std::vector<std::vector<MarkedToken>>& sentences);

struct CorpusStats {
  std::size_t sentences = 0;
  std::size_t tokens = 0;
  std::optional<double> mean_tokens;  ///< absent for an empty corpus
  std::optional<double> std_tokens;   ///< population standard deviation
};

CorpusStats corpus_stats(const std::vector<std::vector<MarkedToken>>& sentences);

}  // namespace speechtree
