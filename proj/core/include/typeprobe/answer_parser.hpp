#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace typeprobe {

/// Stamped into scored outputs so cascade changes stay traceable.
inline constexpr std::string_view kParserVersion = "cascade/1";

enum class ParseStep { ExactLetter, PunctuatedLetter, FirstValidLetter, OptionText, Failed };

std::string_view to_string(ParseStep step);
ParseStep parse_parse_step(std::string_view text);

struct ParseResult {
  std::optional<std::size_t> choice;  // present iff step != Failed
  ParseStep step = ParseStep::Failed;

  friend bool operator==(const ParseResult&, const ParseResult&) = default;
};

/// Four-step cascade over the whitespace-trimmed response:
///   1. the whole response is one valid uppercase letter ("B");
///   2. one valid letter in one layer of punctuation: "B.", "(B)", "B)",
///      "B:", "B -";
///   3. first standalone uppercase valid letter anywhere;
///   4. case-insensitive containment of exactly one option's full text;
///      matches nested inside a longer option's match are ignored.
/// Steps 1-3 are case-sensitive: "a" never matches. Letters beyond the option
/// count are invalid. Supports 2-26 options.
ParseResult parse_answer(std::string_view raw, const std::vector<std::string>& options);

/// 'A' + index.
char option_letter(std::size_t index);

}  // namespace typeprobe
