#include "typeprobe/answer_parser.hpp"

#include <algorithm>
#include <cctype>

#include "typeprobe/error.hpp"

namespace typeprobe {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// UTF-8 continuation and lead bytes count as word characters so a capital
// next to accented letters is not mistaken for a standalone token.
bool is_word(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u) || c == '_';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::optional<std::size_t> letter_index(char c, std::size_t option_count) {
  if (c < 'A' || c > 'Z') return std::nullopt;
  const auto i = static_cast<std::size_t>(c - 'A');
  if (i >= option_count) return std::nullopt;
  return i;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string_view to_string(ParseStep step) {
  switch (step) {
    case ParseStep::ExactLetter: return "exact_letter";
    case ParseStep::PunctuatedLetter: return "punctuated_letter";
    case ParseStep::FirstValidLetter: return "first_valid_letter";
    case ParseStep::OptionText: return "option_text";
    case ParseStep::Failed: return "failed";
  }
  return "failed";
}

ParseStep parse_parse_step(std::string_view text) {
  for (ParseStep s : {ParseStep::ExactLetter, ParseStep::PunctuatedLetter, ParseStep::FirstValidLetter,
                      ParseStep::OptionText, ParseStep::Failed}) {
    if (to_string(s) == text) return s;
  }
  throw Error("unknown parse step: " + std::string(text));
}

char option_letter(std::size_t index) {
  if (index >= 26) throw Error("option index out of range: " + std::to_string(index));
  return static_cast<char>('A' + index);
}

ParseResult parse_answer(std::string_view raw, const std::vector<std::string>& options) {
  const std::size_t n = options.size();
  const std::string_view s = trim(raw);

  // 1. Bare letter.
  if (s.size() == 1) {
    if (auto i = letter_index(s[0], n)) return {i, ParseStep::ExactLetter};
  }

  // 2. One layer of punctuation around the letter.
  if (s.size() >= 2) {
    std::optional<std::size_t> i;
    if (s.size() == 2 && (s[1] == '.' || s[1] == ')' || s[1] == ':')) {
      i = letter_index(s[0], n);
    } else if (s.size() == 3 && s[0] == '(' && s[2] == ')') {
      i = letter_index(s[1], n);
    } else if (s.size() == 3 && s.substr(1) == " -") {
      i = letter_index(s[0], n);
    }
    if (i) return {i, ParseStep::PunctuatedLetter};
  }

  // 3. First standalone uppercase letter that names an option.
  for (std::size_t p = 0; p < s.size(); ++p) {
    if (p > 0 && is_word(s[p - 1])) continue;
    if (p + 1 < s.size() && is_word(s[p + 1])) continue;
    if (auto i = letter_index(s[p], n)) return {i, ParseStep::FirstValidLetter};
  }

  // 4. Option text. An occurrence lying inside a longer contained option
  // ("Helvetica" within "Helvetica Neue") does not count; more than one
  // option left standing fails.
  const std::string hay = lower(s);
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> spans(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (options[i].empty()) continue;
    const std::string needle = lower(options[i]);
    for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) {
      spans[i].emplace_back(pos, pos + needle.size());
    }
  }
  std::optional<std::size_t> found;
  int standing = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool free = std::any_of(spans[i].begin(), spans[i].end(), [&](const auto& sp) {
      for (std::size_t j = 0; j < n; ++j) {
        if (options[j].size() <= options[i].size()) continue;
        for (const auto& outer : spans[j]) {
          if (outer.first <= sp.first && sp.second <= outer.second) return false;
        }
      }
      return true;
    });
    if (free) {
      found = i;
      ++standing;
    }
  }
  if (standing == 1) return {found, ParseStep::OptionText};
  return {std::nullopt, ParseStep::Failed};
}

}  // namespace typeprobe
