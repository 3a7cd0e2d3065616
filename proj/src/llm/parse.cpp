// Copyright 2026 The edc-kg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "edc/llm/parse.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace edc::llm {
namespace {

enum class QuoteFamily { Single, Double };

struct QuoteMark {
  QuoteFamily family;
  std::size_t length;
};

// Straight, backtick, and UTF-8 curly quotes.
std::optional<QuoteMark> quote_at(std::string_view s, std::size_t pos) {
  if (pos >= s.size()) return std::nullopt;
  const char c = s[pos];
  if (c == '\'' || c == '`') return QuoteMark{QuoteFamily::Single, 1};
  if (c == '"') return QuoteMark{QuoteFamily::Double, 1};
  if (s.substr(pos, 2) == "\xE2\x80" && pos + 2 < s.size()) {
    switch (static_cast<unsigned char>(s[pos + 2])) {
      case 0x98:
      case 0x99:
        return QuoteMark{QuoteFamily::Single, 3};
      case 0x9C:
      case 0x9D:
        return QuoteMark{QuoteFamily::Double, 3};
      default:
        break;
    }
  }
  return std::nullopt;
}

bool is_ws(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::size_t skip_ws(std::string_view s, std::size_t i) {
  while (i < s.size() && is_ws(s[i])) ++i;
  return i;
}

enum class GroupStatus { Closed, Abandoned };

struct GroupScan {
  GroupStatus status;
  std::size_t end;  // one past the closing bracket when Closed
  std::vector<std::string> elements;
};

// Parses a quoted element whose opening mark sits at `i`. Returns the index
// just past the closing mark, or npos if the quote never terminates in a
// position followed by ',' or ']'.
std::size_t read_quoted(std::string_view s, std::size_t i, std::string& out) {
  const QuoteMark open = *quote_at(s, i);
  std::size_t j = i + open.length;
  while (j < s.size()) {
    const char c = s[j];
    if (c == '\\' && j + 1 < s.size()) {
      const char n = s[j + 1];
      switch (n) {
        case 'n':
          out.push_back('\n');
          break;
        case 't':
          out.push_back('\t');
          break;
        case '\\':
        case '\'':
        case '"':
          out.push_back(n);
          break;
        default:
          out.push_back(c);
          out.push_back(n);
          break;
      }
      j += 2;
      continue;
    }
    if (auto q = quote_at(s, j); q && q->family == open.family) {
      const std::size_t k = skip_ws(s, j + q->length);
      if (k < s.size() && (s[k] == ',' || s[k] == ']')) return j + q->length;
      out.append(s.substr(j, q->length));
      j += q->length;
      continue;
    }
    out.push_back(c);
    ++j;
  }
  return std::string_view::npos;
}

GroupScan scan_group(std::string_view s, std::size_t open) {
  GroupScan scan{GroupStatus::Abandoned, open + 1, {}};
  std::size_t i = skip_ws(s, open + 1);
  if (i < s.size() && s[i] == ']') {
    scan.status = GroupStatus::Closed;
    scan.end = i + 1;
    return scan;
  }
  while (i < s.size()) {
    i = skip_ws(s, i);
    if (i >= s.size()) break;
    if (s[i] == '[') return scan;  // not innermost
    std::string element;
    if (quote_at(s, i)) {
      const std::size_t after = read_quoted(s, i, element);
      if (after == std::string_view::npos) return scan;
      i = skip_ws(s, after);
    } else {
      std::size_t j = i;
      while (j < s.size() && s[j] != ',' && s[j] != ']') {
        if (s[j] == '[') return scan;
        ++j;
      }
      if (j >= s.size()) return scan;
      element = trim(s.substr(i, j - i));
      i = j;
    }
    scan.elements.push_back(std::move(element));
    if (i >= s.size()) return scan;
    if (s[i] == ']') {
      scan.status = GroupStatus::Closed;
      scan.end = i + 1;
      return scan;
    }
    // s[i] == ','
    i = skip_ws(s, i + 1);
    if (i < s.size() && s[i] == ']') {
      scan.status = GroupStatus::Closed;
      scan.end = i + 1;
      return scan;
    }
  }
  return scan;
}

std::string group_preview(const std::vector<std::string>& elements) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (i > 0) os << ", ";
    os << elements[i];
  }
  os << "]";
  return os.str();
}

std::string strip_name_decoration(std::string_view name) {
  std::string n = trim(name);
  auto strip_front = [&n]() {
    if (n.empty()) return false;
    if (auto q = quote_at(n, 0)) {
      n.erase(0, q->length);
      return true;
    }
    if (n.front() == '*' || n.front() == '_') {
      n.erase(0, 1);
      return true;
    }
    return false;
  };
  auto strip_back = [&n]() {
    if (n.empty()) return false;
    if (n.size() >= 3 && quote_at(n, n.size() - 3) &&
        quote_at(n, n.size() - 3)->length == 3) {
      n.erase(n.size() - 3);
      return true;
    }
    if (quote_at(n, n.size() - 1) || n.back() == '*' || n.back() == '_') {
      n.pop_back();
      return true;
    }
    return false;
  };
  while (strip_front()) {
  }
  while (strip_back()) {
  }
  return normalize_relation(n);
}

std::string strip_bullet(std::string_view line) {
  std::string l = trim(line);
  for (;;) {
    if (!l.empty() && (l.front() == '-' || l.front() == '*' || l.front() == '+')) {
      // "**name**" keeps its emphasis for strip_name_decoration.
      if (l.size() > 1 && l[1] == '*') break;
      l = trim(std::string_view(l).substr(1));
      continue;
    }
    if (l.rfind("\xE2\x80\xA2", 0) == 0) {
      l = trim(std::string_view(l).substr(3));
      continue;
    }
    std::size_t d = 0;
    while (d < l.size() && std::isdigit(static_cast<unsigned char>(l[d]))) ++d;
    if (d > 0 && d < l.size() && (l[d] == '.' || l[d] == ')') &&
        (d + 1 == l.size() || is_ws(l[d + 1]))) {
      l = trim(std::string_view(l).substr(d + 1));
      continue;
    }
    break;
  }
  return l;
}

bool is_upper_alpha(char c) { return c >= 'A' && c <= 'Z'; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::vector<std::vector<std::string>> bracket_groups(std::string_view text) {
  std::vector<std::vector<std::string>> groups;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '[') {
      ++i;
      continue;
    }
    GroupScan scan = scan_group(text, i);
    if (scan.status == GroupStatus::Closed) {
      groups.push_back(std::move(scan.elements));
      i = scan.end;
    } else {
      ++i;
    }
  }
  return groups;
}

Parsed<std::vector<Triplet>> parse_triplet_list(std::string_view text) {
  Parsed<std::vector<Triplet>> result;
  bool saw_empty_list = false;
  std::size_t index = 0;
  for (const auto& group : bracket_groups(text)) {
    ++index;
    if (group.empty()) {
      saw_empty_list = true;
      continue;
    }
    if (group.size() != 3) {
      result.warnings.push_back("group " + std::to_string(index) +
                                ": expected 3 elements, got " +
                                std::to_string(group.size()) + " in " +
                                group_preview(group));
      continue;
    }
    if (auto defect = triplet_defect(group[0], group[1], group[2])) {
      result.warnings.push_back("group " + std::to_string(index) + ": " +
                                *defect);
      continue;
    }
    result.value.push_back(Triplet::make(group[0], group[1], group[2]));
  }
  result.value = dedupe_triplets(result.value);
  if (result.value.empty() && !saw_empty_list) {
    result.warnings.push_back("no triplet could be parsed from the response");
  }
  return result;
}

Parsed<std::vector<std::string>> parse_string_list(std::string_view text) {
  Parsed<std::vector<std::string>> result;
  bool saw_empty_list = false;
  for (const auto& group : bracket_groups(text)) {
    if (group.empty()) {
      saw_empty_list = true;
      continue;
    }
    std::set<std::string> seen;
    for (const auto& element : group) {
      std::string item = trim(element);
      if (item.empty()) {
        result.warnings.push_back("empty list element skipped");
        continue;
      }
      if (seen.insert(item).second) result.value.push_back(std::move(item));
    }
    break;
  }
  if (result.value.empty() && !saw_empty_list) {
    result.warnings.push_back("no list could be parsed from the response");
  }
  return result;
}

DefinitionParse parse_definitions(
    std::string_view text, std::span<const std::string> expected_relations) {
  if (expected_relations.empty()) {
    throw std::invalid_argument("parse_definitions: no expected relations");
  }
  std::set<std::string> expected;
  for (const auto& r : expected_relations) expected.insert(normalize_relation(r));

  DefinitionParse out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string line = strip_bullet(text.substr(start, end - start));
    start = end + 1;

    const std::size_t colon = line.find(':');
    if (colon == std::string::npos) continue;
    const std::string name =
        strip_name_decoration(std::string_view(line).substr(0, colon));
    std::string sentence = trim(std::string_view(line).substr(colon + 1));
    if (name.empty() || sentence.empty() || !expected.contains(name)) continue;
    out.definitions.try_emplace(name, std::move(sentence));
  }
  for (const auto& r : expected_relations) {
    const std::string n = normalize_relation(r);
    if (!out.definitions.contains(n) &&
        std::find(out.missing.begin(), out.missing.end(), n) ==
            out.missing.end()) {
      out.missing.push_back(n);
    }
  }
  return out;
}

std::optional<std::size_t> parse_mcq_answer(std::string_view text,
                                            std::size_t num_choices) {
  if (num_choices < 1 || num_choices > 25) {
    throw std::invalid_argument("parse_mcq_answer: num_choices out of range");
  }
  const char last = mcq_letter(num_choices);
  auto resolve = [num_choices](char letter) -> std::optional<std::size_t> {
    const auto index = static_cast<std::size_t>(letter - 'A');
    if (index == num_choices) return std::nullopt;
    return index;
  };

  // A reply that opens with "B", "B.", "(B)" or "B)" is taken at its word.
  std::string t = trim(text);
  std::size_t p = 0;
  if (p < t.size() && t[p] == '(') ++p;
  if (p < t.size() && is_upper_alpha(t[p]) && t[p] <= last) {
    const std::size_t after = p + 1;
    if (after == t.size() || t[after] == '.' || t[after] == ')' ||
        t[after] == ':') {
      return resolve(t[p]);
    }
  }

  std::vector<char> letters;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const char c = t[i];
    if (!is_upper_alpha(c) || c > last) continue;
    const bool left_ok = i == 0 || !is_alnum(t[i - 1]);
    const bool right_ok =
        i + 1 == t.size() || (!is_alnum(t[i + 1]) && t[i + 1] != '\'');
    if (left_ok && right_ok &&
        std::find(letters.begin(), letters.end(), c) == letters.end()) {
      letters.push_back(c);
    }
  }
  if (letters.size() == 1) return resolve(letters.front());
  if (letters.empty()) {
    std::string lower(t);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (lower.find("none of the above") != std::string::npos) {
      return std::nullopt;
    }
  }
  throw AmbiguousMcqError();
}

}  // namespace edc::llm
