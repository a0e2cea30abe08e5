#pragma once

// Arabic review normalization, tokenization and stopword filtering.
//
// The rule set is fixed and locale-independent:
//   * diacritics U+064B..U+065F, U+0670 and tatweel U+0640 are removed
//   * alef variants (U+0622, U+0623, U+0625) become bare alef U+0627
//   * alef maqsura U+0649 becomes yeh U+064A, teh marbuta U+0629 becomes heh U+0647
//   * whitespace runs collapse to one ASCII space and the result is trimmed

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sentirec/detail/utf8.hpp"
#include "sentirec/error.hpp"

namespace sentirec {

using TokenSequence = std::vector<std::string>;

namespace textprep_detail {

inline bool is_space(char32_t c) {
  switch (c) {
    case U' ': case U'\t': case U'\n': case U'\r': case U'\v': case U'\f':
    case 0x00A0: case 0x1680: case 0x2028: case 0x2029: case 0x202F:
    case 0x205F: case 0x3000: case 0xFEFF:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

inline bool is_diacritic(char32_t c) { return (c >= 0x064B && c <= 0x065F) || c == 0x0670; }

inline bool is_digit(char32_t c) {
  return (c >= U'0' && c <= U'9') || (c >= 0x0660 && c <= 0x0669) || (c >= 0x06F0 && c <= 0x06F9);
}

inline bool is_punct(char32_t c) {
  if (c < 0x80) {
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
           (c >= 0x7B && c <= 0x7E);
  }
  switch (c) {
    case 0x060C:  // comma
    case 0x061B:  // semicolon
    case 0x061F:  // question mark
    case 0x066A: case 0x066B: case 0x066C: case 0x066D:
    case 0x06D4:
    case 0x00AB: case 0x00BB: case 0x00A1: case 0x00BF:
      return true;
    default:
      return (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E) ||
             (c >= 0xFD3E && c <= 0xFD3F);
  }
}

inline char32_t fold(char32_t c) {
  switch (c) {
    case 0x0622: case 0x0623: case 0x0625: return 0x0627;
    case 0x0649: return 0x064A;
    case 0x0629: return 0x0647;
    default: break;
  }
  if (c >= U'A' && c <= U'Z') return c + (U'a' - U'A');
  return c;
}

}  // namespace textprep_detail

/// Applies the fixed normalization rules. Total: invalid UTF-8 bytes become U+FFFD.
inline std::string normalize(std::string_view text) {
  using namespace textprep_detail;
  const std::u32string cps = detail::decode(text);
  std::u32string out;
  out.reserve(cps.size());
  bool pending_space = false;
  for (char32_t c : cps) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (is_diacritic(c) || c == 0x0640) continue;
    switch (c) {
      case 0x0622: case 0x0623: case 0x0625: c = 0x0627; break;
      case 0x0649: c = 0x064A; break;
      case 0x0629: c = 0x0647; break;
      default: break;
    }
    if (pending_space) {
      out.push_back(U' ');
      pending_space = false;
    }
    out.push_back(c);
  }
  return detail::encode(out);
}

/// Splits normalized text into word tokens.
///
/// Whitespace separates candidates; edge punctuation is stripped; candidates
/// containing a digit are dropped; remaining inner punctuation splits the
/// candidate further; ASCII letters are lowercased; pieces shorter than two
/// code points are dropped.
inline TokenSequence tokenize(std::string_view text) {
  using namespace textprep_detail;
  const std::u32string cps = detail::decode(text);
  TokenSequence tokens;

  auto emit_pieces = [&tokens](std::u32string_view word) {
    std::size_t start = 0;
    while (start < word.size()) {
      std::size_t end = start;
      while (end < word.size() && !is_punct(word[end])) ++end;
      if (end - start >= 2) {
        std::u32string piece(word.substr(start, end - start));
        for (char32_t& c : piece) c = fold(c);
        tokens.push_back(detail::encode(piece));
      }
      start = end + 1;
    }
  };

  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && is_space(cps[i])) ++i;
    std::size_t j = i;
    while (j < cps.size() && !is_space(cps[j])) ++j;
    std::u32string_view word(cps.data() + i, j - i);
    i = j;
    while (!word.empty() && is_punct(word.front())) word.remove_prefix(1);
    while (!word.empty() && is_punct(word.back())) word.remove_suffix(1);
    if (word.empty()) continue;
    if (std::any_of(word.begin(), word.end(), is_digit)) continue;
    emit_pieces(word);
  }
  return tokens;
}

/// Set of stopwords, stored in normalized form.
class Stoplist {
 public:
  Stoplist() = default;

  Stoplist(std::initializer_list<std::string_view> words) {
    for (auto w : words) insert(w);
  }

  void insert(std::string_view word) {
    std::string w = normalize(word);
    for (char& c : w) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    if (!w.empty()) words_.insert(std::move(w));
  }

  bool contains(std::string_view token) const { return words_.find(std::string(token)) != words_.end(); }
  std::size_t size() const noexcept { return words_.size(); }
  bool empty() const noexcept { return words_.empty(); }
  const std::set<std::string>& words() const noexcept { return words_; }

  /// One word per line, `#` starts a comment.
  static Stoplist parse(std::istream& in) {
    Stoplist list;
    std::string line;
    while (std::getline(in, line)) {
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      list.insert(line);
    }
    return list;
  }

  static Stoplist load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::configuration, "cannot open stoplist " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string content = buf.str();
    if (!detail::is_valid(content)) {
      throw Error(ErrorKind::ingestion, "stoplist is not valid UTF-8: " + path.string());
    }
    std::istringstream lines(content);
    return parse(lines);
  }

  /// Small built-in list of frequent Modern Standard Arabic function words.
  static Stoplist default_arabic() {
    return Stoplist{
        "في",   "من",   "على",  "إلى",  "عن",   "أن",   "إن",   "أو",   "ثم",   "قد",
        "لا",   "لم",   "لن",   "ما",   "مع",   "كل",   "هو",   "هي",   "هم",   "هذا",
        "هذه",  "ذلك",  "تلك",  "التي", "الذي", "الذين", "كان", "كانت", "يكون", "حتى",
        "عند",  "بعد",  "قبل",  "بين",  "أي",   "كما",  "لقد",  "إذا",  "لكن",  "بل",
        "هناك", "هنا",  "أنا",  "نحن",  "أنت",  "فيه",  "فيها", "منه",  "منها", "عليه",
        "عليها", "به",  "بها",  "له",   "لها",  "إنه",  "أنه",  "وهو",  "وهي",  "وفي",
        "ومن",  "أيضا", "حيث",  "غير",  "مثل",  "عندما", "كانوا", "يا", "الى", "التى"};
  }

 private:
  std::set<std::string> words_;
};

/// Drops exact stoplist matches, preserving order.
inline TokenSequence remove_stopwords(TokenSequence tokens, const Stoplist& stoplist) {
  std::erase_if(tokens, [&](const std::string& t) { return stoplist.contains(t); });
  return tokens;
}

inline TokenSequence preprocess(std::string_view text, const Stoplist& stoplist) {
  return remove_stopwords(tokenize(normalize(text)), stoplist);
}

}  // namespace sentirec
