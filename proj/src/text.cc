// Copyright 2026 The Curator Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "curator/text.h"

#include <cctype>
#include <fstream>
#include <sstream>

#include "curator/error.h"

namespace curator {

extern const char* const kDefaultStopwordsText;  // generated from data/

std::string ToLower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string Trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> SplitOn(std::string_view s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

namespace {

bool IsAsciiAlnum(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9');
}

// Length of the UTF-8 sequence introduced by lead byte `c`.
size_t Utf8Length(unsigned char c) {
  if (c < 0x80) return 1;
  if ((c >> 5) == 0x6) return 2;
  if ((c >> 4) == 0xE) return 3;
  if ((c >> 3) == 0x1E) return 4;
  return 1;
}

// Decodes the code point at `s[i]` (length `n`).
uint32_t DecodeUtf8(std::string_view s, size_t i, size_t n) {
  const auto b = [&](size_t k) { return static_cast<unsigned char>(s[i + k]); };
  if (n == 2) return ((b(0) & 0x1F) << 6) | (b(1) & 0x3F);
  if (n == 3) return ((b(0) & 0x0F) << 12) | ((b(1) & 0x3F) << 6) | (b(2) & 0x3F);
  if (n == 4) {
    return ((b(0) & 0x07) << 18) | ((b(1) & 0x3F) << 12) |
           ((b(2) & 0x3F) << 6) | (b(3) & 0x3F);
  }
  return b(0);
}

// Latin letters with diacritics stay inside words; everything else outside
// ASCII (emoji, symbols, punctuation blocks) acts as a separator.
bool IsWordCodePoint(uint32_t cp) {
  return (cp >= 0x00C0 && cp <= 0x024F && cp != 0x00D7 && cp != 0x00F7);
}

bool HasLetter(std::string_view w) {
  for (unsigned char c : w) {
    if ((c >= 'a' && c <= 'z') || c >= 0x80) return true;
  }
  return false;
}

bool IsUrlChunk(std::string_view chunk) {
  const std::string lower = ToLower(chunk.substr(0, 8));
  return lower.rfind("http://", 0) == 0 || lower.rfind("https://", 0) == 0 ||
         lower.rfind("www.", 0) == 0;
}

// Splits a whitespace-free chunk into lowercase words. Apostrophes inside a
// word are dropped ("don't" -> "dont").
void SplitWords(std::string_view chunk, std::vector<std::string>* out,
                std::vector<std::string>* surface) {
  std::string word, original;
  auto flush = [&] {
    if (!word.empty()) {
      out->push_back(word);
      if (surface) surface->push_back(original);
    }
    word.clear();
    original.clear();
  };
  for (size_t i = 0; i < chunk.size();) {
    const unsigned char c = static_cast<unsigned char>(chunk[i]);
    const size_t n = std::min(Utf8Length(c), chunk.size() - i);
    if (n == 1 && IsAsciiAlnum(c)) {
      word.push_back(static_cast<char>(std::tolower(c)));
      original.push_back(static_cast<char>(c));
    } else if (n == 1 && c == '\'' && !word.empty()) {
      // elided
    } else if (n > 1 && IsWordCodePoint(DecodeUtf8(chunk, i, n))) {
      word.append(chunk.substr(i, n));
      original.append(chunk.substr(i, n));
    } else {
      flush();
    }
    i += n;
  }
  flush();
}

// ---------------------------------------------------------------------------
// Porter stemmer (M.F. Porter, 1980), operating on lowercase ASCII.

class Porter {
 public:
  explicit Porter(std::string w) : b_(std::move(w)) {}

  std::string Run() {
    if (b_.size() <= 2) return b_;
    k_ = static_cast<int>(b_.size()) - 1;
    Step1ab();
    if (k_ > 0) {
      Step1c();
      Step2();
      Step3();
      Step4();
      Step5();
    }
    return b_.substr(0, k_ + 1);
  }

 private:
  bool Cons(int i) const {
    switch (b_[i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !Cons(i - 1);
      default:
        return true;
    }
  }

  // Number of VC sequences in b_[0..j_].
  int M() const {
    int n = 0, i = 0;
    while (true) {
      if (i > j_) return n;
      if (!Cons(i)) break;
      ++i;
    }
    ++i;
    while (true) {
      while (true) {
        if (i > j_) return n;
        if (Cons(i)) break;
        ++i;
      }
      ++i;
      ++n;
      while (true) {
        if (i > j_) return n;
        if (!Cons(i)) break;
        ++i;
      }
      ++i;
    }
  }

  bool VowelInStem() const {
    for (int i = 0; i <= j_; ++i) {
      if (!Cons(i)) return true;
    }
    return false;
  }

  bool DoubleC(int j) const {
    if (j < 1 || b_[j] != b_[j - 1]) return false;
    return Cons(j);
  }

  bool Cvc(int i) const {
    if (i < 2 || !Cons(i) || Cons(i - 1) || !Cons(i - 2)) return false;
    const char ch = b_[i];
    return !(ch == 'w' || ch == 'x' || ch == 'y');
  }

  bool Ends(std::string_view s) {
    const int len = static_cast<int>(s.size());
    if (len > k_ + 1) return false;
    if (b_.compare(k_ - len + 1, len, s) != 0) return false;
    j_ = k_ - len;
    return true;
  }

  void SetTo(std::string_view s) {
    b_.replace(j_ + 1, k_ - j_, s);
    k_ = j_ + static_cast<int>(s.size());
    b_.resize(k_ + 1);
  }

  void R(std::string_view s) {
    if (M() > 0) SetTo(s);
  }

  void Step1ab() {
    if (b_[k_] == 's') {
      if (Ends("sses")) {
        k_ -= 2;
      } else if (Ends("ies")) {
        SetTo("i");
      } else if (b_[k_ - 1] != 's') {
        --k_;
      }
      b_.resize(k_ + 1);
    }
    if (Ends("eed")) {
      if (M() > 0) {
        --k_;
        b_.resize(k_ + 1);
      }
    } else if ((Ends("ed") || Ends("ing")) && VowelInStem()) {
      k_ = j_;
      b_.resize(k_ + 1);
      if (Ends("at")) {
        SetTo("ate");
      } else if (Ends("bl")) {
        SetTo("ble");
      } else if (Ends("iz")) {
        SetTo("ize");
      } else if (DoubleC(k_)) {
        const char ch = b_[k_];
        if (ch != 'l' && ch != 's' && ch != 'z') {
          --k_;
          b_.resize(k_ + 1);
        }
      } else {
        j_ = k_;
        if (M() == 1 && Cvc(k_)) SetTo("e");
      }
    }
  }

  void Step1c() {
    if (Ends("y") && VowelInStem()) b_[k_] = 'i';
  }

  void Step2() {
    if (k_ < 1) return;
    switch (b_[k_ - 1]) {
      case 'a':
        if (Ends("ational")) { R("ate"); break; }
        if (Ends("tional")) { R("tion"); break; }
        break;
      case 'c':
        if (Ends("enci")) { R("ence"); break; }
        if (Ends("anci")) { R("ance"); break; }
        break;
      case 'e':
        if (Ends("izer")) { R("ize"); break; }
        break;
      case 'l':
        if (Ends("bli")) { R("ble"); break; }
        if (Ends("alli")) { R("al"); break; }
        if (Ends("entli")) { R("ent"); break; }
        if (Ends("eli")) { R("e"); break; }
        if (Ends("ousli")) { R("ous"); break; }
        break;
      case 'o':
        if (Ends("ization")) { R("ize"); break; }
        if (Ends("ation")) { R("ate"); break; }
        if (Ends("ator")) { R("ate"); break; }
        break;
      case 's':
        if (Ends("alism")) { R("al"); break; }
        if (Ends("iveness")) { R("ive"); break; }
        if (Ends("fulness")) { R("ful"); break; }
        if (Ends("ousness")) { R("ous"); break; }
        break;
      case 't':
        if (Ends("aliti")) { R("al"); break; }
        if (Ends("iviti")) { R("ive"); break; }
        if (Ends("biliti")) { R("ble"); break; }
        break;
      case 'g':
        if (Ends("logi")) { R("log"); break; }
        break;
      default:
        break;
    }
  }

  void Step3() {
    switch (b_[k_]) {
      case 'e':
        if (Ends("icate")) { R("ic"); break; }
        if (Ends("ative")) { R(""); break; }
        if (Ends("alize")) { R("al"); break; }
        break;
      case 'i':
        if (Ends("iciti")) { R("ic"); break; }
        break;
      case 'l':
        if (Ends("ical")) { R("ic"); break; }
        if (Ends("ful")) { R(""); break; }
        break;
      case 's':
        if (Ends("ness")) { R(""); break; }
        break;
      default:
        break;
    }
  }

  void Step4() {
    if (k_ < 1) return;
    switch (b_[k_ - 1]) {
      case 'a':
        if (Ends("al")) break;
        return;
      case 'c':
        if (Ends("ance")) break;
        if (Ends("ence")) break;
        return;
      case 'e':
        if (Ends("er")) break;
        return;
      case 'i':
        if (Ends("ic")) break;
        return;
      case 'l':
        if (Ends("able")) break;
        if (Ends("ible")) break;
        return;
      case 'n':
        if (Ends("ant")) break;
        if (Ends("ement")) break;
        if (Ends("ment")) break;
        if (Ends("ent")) break;
        return;
      case 'o':
        if (Ends("ion") && j_ >= 0 && (b_[j_] == 's' || b_[j_] == 't')) break;
        if (Ends("ou")) break;
        return;
      case 's':
        if (Ends("ism")) break;
        return;
      case 't':
        if (Ends("ate")) break;
        if (Ends("iti")) break;
        return;
      case 'u':
        if (Ends("ous")) break;
        return;
      case 'v':
        if (Ends("ive")) break;
        return;
      case 'z':
        if (Ends("ize")) break;
        return;
      default:
        return;
    }
    if (M() > 1) {
      k_ = j_;
      b_.resize(k_ + 1);
    }
  }

  void Step5() {
    j_ = k_;
    if (b_[k_] == 'e') {
      const int a = M();
      if (a > 1 || (a == 1 && !Cvc(k_ - 1))) {
        --k_;
        b_.resize(k_ + 1);
      }
    }
    j_ = k_;
    if (b_[k_] == 'l' && DoubleC(k_) && M() > 1) {
      --k_;
      b_.resize(k_ + 1);
    }
  }

  std::string b_;
  int k_ = 0;
  int j_ = 0;
};

bool AllLowerAscii(std::string_view w) {
  for (unsigned char c : w) {
    if (c < 'a' || c > 'z') return false;
  }
  return true;
}

std::unordered_set<std::string> ParseStopwords(std::istream& in) {
  std::unordered_set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const std::string w = ToLower(Trim(line));
    if (!w.empty() && w[0] != '#') out.insert(w);
  }
  return out;
}

}  // namespace

std::vector<std::string> WordSequence(std::string_view text) {
  std::vector<std::string> words;
  std::istringstream in{std::string(text)};
  std::string chunk;
  while (in >> chunk) {
    if (IsUrlChunk(chunk)) continue;
    SplitWords(chunk, &words, nullptr);
  }
  return words;
}

std::string PorterStem(std::string_view word) {
  if (!AllLowerAscii(word)) return std::string(word);
  std::string w(word);
  // Degree suffixes: healthier / healthiest -> healthy.
  if (w.size() > 6 && w.compare(w.size() - 4, 4, "iest") == 0) {
    w = w.substr(0, w.size() - 4) + "y";
  } else if (w.size() > 5 && w.compare(w.size() - 3, 3, "ier") == 0) {
    w = w.substr(0, w.size() - 3) + "y";
  }
  return Porter(std::move(w)).Run();
}

const std::unordered_set<std::string>& DefaultStopwords() {
  static const auto* words = [] {
    std::istringstream in(kDefaultStopwordsText);
    return new std::unordered_set<std::string>(ParseStopwords(in));
  }();
  return *words;
}

std::unordered_set<std::string> LoadStopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open stopword file: " + path);
  return ParseStopwords(in);
}

Preprocessor::Preprocessor() : stopwords_(DefaultStopwords()) {}

Preprocessor::Preprocessor(std::unordered_set<std::string> stopwords)
    : stopwords_(std::move(stopwords)) {}

void Preprocessor::LoadLemmas(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open lemma file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty() || line[0] == '#') continue;
    const auto cols = SplitOn(line, '\t');
    if (cols.size() != 2 || Trim(cols[0]).empty() || Trim(cols[1]).empty()) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": expected `form<TAB>lemma`");
    }
    AddLemma(cols[0], cols[1]);
  }
}

void Preprocessor::AddLemma(const std::string& form, const std::string& lemma) {
  lemmas_[ToLower(Trim(form))] = ToLower(Trim(lemma));
}

std::string Preprocessor::Stem(const std::string& lower) const {
  if (auto it = lemmas_.find(lower); it != lemmas_.end()) return it->second;
  return PorterStem(lower);
}

TokenView Preprocessor::Process(std::string_view text) const {
  TokenView view;
  std::istringstream in{std::string(text)};
  std::string chunk;
  std::vector<std::string> words, surface;
  while (in >> chunk) {
    if (IsUrlChunk(chunk)) continue;
    if (chunk[0] == '@') continue;  // user handles
    if (chunk[0] == '#') {
      std::vector<std::string> tag;
      SplitWords(std::string_view(chunk).substr(1), &tag, nullptr);
      if (!tag.empty() && HasLetter(tag[0])) view.hashtags.push_back(tag[0]);
      continue;
    }
    words.clear();
    surface.clear();
    SplitWords(chunk, &words, &surface);
    for (size_t i = 0; i < words.size(); ++i) {
      const std::string& w = words[i];
      if (w.size() < 2 || !HasLetter(w) || IsStopword(w)) continue;
      std::string stem = Stem(w);
      if (stem.empty()) continue;
      view.tokens.push_back(std::move(stem));
      view.raw_terms.push_back(surface[i]);
    }
  }
  return view;
}

std::string Preprocessor::NormalizeTerm(std::string_view term) const {
  const TokenView v = Process(term);
  if (v.tokens.empty()) return {};
  std::string out = v.tokens[0];
  for (size_t i = 1; i < v.tokens.size(); ++i) out += " " + v.tokens[i];
  return out;
}

}  // namespace curator
