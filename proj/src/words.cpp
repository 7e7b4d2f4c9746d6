#include "cf/words.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "cf/error.hpp"

namespace cf {

Letter Letter::input(int id) {
  if (id < 1) throw Error(ErrorKind::InvalidArgument, "input letter ids start at 1");
  return Letter(id);
}

Letter Letter::parse(std::string_view token) {
  int id = -1;
  if (token.size() >= 2 && token.front() == 'x') {
    auto digits = token.substr(1);
    if (digits.size() == 1 || digits.front() != '0') {
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), id);
      if (ec != std::errc() || ptr != digits.data() + digits.size()) id = -1;
    }
  }
  if (id < 0) throw Error(ErrorKind::Parse, "bad letter '" + std::string(token) + "'");
  return Letter(id);
}

int Word::input_count() const {
  return static_cast<int>(
      std::count_if(letters_.begin(), letters_.end(), [](Letter l) { return l.is_input(); }));
}

std::string Word::str() const {
  if (letters_.empty()) return "e";
  std::string s;
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (i) s += ' ';
    s += letters_[i].str();
  }
  return s;
}

Word Word::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<Letter> letters;
  std::string tok;
  bool saw_empty = false;
  while (in >> tok) {
    if (tok == "e") {
      saw_empty = true;
      continue;
    }
    letters.push_back(Letter::parse(tok));
  }
  if (saw_empty && !letters.empty()) {
    throw Error(ErrorKind::Parse, "'e' denotes the empty word and cannot be combined");
  }
  if (!saw_empty && letters.empty()) throw Error(ErrorKind::Parse, "empty word text");
  return Word(std::move(letters));
}

std::strong_ordering operator<=>(const Word& a, const Word& b) {
  if (auto c = a.size() <=> b.size(); c != 0) return c;
  return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
}

std::size_t WordHash::operator()(const Word& w) const {
  std::size_t h = w.size();
  for (Letter l : w) h = h * 1000003U ^ static_cast<std::size_t>(l.id());
  return h;
}

Word concat(const Word& a, const Word& b) {
  std::vector<Letter> l = a.letters();
  l.insert(l.end(), b.begin(), b.end());
  return Word(std::move(l));
}

Word operator*(const Word& a, const Word& b) { return concat(a, b); }

int count_letter(const Word& w, Letter l) {
  return static_cast<int>(std::count(w.begin(), w.end(), l));
}

void WordPoly::add(const Word& w, Scalar c) {
  if (c == Scalar(0.0)) return;
  auto [it, inserted] = terms_.try_emplace(w, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Scalar(0.0)) terms_.erase(it);
  }
}

Scalar WordPoly::coeff(const Word& w) const {
  auto it = terms_.find(w);
  return it == terms_.end() ? Scalar(0.0) : it->second;
}

WordPoly& WordPoly::operator+=(const WordPoly& other) {
  for (const auto& [w, c] : other.terms_) add(w, c);
  return *this;
}

WordPoly operator*(Scalar c, const WordPoly& p) {
  WordPoly r;
  for (const auto& [w, v] : p.terms_) r.add(w, c * v);
  return r;
}

std::string WordPoly::str() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (const auto& [w, c] : terms_) {
    if (!s.empty()) s += " + ";
    s += to_string(Expr(c)) + "*[" + w.str() + "]";
  }
  return s;
}

WordPoly shuffle(const Word& a, const Word& b) {
  // table[i][j] holds the shuffle of the suffixes a[i:] and b[j:], built from
  // (x a') sh (y b') = x (a' sh y b') + y (x a' sh b').
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<std::vector<std::map<Word, double>>> table(
      n + 1, std::vector<std::map<Word, double>>(m + 1));
  for (std::size_t i = n + 1; i-- > 0;) {
    for (std::size_t j = m + 1; j-- > 0;) {
      auto& cell = table[i][j];
      if (i == n) {
        cell[Word(std::vector<Letter>(b.begin() + static_cast<std::ptrdiff_t>(j), b.end()))] = 1.0;
        continue;
      }
      if (j == m) {
        cell[Word(std::vector<Letter>(a.begin() + static_cast<std::ptrdiff_t>(i), a.end()))] = 1.0;
        continue;
      }
      for (const auto& [w, c] : table[i + 1][j]) cell[concat(Word{a[i]}, w)] += c;
      for (const auto& [w, c] : table[i][j + 1]) cell[concat(Word{b[j]}, w)] += c;
    }
  }
  WordPoly r;
  for (const auto& [w, c] : table[0][0]) r.add(w, c);
  return r;
}

WordPoly shuffle(const WordPoly& a, const WordPoly& b) {
  WordPoly r;
  for (const auto& [u, cu] : a) {
    for (const auto& [v, cv] : b) r += (cu * cv) * shuffle(u, v);
  }
  return r;
}

}  // namespace cf
