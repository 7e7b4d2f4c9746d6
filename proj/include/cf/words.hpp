#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cf/expr.hpp"

namespace cf {

// A letter of the alphabet: the drift x0 or an input letter x<id>, id >= 1.
class Letter {
 public:
  static Letter drift() { return Letter(0); }
  static Letter input(int id);

  bool is_drift() const { return code_ == 0; }
  bool is_input() const { return code_ != 0; }
  // 0 for the drift letter.
  int id() const { return code_; }

  std::string str() const { return "x" + std::to_string(code_); }
  static Letter parse(std::string_view token);

  // x0 < x1 < x2 < ...
  friend auto operator<=>(const Letter&, const Letter&) = default;

 private:
  explicit Letter(int code) : code_(code) {}
  int code_;
};

// Element of the free monoid X*. Ordered by length, then lexicographically.
class Word {
 public:
  Word() = default;
  Word(std::initializer_list<Letter> letters) : letters_(letters) {}
  explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) {}

  // x0^k.
  static Word drift_power(int k) { return Word(std::vector<Letter>(k, Letter::drift())); }

  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  const Letter& operator[](std::size_t i) const { return letters_[i]; }
  const std::vector<Letter>& letters() const { return letters_; }
  auto begin() const { return letters_.begin(); }
  auto end() const { return letters_.end(); }

  // Number of input-letter occurrences.
  int input_count() const;

  // Space separated letters, "e" for the empty word.
  std::string str() const;
  static Word parse(std::string_view text);

  friend bool operator==(const Word&, const Word&) = default;
  friend std::strong_ordering operator<=>(const Word& a, const Word& b);

 private:
  std::vector<Letter> letters_;
};

struct WordHash {
  std::size_t operator()(const Word& w) const;
};

Word concat(const Word& a, const Word& b);
Word operator*(const Word& a, const Word& b);
int count_letter(const Word& w, Letter l);

// Finite linear combination of words with complex coefficients; zero
// coefficients are never stored.
class WordPoly {
 public:
  WordPoly() = default;
  WordPoly(const Word& w, Scalar c = 1.0) { add(w, c); }

  void add(const Word& w, Scalar c);
  Scalar coeff(const Word& w) const;

  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  auto begin() const { return terms_.begin(); }
  auto end() const { return terms_.end(); }

  WordPoly& operator+=(const WordPoly& other);
  friend WordPoly operator+(WordPoly a, const WordPoly& b) { return a += b; }
  friend WordPoly operator*(Scalar c, const WordPoly& p);
  friend bool operator==(const WordPoly&, const WordPoly&) = default;

  std::string str() const;

 private:
  std::map<Word, Scalar> terms_;
};

// Shuffle product of two words; multiplicities are integers.
WordPoly shuffle(const Word& a, const Word& b);
// Bilinear extension to word polynomials.
WordPoly shuffle(const WordPoly& a, const WordPoly& b);

}  // namespace cf
