#pragma once

#include <limits>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "cf/diffop.hpp"
#include "cf/words.hpp"

namespace cf {

// Truncated generating series: Word -> DiffOp with finite support.
//
// max_len is the truncation level: no stored word is longer. exact_len is the
// length up to which the stored coefficients are known to be those of the
// untruncated series; builders set it to max_len and binary operations
// propagate the guaranteed prefix.
class GenSeries {
 public:
  explicit GenSeries(int dim = 1, int max_len = 0);

  // 1 * e, the unit of the shuffle product.
  static GenSeries unit(int dim);
  // a * e.
  static GenSeries constant(const DiffOp& a);

  int dim() const { return dim_; }
  int max_len() const { return max_len_; }
  int exact_len() const { return exact_len_; }
  const std::set<Letter>& alphabet() const { return alphabet_; }
  std::set<Letter> input_letters() const;

  void add_letter(Letter l) { alphabet_.insert(l); }
  // Raises max_len; words already stored stay valid.
  void set_max_len(int n);
  void set_exact_len(int n);

  // Replaces the coefficient of w (zero removes it). Letters of w join the
  // alphabet; w must not be longer than max_len.
  void set(const Word& w, const DiffOp& a);
  // Adds a to the coefficient of w.
  void add(const Word& w, const DiffOp& a);

  DiffOp coeff(const Word& w) const;
  bool contains(const Word& w) const { return coeffs_.count(w) != 0; }
  const std::map<Word, DiffOp>& coeffs() const { return coeffs_; }
  std::size_t size() const { return coeffs_.size(); }
  auto begin() const { return coeffs_.begin(); }
  auto end() const { return coeffs_.end(); }

  // Declared parameter support; the effective support also contains every
  // theta index that a stored coefficient touches.
  void declare_support(std::set<int> s) { declared_ = std::move(s); }
  const std::optional<std::set<int>>& declared_support() const { return declared_; }
  std::set<int> param_support() const;

  // Every stored word has at most one input-letter occurrence.
  bool is_linear() const;

  // Same series in a parameter space of dimension dim >= this->dim().
  GenSeries embedded(int dim) const;
  // theta_k -> theta_{map(k)}.
  GenSeries relabeled(int new_dim, const std::function<int(int)>& map) const;

 private:
  void check_word(const Word& w) const;

  int dim_;
  int max_len_;
  int exact_len_;
  std::set<Letter> alphabet_;
  std::map<Word, DiffOp> coeffs_;
  std::optional<std::set<int>> declared_;
};

// How parallel_sum treats the parameter spaces of its operands.
enum class SupportPolicy {
  Shared,       // theta_k of c and theta_k of d are the same parameter
  Concatenate,  // d's parameters are renamed theta_{dim(c)+k}
};

GenSeries parallel_sum(const GenSeries& c, const GenSeries& d,
                       SupportPolicy policy = SupportPolicy::Shared);
GenSeries operator+(const GenSeries& c, const GenSeries& d);
// Left multiplication of every coefficient by e.
GenSeries scale(const Expr& e, const GenSeries& c);

// c shuffle d for series on disjoint parameters and disjoint input letters.
// Throws OverlappingSupport otherwise.
GenSeries shuffle_series(const GenSeries& c, const GenSeries& d);
// The same sum with no precondition. Only meaningful as a counterexample.
GenSeries shuffle_series_naive(const GenSeries& c, const GenSeries& d);

// Composition product c o d for linear c with one input letter: the series of
// the cascade u -> F_c[F_d[u]]. Throws NotLinear when c is not linear.
GenSeries compose(const GenSeries& c, const GenSeries& d);

// Composition of series read as operators I-form: the e coefficient of c and
// d multiplies the input itself (a * u) instead of being a constant output.
// Used for inverses such as (I + beta D E_x1)^{-1}.
GenSeries compose_unital(const GenSeries& c, const GenSeries& d);

// l^{-1}(c): the coefficient of w in the result is the coefficient of l w in c.
GenSeries left_shift(Letter l, const GenSeries& c);
GenSeries truncate(const GenSeries& c, int n);
// Restriction to words with at most one input letter.
GenSeries linear_part(const GenSeries& c);
inline bool is_linear(const GenSeries& c) { return c.is_linear(); }

// Coefficient-wise operator equivalence on all words of length <= max_len.
bool equivalent(const GenSeries& a, const GenSeries& b, int max_len, double tol = 1e-9);

// Text format: a header line "dim=<d> maxlen=<N> alphabet=x0,x1[,...]"
// optionally followed by "exact=<n>" and "support=<k,...>", then one line
// "<word> :: <diffop>" per stored word. '#' starts a comment line.
std::string to_string(const GenSeries& c);
GenSeries parse_series(std::string_view text);
GenSeries read_series_file(const std::string& path);
void write_series_file(const std::string& path, const GenSeries& c);

// Writes through a temporary file in the same directory, then renames.
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace cf
