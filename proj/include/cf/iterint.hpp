#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "cf/diffop.hpp"
#include "cf/grid.hpp"
#include "cf/series.hpp"
#include "cf/words.hpp"

namespace cf {

// An input u_i(theta, t): symbolic (exact theta-derivatives) or sampled on
// the evaluation grid (finite-difference derivatives of total order <= 4).
class InputSignal {
 public:
  static constexpr int kMaxSampledOrder = 4;

  static InputSignal symbolic(Expr u);
  static InputSignal sampled(GridField u);

  bool is_symbolic() const { return expr_.has_value(); }
  const Expr& expr() const { return *expr_; }
  const GridField& field() const { return *field_; }

  // D^alpha u sampled on g.
  Array derivative(const MultiIndex& alpha, const Grid& g) const;

 private:
  std::optional<Expr> expr_;
  std::optional<GridField> field_;
};

// Input letter id -> signal. The drift letter x0 always carries u0 = 1.
using InputMap = std::map<int, InputSignal>;

// A word whose input-letter occurrences carry theta-derivative orders.
struct DecoratedWord {
  Word word;
  std::vector<MultiIndex> orders;  // one per letter; zero on x0 positions

  DecoratedWord() = default;
  DecoratedWord(Word w, int dim);
  DecoratedWord(Word w, std::vector<MultiIndex> orders);

  std::string str() const;  // "x0 x1^[2]" style
  friend auto operator<=>(const DecoratedWord&, const DecoratedWord&) = default;
};

// D^alpha E_eta[u] = sum weight * E_decorated[u]. Derivatives landing on x0
// positions vanish, so a word without input letters gives an empty list
// unless alpha = 0.
std::vector<std::pair<double, DecoratedWord>> expand_derivative(const Word& eta,
                                                                const MultiIndex& alpha);

// Iterated integrals with a suffix cache: E_{x_i w}[u] reuses E_w[u].
class IteratedIntegrator {
 public:
  IteratedIntegrator(Grid grid, InputMap inputs);

  const Grid& grid() const { return grid_; }
  const Array& integral(const DecoratedWord& w);
  // D^alpha u_l on the grid (1 for the drift letter).
  const Array& input(Letter l, const MultiIndex& alpha);
  // One integration step: int_0^t u_l^{(alpha)} inner dtau.
  Array step(Letter l, const MultiIndex& alpha, const Array& inner);

  void clear() { cache_.clear(); }

 private:
  Grid grid_;
  InputMap inputs_;
  std::map<DecoratedWord, Array> cache_;
  std::map<std::pair<int, MultiIndex>, Array> input_cache_;
};

GridField iterated_integral(const DecoratedWord& w, const InputMap& u, const Grid& g);

// F_c[u] on g. Words are visited along a suffix trie so that only one branch
// of partial integrals is alive at a time.
GridField evaluate_series(const GenSeries& c, const InputMap& u, const Grid& g);

// E_eta[u] for every word of length <= n over the letters of u plus x0.
std::map<Word, GridField> chen_coefficients(int n, const InputMap& u, const Grid& g);

}  // namespace cf
