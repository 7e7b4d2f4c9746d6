#include "cf/iterint.hpp"

#include <functional>
#include <memory>

#include "cf/error.hpp"

namespace cf {

namespace {

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Suffix trie over decorated letters; a path from the root spells a decorated
// word from its last letter to its first.
struct TrieNode {
  std::map<std::pair<Letter, MultiIndex>, std::unique_ptr<TrieNode>> children;
  std::optional<ThetaArray> factor;
};

TrieNode& insert(TrieNode& root, const DecoratedWord& w) {
  TrieNode* node = &root;
  for (std::size_t i = w.word.size(); i-- > 0;) {
    auto& child = node->children[{w.word[i], w.orders[i]}];
    if (!child) child = std::make_unique<TrieNode>();
    node = child.get();
  }
  return *node;
}

}  // namespace

// ---------------------------------------------------------------------------
// InputSignal

InputSignal InputSignal::symbolic(Expr u) {
  InputSignal s;
  s.expr_ = std::move(u);
  return s;
}

InputSignal InputSignal::sampled(GridField u) {
  InputSignal s;
  s.field_ = std::move(u);
  return s;
}

Array InputSignal::derivative(const MultiIndex& alpha, const Grid& g) const {
  for (int k = 1; k <= alpha.dim(); ++k) {
    if (alpha[static_cast<std::size_t>(k - 1)] > 0 && k > g.dim()) {
      throw Error(ErrorKind::DimensionMismatch,
                  "derivative in theta_" + std::to_string(k) + " on a " +
                      std::to_string(g.dim()) + "-parameter grid");
    }
  }
  if (is_symbolic()) {
    Expr d = *expr_;
    for (int k = 1; k <= alpha.dim() && !d.is_zero(); ++k) {
      d = differentiate(d, Variable::theta(k), alpha[static_cast<std::size_t>(k - 1)]);
    }
    return sample(d, g);
  }
  if (!(field_->grid() == g)) {
    throw Error(ErrorKind::DimensionMismatch, "sampled input lives on a different grid");
  }
  if (alpha.order() > kMaxSampledOrder) {
    throw Error(ErrorKind::DerivativeOrder,
                "sampled inputs support derivative order <= " + std::to_string(kMaxSampledOrder) +
                    ", requested " + std::to_string(alpha.order()));
  }
  Array d = field_->values();
  for (int k = 1; k <= alpha.dim(); ++k) {
    const int m = alpha[static_cast<std::size_t>(k - 1)];
    if (m > 0) d = derivative_theta(d, g, k, m);
  }
  return d;
}

// ---------------------------------------------------------------------------
// Decorated words

DecoratedWord::DecoratedWord(Word w, int dim)
    : word(std::move(w)), orders(word.size(), MultiIndex(dim)) {}

DecoratedWord::DecoratedWord(Word w, std::vector<MultiIndex> o)
    : word(std::move(w)), orders(std::move(o)) {
  if (orders.size() != word.size()) {
    throw Error(ErrorKind::InvalidArgument, "one derivative order per letter is required");
  }
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (word[i].is_drift() && !orders[i].is_zero()) {
      throw Error(ErrorKind::InvalidArgument, "x0 positions carry no derivative order");
    }
  }
}

std::string DecoratedWord::str() const {
  if (word.empty()) return "e";
  std::string s;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) s += ' ';
    s += word[i].str();
    if (!orders[i].is_zero()) s += "^" + orders[i].str();
  }
  return s;
}

std::vector<std::pair<double, DecoratedWord>> expand_derivative(const Word& eta,
                                                                const MultiIndex& alpha) {
  const int dim = alpha.dim();
  std::vector<std::size_t> slots;
  for (std::size_t i = 0; i < eta.size(); ++i) {
    if (eta[i].is_input()) slots.push_back(i);
  }
  std::vector<std::pair<double, DecoratedWord>> out;
  if (slots.empty()) {
    if (alpha.is_zero()) out.emplace_back(1.0, DecoratedWord(eta, dim));
    return out;
  }
  // Distribute alpha_k over the input slots for k = 1..dim in turn; the weight
  // is the product of multinomials alpha_k! / prod(parts!).
  std::vector<MultiIndex> orders(eta.size(), MultiIndex(dim));
  std::function<void(int, std::size_t, int, double)> rec = [&](int k, std::size_t slot,
                                                               int left, double weight) {
    if (k == dim) {
      out.emplace_back(weight, DecoratedWord(eta, orders));
      return;
    }
    const std::size_t axis = static_cast<std::size_t>(k);
    if (slot + 1 == slots.size()) {
      orders[slots[slot]][axis] = left;
      rec(k + 1, 0, k + 1 < dim ? alpha[axis + 1] : 0,
          weight / factorial(left));
      orders[slots[slot]][axis] = 0;
      return;
    }
    for (int p = left; p >= 0; --p) {
      orders[slots[slot]][axis] = p;
      rec(k, slot + 1, left - p, weight / factorial(p));
    }
    orders[slots[slot]][axis] = 0;
  };
  double w0 = 1.0;
  for (int k = 0; k < dim; ++k) w0 *= factorial(alpha[static_cast<std::size_t>(k)]);
  rec(0, 0, dim > 0 ? alpha[0] : 0, w0);
  return out;
}

// ---------------------------------------------------------------------------
// Integration

IteratedIntegrator::IteratedIntegrator(Grid grid, InputMap inputs)
    : grid_(std::move(grid)), inputs_(std::move(inputs)) {}

const Array& IteratedIntegrator::input(Letter l, const MultiIndex& alpha) {
  auto key = std::make_pair(l.id(), alpha);
  auto it = input_cache_.find(key);
  if (it != input_cache_.end()) return it->second;
  if (l.is_drift()) {
    Array one = alpha.is_zero() ? Array::Ones(grid_.theta_points(), grid_.time_points())
                                : Array::Zero(grid_.theta_points(), grid_.time_points());
    return input_cache_.emplace(key, std::move(one)).first->second;
  }
  auto sig = inputs_.find(l.id());
  if (sig == inputs_.end()) {
    throw Error(ErrorKind::UnboundLetter, "no input bound to letter " + l.str());
  }
  return input_cache_.emplace(key, sig->second.derivative(alpha, grid_)).first->second;
}

Array IteratedIntegrator::step(Letter l, const MultiIndex& alpha, const Array& inner) {
  if (l.is_drift()) return cumulative_trapezoid(inner, grid_.dt());
  return cumulative_trapezoid(input(l, alpha) * inner, grid_.dt());
}

const Array& IteratedIntegrator::integral(const DecoratedWord& w) {
  auto it = cache_.find(w);
  if (it != cache_.end()) return it->second;
  if (w.word.empty()) {
    return cache_.emplace(w, Array::Ones(grid_.theta_points(), grid_.time_points()))
        .first->second;
  }
  DecoratedWord suffix(Word(std::vector<Letter>(w.word.begin() + 1, w.word.end())),
                       std::vector<MultiIndex>(w.orders.begin() + 1, w.orders.end()));
  Array value = step(w.word[0], w.orders[0], integral(suffix));
  return cache_.emplace(w, std::move(value)).first->second;
}

GridField iterated_integral(const DecoratedWord& w, const InputMap& u, const Grid& g) {
  IteratedIntegrator it(g, u);
  return GridField(g, it.integral(w));
}

GridField evaluate_series(const GenSeries& c, const InputMap& u, const Grid& g) {
  // Collect sum_{eta, alpha} weight * a_alpha(theta) per decorated word, in
  // word order and then multi-index order.
  TrieNode root;
  for (const auto& [eta, op] : c) {
    for (const auto& [alpha, a] : op) {
      const ThetaArray coef = sample_theta(a, g);
      for (const auto& [weight, dw] : expand_derivative(eta, alpha)) {
        TrieNode& node = insert(root, dw);
        if (!node.factor) node.factor = ThetaArray::Zero(g.theta_points());
        *node.factor += weight * coef;
      }
    }
  }
  IteratedIntegrator integrator(g, u);
  Array result = Array::Zero(g.theta_points(), g.time_points());
  std::function<void(const TrieNode&, const Array&)> visit = [&](const TrieNode& node,
                                                                 const Array& e) {
    if (node.factor) result += e.colwise() * *node.factor;
    for (const auto& [key, child] : node.children) {
      visit(*child, integrator.step(key.first, key.second, e));
    }
  };
  visit(root, Array::Ones(g.theta_points(), g.time_points()));
  if (!result.allFinite()) throw Error(ErrorKind::Numeric, "series evaluation produced NaN or inf");
  return GridField(g, std::move(result));
}

std::map<Word, GridField> chen_coefficients(int n, const InputMap& u, const Grid& g) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "negative word length");
  std::vector<Letter> letters{Letter::drift()};
  for (const auto& [id, sig] : u) letters.push_back(Letter::input(id));
  IteratedIntegrator integrator(g, u);
  const MultiIndex zero(g.dim());
  std::map<Word, Array> level{{Word{}, Array::Ones(g.theta_points(), g.time_points())}};
  std::map<Word, GridField> out;
  for (int len = 0;; ++len) {
    for (const auto& [w, e] : level) out.emplace(w, GridField(g, e));
    if (len == n) break;
    std::map<Word, Array> next;
    for (const auto& [w, e] : level) {
      for (Letter l : letters) next.emplace(Word{l} * w, integrator.step(l, zero, e));
    }
    level = std::move(next);
  }
  return out;
}

}  // namespace cf
