#include "cf/series.hpp"

#include <algorithm>

#include "cf/error.hpp"

namespace cf {

namespace {

std::set<int> intersection(const std::set<int>& a, const std::set<int>& b) {
  std::set<int> r;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(r, r.end()));
  return r;
}

std::string join(const std::set<int>& s) {
  std::string r;
  for (int k : s) r += (r.empty() ? "" : ",") + std::to_string(k);
  return r;
}

std::optional<std::set<int>> merge_declared(const std::optional<std::set<int>>& a,
                                            const std::optional<std::set<int>>& b) {
  if (!a && !b) return std::nullopt;
  std::set<int> r = a.value_or(std::set<int>{});
  if (b) r.insert(b->begin(), b->end());
  return r;
}

// Brings both operands into the larger of the two parameter spaces.
std::pair<GenSeries, GenSeries> common_space(const GenSeries& c, const GenSeries& d) {
  int dim = std::max(c.dim(), d.dim());
  return {c.embedded(dim), d.embedded(dim)};
}

int first_input_position(const Word& w) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i].is_input()) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

// ---------------------------------------------------------------------------
// GenSeries

GenSeries::GenSeries(int dim, int max_len)
    : dim_(dim), max_len_(max_len), exact_len_(max_len), alphabet_{Letter::drift()} {
  if (dim < 1) throw Error(ErrorKind::InvalidArgument, "series dimension must be positive");
  if (max_len < 0) throw Error(ErrorKind::InvalidArgument, "negative truncation level");
}

GenSeries GenSeries::unit(int dim) { return constant(DiffOp::identity(dim)); }

GenSeries GenSeries::constant(const DiffOp& a) {
  GenSeries c(a.dim(), 0);
  c.set(Word{}, a);
  return c;
}

std::set<Letter> GenSeries::input_letters() const {
  std::set<Letter> r;
  for (Letter l : alphabet_) {
    if (l.is_input()) r.insert(l);
  }
  return r;
}

void GenSeries::set_max_len(int n) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "negative truncation level");
  for (const auto& [w, a] : coeffs_) {
    if (static_cast<int>(w.size()) > n) {
      throw Error(ErrorKind::InvalidArgument, "word " + w.str() + " longer than new max_len");
    }
  }
  if (exact_len_ == max_len_ || exact_len_ > n) exact_len_ = n;
  max_len_ = n;
}

void GenSeries::set_exact_len(int n) { exact_len_ = std::clamp(n, 0, max_len_); }

void GenSeries::check_word(const Word& w) const {
  if (static_cast<int>(w.size()) > max_len_) {
    throw Error(ErrorKind::InvalidArgument,
                "word " + w.str() + " exceeds max_len " + std::to_string(max_len_));
  }
}

void GenSeries::set(const Word& w, const DiffOp& a) {
  check_word(w);
  if (a.dim() > dim_) {
    throw Error(ErrorKind::DimensionMismatch, "coefficient dimension " + std::to_string(a.dim()) +
                                                  " exceeds series dimension " +
                                                  std::to_string(dim_));
  }
  for (Letter l : w) alphabet_.insert(l);
  if (a.is_zero()) {
    coeffs_.erase(w);
  } else {
    coeffs_.insert_or_assign(w, a.embedded(dim_));
  }
}

void GenSeries::add(const Word& w, const DiffOp& a) {
  auto it = coeffs_.find(w);
  if (it == coeffs_.end()) {
    set(w, a);
  } else {
    set(w, it->second + a.embedded(dim_));
  }
}

DiffOp GenSeries::coeff(const Word& w) const {
  auto it = coeffs_.find(w);
  return it == coeffs_.end() ? DiffOp::zero(dim_) : it->second;
}

std::set<int> GenSeries::param_support() const {
  std::set<int> s = declared_.value_or(std::set<int>{});
  for (const auto& [w, a] : coeffs_) {
    for (int k : a.support()) s.insert(k);
  }
  return s;
}

bool GenSeries::is_linear() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](const auto& t) { return t.first.input_count() <= 1; });
}

GenSeries GenSeries::embedded(int dim) const {
  if (dim == dim_) return *this;
  return relabeled(dim, [](int k) { return k; });
}

GenSeries GenSeries::relabeled(int new_dim, const std::function<int(int)>& map) const {
  GenSeries r(new_dim, max_len_);
  r.exact_len_ = exact_len_;
  r.alphabet_ = alphabet_;
  for (const auto& [w, a] : coeffs_) r.coeffs_.emplace(w, a.relabeled(new_dim, map));
  if (declared_) {
    std::set<int> s;
    for (int k : *declared_) s.insert(map(k));
    r.declared_ = s;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Interconnections

GenSeries parallel_sum(const GenSeries& c, const GenSeries& d, SupportPolicy policy) {
  GenSeries lhs = c;
  GenSeries rhs = d;
  if (policy == SupportPolicy::Concatenate) {
    const int shift = c.dim();
    lhs = c.embedded(c.dim() + d.dim());
    rhs = d.relabeled(c.dim() + d.dim(), [shift](int k) { return k + shift; });
  } else {
    std::tie(lhs, rhs) = common_space(c, d);
  }
  GenSeries r(lhs.dim(), std::max(lhs.max_len(), rhs.max_len()));
  for (Letter l : lhs.alphabet()) r.add_letter(l);
  for (Letter l : rhs.alphabet()) r.add_letter(l);
  for (const auto& [w, a] : lhs) r.add(w, a);
  for (const auto& [w, a] : rhs) r.add(w, a);
  r.set_exact_len(std::min(lhs.exact_len(), rhs.exact_len()));
  if (auto s = merge_declared(lhs.declared_support(), rhs.declared_support())) {
    r.declare_support(*s);
  }
  return r;
}

GenSeries operator+(const GenSeries& c, const GenSeries& d) { return parallel_sum(c, d); }

GenSeries scale(const Expr& e, const GenSeries& c) {
  GenSeries r(c.dim(), c.max_len());
  for (Letter l : c.alphabet()) r.add_letter(l);
  for (const auto& [w, a] : c) r.set(w, scale(e, a));
  r.set_exact_len(c.exact_len());
  if (c.declared_support()) r.declare_support(*c.declared_support());
  return r;
}

GenSeries shuffle_series(const GenSeries& c, const GenSeries& d) {
  auto [lhs, rhs] = common_space(c, d);
  auto common = intersection(lhs.param_support(), rhs.param_support());
  if (!common.empty()) {
    throw Error(ErrorKind::OverlappingSupport,
                "parameter supports share theta index {" + join(common) + "}");
  }
  std::set<int> letters;
  for (Letter l : lhs.input_letters()) {
    if (rhs.input_letters().count(l)) letters.insert(l.id());
  }
  if (!letters.empty()) {
    throw Error(ErrorKind::OverlappingSupport,
                "input alphabets share letter id {" + join(letters) + "}");
  }
  return shuffle_series_naive(lhs, rhs);
}

GenSeries shuffle_series_naive(const GenSeries& c, const GenSeries& d) {
  auto [lhs, rhs] = common_space(c, d);
  GenSeries r(lhs.dim(), lhs.max_len() + rhs.max_len());
  for (Letter l : lhs.alphabet()) r.add_letter(l);
  for (Letter l : rhs.alphabet()) r.add_letter(l);
  for (const auto& [eta, a] : lhs) {
    for (const auto& [xi, b] : rhs) {
      DiffOp ab = a * b;
      if (ab.is_zero()) continue;
      for (const auto& [w, mult] : shuffle(eta, xi)) r.add(w, scale(Expr(mult), ab));
    }
  }
  r.set_exact_len(std::min(lhs.exact_len(), rhs.exact_len()));
  if (auto s = merge_declared(lhs.declared_support(), rhs.declared_support())) {
    r.declare_support(*s);
  }
  return r;
}

GenSeries compose(const GenSeries& c, const GenSeries& d) {
  if (!c.is_linear()) {
    for (const auto& [w, a] : c) {
      if (w.input_count() > 1) {
        throw Error(ErrorKind::NotLinear,
                    "word " + w.str() + " has " + std::to_string(w.input_count()) +
                        " input letters");
      }
    }
  }
  if (c.input_letters().size() > 1) {
    throw Error(ErrorKind::InvalidArgument, "compose needs c with a single input letter");
  }
  auto [lhs, rhs] = common_space(c, d);
  const int max_len = lhs.max_len() + rhs.max_len() + 1;
  GenSeries r(lhs.dim(), max_len);
  for (Letter l : rhs.alphabet()) r.add_letter(l);
  for (const auto& [eta, a] : lhs) {
    const int pos = first_input_position(eta);
    if (pos < 0) {
      // psi_d(x0^k)(1) = x0^k.
      r.add(eta, a);
      continue;
    }
    const int i = pos;
    const int j = static_cast<int>(eta.size()) - pos - 1;
    const Word head = Word::drift_power(i + 1);
    const Word tail = Word::drift_power(j);
    for (const auto& [xi, b] : rhs) {
      DiffOp ab = a * b;
      if (ab.is_zero()) continue;
      for (const auto& [w, mult] : shuffle(xi, tail)) {
        Word full = head * w;
        if (static_cast<int>(full.size()) > max_len) continue;
        r.add(full, scale(Expr(mult), ab));
      }
    }
  }
  r.set_exact_len(std::min(lhs.exact_len(), rhs.exact_len() + 1));
  if (auto s = merge_declared(lhs.declared_support(), rhs.declared_support())) {
    r.declare_support(*s);
  }
  return r;
}

GenSeries compose_unital(const GenSeries& c, const GenSeries& d) {
  auto [lhs, rhs] = common_space(c, d);
  const int dim = lhs.dim();
  const DiffOp a = lhs.coeff(Word{});
  const DiffOp b = rhs.coeff(Word{});

  GenSeries c_in(dim, lhs.max_len());
  GenSeries d_plus(dim, rhs.max_len());
  for (Letter l : lhs.alphabet()) c_in.add_letter(l);
  for (Letter l : rhs.alphabet()) d_plus.add_letter(l);
  for (const auto& [w, op] : lhs) {
    if (w.input_count() > 0) c_in.set(w, op);
  }
  for (const auto& [w, op] : rhs) {
    if (!w.empty()) d_plus.set(w, op);
  }
  d_plus.set_exact_len(rhs.exact_len());

  // (a I + c0 + c_in)[b u + d+[u]] = a b u + a d+[u] + c0 + c_in[b u] + c_in[d+[u]].
  GenSeries r = compose(c_in, d_plus);
  r.set_max_len(std::max({r.max_len(), lhs.max_len(), rhs.max_len()}));
  if (!a.is_zero() && !b.is_zero()) r.add(Word{}, a * b);
  if (!a.is_zero()) {
    for (const auto& [w, op] : d_plus) r.add(w, a * op);
  }
  for (const auto& [w, op] : lhs) {
    if (w.empty()) continue;
    if (w.input_count() == 0) {
      r.add(w, op);
    } else if (!b.is_zero()) {
      r.add(w, op * b);
    }
  }
  r.set_exact_len(std::min(lhs.exact_len(), rhs.exact_len()));
  return r;
}

GenSeries left_shift(Letter l, const GenSeries& c) {
  GenSeries r(c.dim(), std::max(0, c.max_len() - 1));
  for (Letter a : c.alphabet()) r.add_letter(a);
  for (const auto& [w, a] : c) {
    if (w.empty() || w[0] != l) continue;
    r.set(Word(std::vector<Letter>(w.begin() + 1, w.end())), a);
  }
  r.set_exact_len(c.exact_len() - 1);
  if (c.declared_support()) r.declare_support(*c.declared_support());
  return r;
}

GenSeries truncate(const GenSeries& c, int n) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "negative truncation level");
  GenSeries r(c.dim(), std::min(n, c.max_len()));
  for (Letter a : c.alphabet()) r.add_letter(a);
  for (const auto& [w, a] : c) {
    if (static_cast<int>(w.size()) <= n) r.set(w, a);
  }
  r.set_exact_len(std::min(c.exact_len(), n));
  if (c.declared_support()) r.declare_support(*c.declared_support());
  return r;
}

GenSeries linear_part(const GenSeries& c) {
  GenSeries r(c.dim(), c.max_len());
  for (Letter a : c.alphabet()) r.add_letter(a);
  for (const auto& [w, a] : c) {
    if (w.input_count() <= 1) r.set(w, a);
  }
  r.set_exact_len(c.exact_len());
  if (c.declared_support()) r.declare_support(*c.declared_support());
  return r;
}

bool equivalent(const GenSeries& a, const GenSeries& b, int max_len, double tol) {
  auto [lhs, rhs] = common_space(a, b);
  std::set<Word> words;
  for (const auto& [w, op] : lhs) words.insert(w);
  for (const auto& [w, op] : rhs) words.insert(w);
  for (const auto& w : words) {
    if (static_cast<int>(w.size()) > max_len) continue;
    if (!equivalent(lhs.coeff(w), rhs.coeff(w), tol)) return false;
  }
  return true;
}

}  // namespace cf
