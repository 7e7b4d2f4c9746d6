#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "cf/bounds.hpp"
#include "cf/error.hpp"
#include "cf/iterint.hpp"
#include "cf/pde.hpp"
#include "cf/series.hpp"
#include "cf/verify.hpp"

namespace cf::cli {

namespace {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

// Thrown when a run produced its artifacts but flagged a divergence.
struct Divergent : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string out;
  std::string report;
  bool deterministic = false;
};

struct Context {
  std::ostream& out;
  std::ostream& err;
  Common common;
  Clock::time_point start = Clock::now();
};

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Numeric:
    case ErrorKind::Pole:
      return kNumeric;
    default:
      return kValidation;
  }
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out, "output file (stdout when absent)");
  sub->add_option("--report", c.report, "JSON report path (default <out>.json)");
  sub->add_flag("--deterministic", c.deterministic, "report runtime_ms as 0");
}

// Writes the primary artifact and its report. Without --out the artifact goes
// to stdout and the report is only written when --report names a file.
void emit(Context& ctx, const std::string& artifact, Json report) {
  const auto ms = std::chrono::duration<double, std::milli>(Clock::now() - ctx.start).count();
  report["runtime_ms"] = ctx.common.deterministic ? 0.0 : std::round(ms * 1000.0) / 1000.0;
  const std::string text = report.dump(2) + "\n";
  if (ctx.common.out.empty()) {
    ctx.out << artifact;
  } else {
    write_file_atomic(ctx.common.out, artifact);
  }
  std::string path = ctx.common.report;
  if (path.empty() && !ctx.common.out.empty()) path = ctx.common.out + ".json";
  if (!path.empty()) write_file_atomic(path, text);
}

// Report-only commands print the report itself.
void emit_report(Context& ctx, Json report) {
  const auto ms = std::chrono::duration<double, std::milli>(Clock::now() - ctx.start).count();
  report["runtime_ms"] = ctx.common.deterministic ? 0.0 : std::round(ms * 1000.0) / 1000.0;
  const std::string text = report.dump(2) + "\n";
  std::string path = ctx.common.out.empty() ? ctx.common.report : ctx.common.out;
  if (path.empty()) {
    ctx.out << text;
  } else {
    write_file_atomic(path, text);
  }
}

Json base_report(const std::string& command) {
  Json r;
  r["command"] = command;
  r["params"] = Json::object();
  r["truncation"] = nullptr;
  r["bound"] = nullptr;
  return r;
}

// --input "ID=EXPR" entries plus the --u shorthand for input 1.
InputMap parse_inputs(const std::string& u, const std::vector<std::string>& extra, int dim,
                      Json& params) {
  InputMap m;
  Json list = Json::object();
  auto bind = [&](int id, const std::string& text) {
    if (id < 1) throw Error(ErrorKind::InvalidArgument, "input ids start at 1");
    if (m.count(id)) throw Error(ErrorKind::InvalidArgument, "input x" + std::to_string(id) + " bound twice");
    Expr e = parse_expr(text, dim);
    list["x" + std::to_string(id)] = to_string(e);
    m.emplace(id, InputSignal::symbolic(std::move(e)));
  };
  if (!u.empty()) bind(1, u);
  for (const auto& s : extra) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::InvalidArgument, "--input expects ID=EXPR: " + s);
    std::string id = s.substr(0, eq);
    if (!id.empty() && (id[0] == 'x' || id[0] == 'X')) id.erase(0, 1);
    int v = 0;
    try {
      v = std::stoi(id);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "bad input id in " + s);
    }
    bind(v, s.substr(eq + 1));
  }
  params["inputs"] = list;
  return m;
}

Grid parse_grid(const std::string& text, Json& params) {
  if (text.empty()) throw Error(ErrorKind::InvalidArgument, "--grid is required");
  Grid g = Grid::parse(text);
  params["grid"] = g.str();
  return g;
}

void check_finite(const GridField& f) {
  if (!f.values().allFinite()) throw Error(ErrorKind::Numeric, "non-finite values in the result");
}

// Tail certificate for the input-driven part of a single-input series: growth
// of the coefficients of x0^k x_in and of the theta-derivatives of u are
// fitted, then the Gevrey tail past the largest kept k is summed.
Json certify(const GenSeries& c, const InputSignal& u, const Grid& g, const Placement& at,
             bool& divergent) {
  Json b;
  const int kept = c.max_len() - 1;
  std::vector<DiffOp> alpha;
  for (int k = 0; k <= kept; ++k) {
    alpha.push_back(c.coeff(Word::drift_power(k) * Word{Letter::input(at.input)}));
  }
  GrowthFit cf_fit;
  GrowthFit u_fit;
  try {
    cf_fit = estimate_coefficient_growth(alpha, g);
    u_fit = estimate_input_growth(u, g, 8, at.theta);
  } catch (const Error& e) {
    b["kind"] = "none";
    b["note"] = std::string("growth fit failed: ") + e.what();
    return b;
  }
  GrowthData d;
  d.K_alpha = cf_fit.K;
  d.M = cf_fit.zero_rate ? 0.0 : cf_fit.rate;
  d.s = std::max(0.0, cf_fit.s);
  d.K_u = u_fit.K;
  d.R = u_fit.zero_rate ? 0.0 : u_fit.rate;
  d.T = g.time_axis().hi;
  d.width = g.theta_axis(at.theta).hi - g.theta_axis(at.theta).lo;
  b["K_alpha"] = d.K_alpha;
  b["M"] = d.M;
  b["s"] = d.s;
  b["K_u"] = d.K_u;
  b["R"] = d.R;
  b["T"] = d.T;
  b["scope"] = "input-driven words x0^k x" + std::to_string(at.input);
  if (d.s < 0.999) {
    TailBound t = gevrey_tail(d, kept);
    b["kind"] = "gevrey_tail";
    b["after_k"] = kept;
    b["value"] = t.value;
    b["terms"] = t.terms;
    b["converged"] = t.converged;
    divergent = !t.converged || !std::isfinite(t.value);
  } else if (d.s <= 1.001) {
    d.s = 1.0;
    GeometricBound gb = geometric_bound(d);
    b["kind"] = "geometric";
    b["MRT"] = gb.mrt;
    b["converged"] = gb.converges;
    b["value"] = gb.converges ? Json(gb.bound) : Json(nullptr);
    divergent = !gb.converges;
  } else {
    b["kind"] = "none";
    b["note"] = "coefficient growth exceeds factorial (s > 1)";
    divergent = true;
  }
  return b;
}

// ---------------------------------------------------------------------------
// algebra

struct AlgebraArgs {
  std::string left, right, series, letter, policy = "shared";
  int N = -1;
  bool unital = false;
};

void run_algebra(Context& ctx, const std::string& op, const AlgebraArgs& a) {
  Json report = base_report("algebra " + op);
  Json& p = report["params"];
  auto load = [&](const std::string& key, const std::string& path) {
    if (path.empty()) throw Error(ErrorKind::InvalidArgument, "--" + key + " is required");
    p[key] = path;
    return read_series_file(path);
  };
  GenSeries r;
  if (op == "shuffle") {
    r = shuffle_series(load("left", a.left), load("right", a.right));
  } else if (op == "sum") {
    SupportPolicy pol;
    if (a.policy == "shared") {
      pol = SupportPolicy::Shared;
    } else if (a.policy == "concatenate") {
      pol = SupportPolicy::Concatenate;
    } else {
      throw Error(ErrorKind::InvalidArgument, "--policy must be shared or concatenate");
    }
    p["policy"] = a.policy;
    r = parallel_sum(load("left", a.left), load("right", a.right), pol);
  } else if (op == "compose") {
    GenSeries c = load("left", a.left);
    GenSeries d = load("right", a.right);
    p["unital"] = a.unital;
    r = a.unital ? compose_unital(c, d) : compose(c, d);
  } else if (op == "shift") {
    if (a.letter.empty()) throw Error(ErrorKind::InvalidArgument, "--letter is required");
    Letter l = Letter::parse(a.letter);
    p["letter"] = l.str();
    r = left_shift(l, load("series", a.series));
  } else {
    if (a.N < 0) throw Error(ErrorKind::InvalidArgument, "--N must be given and >= 0");
    p["N"] = a.N;
    r = truncate(load("series", a.series), a.N);
  }
  report["truncation"] = r.max_len();
  emit(ctx, to_string(r), report);
}

// ---------------------------------------------------------------------------
// solve / eval

struct SolveArgs {
  std::string V = "1", y0 = "0", y1 = "0", alpha1 = "0", alpha2 = "0", form = "direct";
  std::string u, grid;
  std::vector<std::string> inputs;
  int N = 8;
  int theta = 1;
  bool certificate = true;
};

void finish_solve(Context& ctx, Json report, int N, const GenSeries& c, const InputMap& inputs,
                  const Grid& g, const Placement& at, bool certificate) {
  GridField y = evaluate_series(c, inputs, g);
  check_finite(y);
  report["truncation"] = {{"N", N}, {"max_len", c.max_len()}};
  bool divergent = false;
  auto it = inputs.find(at.input);
  if (certificate && it != inputs.end()) report["bound"] = certify(c, it->second, g, at, divergent);
  emit(ctx, y.to_csv(), report);
  if (divergent) throw Divergent("tail bound diverges; results were written but are not certified");
}

void run_solve(Context& ctx, const std::string& kind, const SolveArgs& a) {
  Json report = base_report("solve " + kind);
  Json& p = report["params"];
  const Grid g = parse_grid(a.grid, p);
  Placement at;
  at.dim = g.dim();
  at.theta = a.theta;
  p["theta"] = a.theta;
  p["N"] = a.N;
  const InputMap inputs = parse_inputs(a.u, a.inputs, g.dim(), p);
  const Expr y0 = parse_expr(a.y0, g.dim());
  p["y0"] = to_string(y0);
  GenSeries c;
  if (kind == "transport") {
    TransportSpec s;
    s.V = parse_expr(a.V, g.dim());
    s.y0 = y0;
    s.N = a.N;
    s.at = at;
    p["V"] = to_string(s.V);
    c = transport_series(s);
  } else {
    SecondOrderSpec s;
    s.y0 = y0;
    s.y1 = parse_expr(a.y1, g.dim());
    s.N = a.N;
    s.at = at;
    if (kind == "wave") {
      s.alpha1 = Expr(0.0);
      s.alpha2 = Expr(-1.0);
    } else {
      s.alpha1 = parse_expr(a.alpha1, g.dim());
      s.alpha2 = parse_expr(a.alpha2, g.dim());
      p["alpha1"] = to_string(s.alpha1);
      p["alpha2"] = to_string(s.alpha2);
    }
    if (a.form == "direct") {
      s.form = SecondOrderForm::Direct;
    } else if (a.form == "cascade") {
      s.form = SecondOrderForm::Cascade;
    } else if (a.form == "partial-fraction") {
      s.form = SecondOrderForm::PartialFraction;
    } else {
      throw Error(ErrorKind::InvalidArgument, "--form must be direct, cascade or partial-fraction");
    }
    p["y1"] = to_string(s.y1);
    p["form"] = a.form;
    c = second_order_series(s);
  }
  finish_solve(ctx, report, a.N, c, inputs, g, at, a.certificate);
}

void run_eval(Context& ctx, const std::string& series, const SolveArgs& a) {
  Json report = base_report("eval");
  Json& p = report["params"];
  if (series.empty()) throw Error(ErrorKind::InvalidArgument, "--series is required");
  p["series"] = series;
  const GenSeries c = read_series_file(series);
  const Grid g = parse_grid(a.grid, p);
  const InputMap inputs = parse_inputs(a.u, a.inputs, g.dim(), p);
  GridField y = evaluate_series(c, inputs, g);
  check_finite(y);
  report["truncation"] = c.max_len();
  emit(ctx, y.to_csv(), report);
}

// ---------------------------------------------------------------------------
// bounds

struct BoundsArgs {
  double K_alpha = 1.0, M = 0.0, K_u = 1.0, R = 0.0, s = 0.0, T = 1.0, width = 1.0;
  std::optional<double> K_E;
  int N = -1;
  std::string u, grid, series, norm = "sup";
  int k_max = 8;
  int theta = 1;
};

void run_bounds_check(Context& ctx, const BoundsArgs& a) {
  Json report = base_report("bounds check");
  GrowthData d;
  d.K_alpha = a.K_alpha;
  d.M = a.M;
  d.K_u = a.K_u;
  d.R = a.R;
  d.s = a.s;
  d.T = a.T;
  d.width = a.width;
  d.K_E = a.K_E;
  const double KE = a.K_E ? *a.K_E : stirling_KE(64).value;
  report["params"] = {{"K_alpha", d.K_alpha}, {"M", d.M},   {"K_u", d.K_u}, {"R", d.R},
                      {"s", d.s},             {"T", d.T},   {"width", d.width},
                      {"K_E", KE},            {"N", a.N}};
  report["truncation"] = a.N;
  bool divergent = false;
  if (d.s == 1.0) {
    GeometricBound gb = geometric_bound(d);
    report["bound"] = {{"kind", "geometric"},
                       {"MRT", gb.mrt},
                       {"converged", gb.converges},
                       {"value", gb.converges ? Json(gb.bound) : Json(nullptr)}};
    divergent = !gb.converges;
  } else {
    TailBound t = gevrey_tail(d, a.N);
    report["bound"] = {{"kind", "gevrey_tail"},
                       {"after_k", a.N},
                       {"value", t.value},
                       {"terms", t.terms},
                       {"converged", t.converged}};
    divergent = !t.converged || !std::isfinite(t.value);
  }
  emit_report(ctx, report);
  if (divergent) throw Divergent("bound diverges");
}

void run_bounds_estimate(Context& ctx, const BoundsArgs& a) {
  Json report = base_report("bounds estimate");
  Json& p = report["params"];
  const Grid g = parse_grid(a.grid, p);
  NormKind kind;
  if (a.norm == "sup") {
    kind = NormKind::SupEnvelope;
  } else if (a.norm == "l1") {
    kind = NormKind::L1;
  } else {
    throw Error(ErrorKind::InvalidArgument, "--norm must be sup or l1");
  }
  p["norm"] = a.norm;
  p["k_max"] = a.k_max;
  p["theta"] = a.theta;
  Json est = Json::object();
  auto fit_json = [](const GrowthFit& f, bool with_s) {
    Json j = {{"K", f.K}, {"rate", f.rate}};
    if (with_s) j["s"] = f.s;
    j["residual"] = f.residual;
    j["used"] = f.used;
    j["zero_rate"] = f.zero_rate;
    j["norms"] = f.norms;
    return j;
  };
  if (a.u.empty() && a.series.empty()) {
    throw Error(ErrorKind::InvalidArgument, "give --u and/or --series");
  }
  if (!a.u.empty()) {
    const Expr u = parse_expr(a.u, g.dim());
    p["u"] = to_string(u);
    est["input"] = fit_json(
        estimate_input_growth(InputSignal::symbolic(u), g, a.k_max, a.theta, kind), false);
  }
  if (!a.series.empty()) {
    p["series"] = a.series;
    const GenSeries c = read_series_file(a.series);
    std::vector<DiffOp> alpha;
    for (int k = 0; k + 1 <= c.max_len(); ++k) {
      alpha.push_back(c.coeff(Word::drift_power(k) * Word{Letter::input(1)}));
    }
    est["coefficients"] = fit_json(estimate_coefficient_growth(alpha, g), true);
  }
  report["estimate"] = est;
  emit_report(ctx, report);
}

// ---------------------------------------------------------------------------
// verify

int run_verify(Context& ctx, const std::vector<int>& ids) {
  Json report = base_report("verify");
  report["params"]["criteria"] = ids;
  const auto results = run_acceptance(ids);
  Json list = Json::array();
  int failed = 0;
  for (const auto& r : results) {
    ctx.err << format(r) << "\n";
    if (!r.pass) ++failed;
    list.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
  }
  report["results"] = list;
  report["failed"] = failed;
  emit_report(ctx, report);
  return failed ? kValidation : kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx{out, err, {}};
  CLI::App app{"Generating series for linear PDEs with inputs"};
  app.name("cf");
  app.require_subcommand(1);

  std::function<int()> action;

  // algebra
  auto* algebra = app.add_subcommand("algebra", "operations on series files");
  algebra->require_subcommand(1);
  AlgebraArgs aa;
  for (const char* op : {"shuffle", "sum", "compose", "shift", "truncate"}) {
    auto* sub = algebra->add_subcommand(op);
    add_common(sub, ctx.common);
    const std::string name = op;
    if (name == "shift" || name == "truncate") {
      sub->add_option("--series", aa.series)->required();
    } else {
      sub->add_option("--left", aa.left)->required();
      sub->add_option("--right", aa.right)->required();
    }
    if (name == "sum") sub->add_option("--policy", aa.policy, "shared or concatenate");
    if (name == "compose") sub->add_flag("--unital", aa.unital, "read e coefficients as operators");
    if (name == "shift") sub->add_option("--letter", aa.letter)->required();
    if (name == "truncate") sub->add_option("--N", aa.N)->required();
    sub->callback([&, name] { action = [&, name] { run_algebra(ctx, name, aa); return kOk; }; });
  }

  // solve
  auto* solve = app.add_subcommand("solve", "build and evaluate a PDE series");
  solve->require_subcommand(1);
  SolveArgs sa;
  for (const char* kind : {"transport", "wave", "second-order"}) {
    auto* sub = solve->add_subcommand(kind);
    add_common(sub, ctx.common);
    const std::string name = kind;
    sub->add_option("--u", sa.u, "input u(theta, t) for x1");
    sub->add_option("--grid", sa.grid, "a:b:n per theta axis, then 0:T:n")->required();
    sub->add_option("--N", sa.N, "truncation");
    sub->add_option("--theta", sa.theta, "parameter index of the equation");
    sub->add_option("--y0", sa.y0, "initial value");
    sub->add_flag("!--no-certificate", sa.certificate, "skip the tail bound");
    if (name == "transport") sub->add_option("--V", sa.V, "velocity");
    if (name != "transport") {
      sub->add_option("--y1", sa.y1, "initial velocity");
      sub->add_option("--form", sa.form, "direct, cascade or partial-fraction");
    }
    if (name == "second-order") {
      sub->add_option("--alpha1", sa.alpha1)->required();
      sub->add_option("--alpha2", sa.alpha2)->required();
    }
    sub->callback([&, name] { action = [&, name] { run_solve(ctx, name, sa); return kOk; }; });
  }

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a series file on a grid");
  add_common(eval, ctx.common);
  std::string eval_series;
  eval->add_option("--series", eval_series)->required();
  eval->add_option("--u", sa.u, "input for x1");
  eval->add_option("--input", sa.inputs, "ID=EXPR, repeatable");
  eval->add_option("--grid", sa.grid)->required();
  eval->callback([&] { action = [&] { run_eval(ctx, eval_series, sa); return kOk; }; });

  // bounds
  auto* bounds = app.add_subcommand("bounds", "truncation bounds");
  bounds->require_subcommand(1);
  BoundsArgs ba;
  auto* check = bounds->add_subcommand("check", "tail bound from growth constants");
  add_common(check, ctx.common);
  check->add_option("--K-alpha", ba.K_alpha);
  check->add_option("--M", ba.M);
  check->add_option("--K-u", ba.K_u);
  check->add_option("--R", ba.R);
  check->add_option("--s", ba.s);
  check->add_option("--T", ba.T);
  check->add_option("--width", ba.width);
  check->add_option("--K-E", ba.K_E);
  check->add_option("--N", ba.N, "first dropped index is N+1; -1 for the full sum");
  check->callback([&] { action = [&] { run_bounds_check(ctx, ba); return kOk; }; });
  auto* estimate = bounds->add_subcommand("estimate", "fit growth constants");
  add_common(estimate, ctx.common);
  estimate->add_option("--u", ba.u);
  estimate->add_option("--series", ba.series);
  estimate->add_option("--grid", ba.grid)->required();
  estimate->add_option("--k-max", ba.k_max);
  estimate->add_option("--theta", ba.theta);
  estimate->add_option("--norm", ba.norm, "sup or l1");
  estimate->callback([&] { action = [&] { run_bounds_estimate(ctx, ba); return kOk; }; });

  // verify
  auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
  add_common(verify, ctx.common);
  std::vector<int> ids;
  verify->add_option("ids", ids, "criteria to run (all when absent)");
  verify->callback([&] { action = [&] { return run_verify(ctx, ids); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }

  try {
    return action ? action() : kValidation;
  } catch (const Divergent& e) {
    err << "error: NumericError: " << e.what() << "\n";
    return kNumeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }
}

}  // namespace cf::cli
