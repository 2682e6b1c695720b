#include "sheetgame/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "sheetgame/errors.hpp"
#include "sheetgame/identities.hpp"
#include "sheetgame/parallel.hpp"
#include "sheetgame/pollution.hpp"

namespace sheetgame {

using nlohmann::json;

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"simulate-sheet", "verify-ito",     "verify-ibp",
                                              "wellposedness",  "check-nash",     "solve-example1",
                                              "solve-example2", "symmetric-report"};
  return names;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

// Strict view of a JSON object: every key must be consumed before finish().
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(&j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError("config: '" + display() + "' must be an object");
  }

  bool has(const std::string& key) const { return j_->contains(key); }

  const json& raw(const std::string& key) {
    if (!has(key)) throw ConfigError("config: missing key '" + qualified(key) + "'");
    used_.insert(key);
    return j_->at(key);
  }

  double num(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError("config: '" + qualified(key) + "' must be a number");
    return v.get<double>();
  }
  double num(const std::string& key, double fallback) { return has(key) ? num(key) : fallback; }

  long long integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError("config: '" + qualified(key) + "' must be an integer");
    return v.get<long long>();
  }
  long long integer(const std::string& key, long long fallback) { return has(key) ? integer(key) : fallback; }

  std::string str(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError("config: '" + qualified(key) + "' must be a string");
    return v.get<std::string>();
  }

  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError("config: '" + qualified(key) + "' must be true or false");
    return v.get<bool>();
  }

  Obj child(const std::string& key) { return Obj(raw(key), qualified(key)); }

  std::vector<double> numbers(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError("config: '" + qualified(key) + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError("config: '" + qualified(key) + "' must be an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<std::vector<double>> rows(const std::string& key, std::size_t width) {
    const json& v = raw(key);
    std::vector<std::vector<double>> out;
    const std::string msg = "config: '" + qualified(key) + "' must be an array of " + std::to_string(width) +
                            "-element number arrays";
    if (!v.is_array()) throw ConfigError(msg);
    for (const auto& r : v) {
      if (!r.is_array() || r.size() != width) throw ConfigError(msg);
      std::vector<double> row;
      for (const auto& e : r) {
        if (!e.is_number()) throw ConfigError(msg);
        row.push_back(e.get<double>());
      }
      out.push_back(std::move(row));
    }
    return out;
  }

  void finish() const {
    for (auto it = j_->begin(); it != j_->end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError("config: unknown key '" + qualified(it.key()) + "'");
    }
  }

 private:
  const json* j_;
  std::string path_;
  std::set<std::string> used_;

  std::string display() const { return path_.empty() ? "<root>" : path_; }
  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
};

class Csv {
 public:
  Csv(const std::filesystem::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw ConfigError("cannot write " + path.string());
    line(header);
  }
  void line(const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) out_ << (k ? "," : "") << cells[k];
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

std::string num(double v) { return format_number(v); }
std::string num(std::size_t v) { return std::to_string(v); }
std::string num(int v) { return std::to_string(v); }

struct Context {
  Obj root;
  std::filesystem::path out;
  const RunOverrides& overrides;
  RunResult& result;

  std::uint64_t seed() {
    const long long s = root.integer("seed");
    if (s < 0) throw ConfigError("config: 'seed' must be >= 0");
    return overrides.seed ? *overrides.seed : static_cast<std::uint64_t>(s);
  }
  std::size_t paths() {
    const long long n = root.integer("n_paths");
    if (n < 1) throw ConfigError("config: 'n_paths' must be >= 1");
    return overrides.paths ? *overrides.paths : static_cast<std::size_t>(n);
  }
  GridSpec grid() {
    Obj g = root.child("grid");
    const double T = g.num("T");
    const double X = g.num("X");
    const long long nt = g.integer("nt");
    const long long nx = g.integer("nx");
    g.finish();
    return GridSpec(T, X, static_cast<int>(nt), static_cast<int>(nx));
  }
  std::filesystem::path file(const std::string& name) {
    const auto p = out / name;
    result.outputs.push_back(p);
    return p;
  }
  void check(std::string name, bool pass, std::string detail) {
    result.checks.push_back({std::move(name), pass, std::move(detail)});
  }
};

GridPoint locate_point(const GridSpec& g, const std::vector<double>& tx) {
  if (tx.size() != 2) throw ConfigError("config: points are [t, x]");
  return g.locate(tx[0], tx[1]);
}

// c + ct t + cx x + cy y
std::function<double(double, double, double)> affine_coefficient(Obj o) {
  const double c = o.num("const", 0.0), ct = o.num("t", 0.0), cx = o.num("x", 0.0), cy = o.num("y", 0.0);
  o.finish();
  return [=](double t, double x, double y) { return c + ct * t + cx * x + cy * y; };
}

struct ProcessConfig {
  double y0 = 0.0;
  std::function<double(double, double, double)> alpha = [](double, double, double) { return 0.0; };
  std::function<double(double, double, double)> beta = [](double, double, double) { return 0.0; };
  double psi = 0.0;

  ProcessSpec on(const GridSpec& g) const {
    ProcessSpec s;
    s.y0 = y0;
    s.alpha = alpha;
    s.beta = beta;
    if (psi != 0.0) s.psi = PairField::constant(g, psi);
    return s;
  }
};

ProcessConfig read_process(Obj o) {
  ProcessConfig p;
  p.y0 = o.num("y0", 0.0);
  if (o.has("alpha")) p.alpha = affine_coefficient(o.child("alpha"));
  if (o.has("beta")) p.beta = affine_coefficient(o.child("beta"));
  p.psi = o.num("psi", 0.0);
  o.finish();
  return p;
}

SmoothFn read_function(Obj o) {
  const std::string kind = o.str("kind", "");
  SmoothFn f;
  if (kind == "identity") {
    f = SmoothFn::identity();
  } else if (kind == "polynomial") {
    f = SmoothFn::polynomial(o.numbers("coeffs"));
  } else if (kind == "exp") {
    f = SmoothFn::exponential(o.num("k"));
  } else if (kind == "sin") {
    f = SmoothFn::sine();
  } else {
    throw ConfigError("config: 'function.kind' must be identity, polynomial, exp or sin");
  }
  o.finish();
  return f;
}

Example1Params read_example1(Obj o, const GridSpec& g) {
  Example1Params p;
  p.a1 = o.num("a1");
  p.a2 = o.num("a2");
  p.c1 = o.num("c1");
  p.c2 = o.num("c2");
  p.sigma = o.num("sigma");
  p.y = o.num("y");
  p.T = g.T();
  p.X = g.X();
  o.finish();
  p.validate();
  return p;
}

Example2Params read_example2(Obj o, const GridSpec& g) {
  Example2Params p;
  p.alpha1 = o.num("alpha1");
  p.alpha2 = o.num("alpha2");
  p.beta1 = o.num("beta1");
  p.beta2 = o.num("beta2");
  const double sigma = o.num("sigma");
  const double source = o.num("source");
  p.sigma = [sigma](double, double) { return sigma; };
  p.source = [source](double, double) { return source; };
  p.y = o.num("y");
  const std::string coupling = o.str("star_coupling", "displayed");
  if (coupling == "displayed") p.star_coupling = StarCoupling::kDisplayed;
  else if (coupling == "derived") p.star_coupling = StarCoupling::kDerived;
  else throw ConfigError("config: 'params.star_coupling' must be displayed or derived");
  p.T = g.T();
  p.X = g.X();
  o.finish();
  p.validate();
  return p;
}

PicardOptions read_picard(Context& c) {
  PicardOptions o;
  if (!c.root.has("picard")) return o;
  Obj p = c.root.child("picard");
  o.damping = p.num("damping", o.damping);
  o.max_iter = static_cast<int>(p.integer("max_iter", o.max_iter));
  o.tol = p.num("tol", o.tol);
  p.finish();
  if (!(o.damping > 0.0 && o.damping <= 1.0)) throw ConfigError("config: 'picard.damping' must be in (0, 1]");
  if (o.max_iter < 1) throw ConfigError("config: 'picard.max_iter' must be >= 1");
  return o;
}

Example1Formulation read_formulation(Context& c) {
  const std::string f = c.root.str("formulation", "reduction");
  if (f == "reduction") return Example1Formulation::kReduction;
  if (f == "playerwise") return Example1Formulation::kPlayerwise;
  throw ConfigError("config: 'formulation' must be reduction or playerwise");
}

void write_report(Context& c, const std::string& name, const ItoReport& r) {
  Csv csv(c.file(name), {"term_group", "value", "stderr"});
  csv.line({"lhs", num(r.lhs.mean), num(r.lhs.stderr_)});
  for (const auto& g : r.groups) csv.line({g.name, num(g.estimate.mean), num(g.estimate.stderr_)});
  csv.line({"rhs_expectation", num(r.rhs_expectation), ""});
  csv.line({"rhs_full", num(r.rhs_full), ""});
  csv.line({"gap", num(r.gap.mean), num(r.gap.stderr_)});
  csv.line({"allowance", num(r.allowance), ""});
  csv.line({"max_pathwise_error", num(r.max_pathwise_error), ""});
}

void write_nash(Context& c, const NashReport& r) {
  Csv csv(c.file("nash.csv"), {"player", "direction_id", "epsilon", "delta_J", "stderr", "pass"});
  for (const auto& row : r.rows) {
    csv.line({num(row.player + 1), row.direction_id, num(row.epsilon), num(row.delta_J.mean),
              num(row.delta_J.stderr_), row.pass ? "1" : "0"});
  }
  c.check("nash", r.pass, std::to_string(r.failures) + " of " + std::to_string(r.rows.size()) +
                              " unilateral perturbations lowered a cost beyond 3 stderr");
}

void write_solution(Context& c, const EquilibriumSolution& s) {
  const GridSpec& g = s.ensemble.grid();
  const std::size_t N = s.states.size();
  auto mean_at = [&](const std::vector<Field>& f, int i, int j) {
    if (f.empty()) return 0.0;
    double acc = 0.0;
    for (std::size_t k = 0; k < N; ++k) acc += on_path(f, k)(i, j);
    return acc / static_cast<double>(N);
  };
  std::vector<Field> ys;
  for (const auto& st : s.states) ys.push_back(st.y);
  Csv csv(c.file("solution.csv"), {"t", "x", "mean_u1", "mean_u2", "mean_Y", "mean_p1", "mean_p2"});
  for (int i = 0; i <= g.nt(); ++i) {
    for (int j = 0; j <= g.nx(); ++j) {
      csv.line({num(g.t(i)), num(g.x(j)), num(mean_at(s.controls.u1, i, j)), num(mean_at(s.controls.u2, i, j)),
                num(mean_at(ys, i, j)), num(mean_at(s.p[0], i, j)), num(mean_at(s.p[1], i, j))});
    }
  }
  Csv diag(c.file("diagnostics.csv"), {"iteration", "residual"});
  for (std::size_t k = 0; k < s.residuals.size(); ++k) diag.line({num(k + 1), num(s.residuals[k])});
  c.check("picard_converged", s.converged,
          std::to_string(s.iterations) + " iterations, final residual " +
              (s.residuals.empty() ? std::string("n/a") : num(s.residuals.back())));
}

PerturbationSet read_perturbations(Context& c, const GridSpec& g) {
  PerturbationSet set = default_perturbations(g);
  if (c.root.has("magnitudes")) set.magnitudes = c.root.numbers("magnitudes");
  if (c.root.has("corners")) {
    set.directions = {{"constant", {0, 0}}};
    for (const auto& tx : c.root.rows("corners", 2)) {
      const GridPoint z = locate_point(g, tx);
      set.directions.push_back({"rect_t" + num(tx[0]) + "_x" + num(tx[1]), z});
    }
  }
  set.tolerance = c.root.num("tolerance", set.tolerance);
  return set;
}

// ---- subcommands ---------------------------------------------------------

void simulate_sheet(Context& c) {
  const GridSpec g = c.grid();
  const std::uint64_t seed = c.seed();
  const std::size_t n = c.paths();
  const std::size_t batch = static_cast<std::size_t>(c.root.integer("batch_size", 10000));
  if (batch < 1) throw ConfigError("config: 'batch_size' must be >= 1");
  std::vector<std::pair<GridPoint, GridPoint>> pairs;
  if (c.root.has("pairs")) {
    for (const auto& r : c.root.rows("pairs", 4)) {
      pairs.push_back({g.locate(r[0], r[1]), g.locate(r[2], r[3])});
    }
  } else {
    const double f[10][4] = {{1, 1, 1, 1},           {0.5, 0.5, 1, 1},          {0.25, 0.75, 0.75, 0.25},
                             {0.5, 1, 1, 0.5},       {0.25, 0.25, 0.25, 0.25},  {0.125, 0.5, 0.875, 0.625},
                             {1, 0.0625, 0.0625, 1}, {0.375, 0.375, 0.625, 0.875}, {0.75, 0.75, 0.5, 0.25},
                             {0.9375, 0.3125, 0.3125, 0.9375}};
    for (const auto& r : f) {
      auto at = [&](double a, double b) {
        return GridPoint{static_cast<int>(std::lround(a * g.nt())), static_cast<int>(std::lround(b * g.nx()))};
      };
      pairs.push_back({at(r[0], r[1]), at(r[2], r[3])});
    }
  }
  c.root.finish();
  std::vector<double> sum(pairs.size(), 0.0), sumsq(pairs.size(), 0.0);
  std::vector<double> first_path;
  for (std::size_t start = 0; start < n; start += batch) {
    const std::size_t m = std::min(batch, n - start);
    const SheetEnsemble e = sample_sheet(g, seed, m, start);
    if (start == 0) {
      const auto v = e.path_values(0);
      first_path.assign(v.begin(), v.end());
    }
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      for (std::size_t p = 0; p < m; ++p) {
        const double prod = e.value(p, pairs[k].first) * e.value(p, pairs[k].second);
        sum[k] += prod;
        sumsq[k] += prod * prod;
      }
    }
  }
  Csv csv(c.file("covariance.csv"), {"t1", "x1", "t2", "x2", "exact", "estimate", "stderr", "pass"});
  std::size_t failed = 0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [a, b] = pairs[k];
    const double exact = std::min(g.t(a.i), g.t(b.i)) * std::min(g.x(a.j), g.x(b.j));
    const double mean = sum[k] / static_cast<double>(n);
    const double var = n > 1 ? (sumsq[k] - n * mean * mean) / static_cast<double>(n - 1) : 0.0;
    const double se = std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
    const bool pass = std::abs(mean - exact) <= 3.0 * se + 1e-12;
    failed += pass ? 0 : 1;
    csv.line({num(g.t(a.i)), num(g.x(a.j)), num(g.t(b.i)), num(g.x(b.j)), num(exact), num(mean), num(se),
              pass ? "1" : "0"});
  }
  Csv path(c.file("sample_path.csv"), {"t", "x", "B"});
  for (int i = 0; i <= g.nt(); ++i) {
    for (int j = 0; j <= g.nx(); ++j) path.line({num(g.t(i)), num(g.x(j)), num(first_path[g.point_index(i, j)])});
  }
  c.check("covariance", failed == 0, std::to_string(failed) + " of " + std::to_string(pairs.size()) +
                                         " point pairs outside 3 stderr of min(t,s) min(x,y)");
}

void verify_ito(Context& c) {
  const GridSpec g = c.grid();
  const std::uint64_t seed = c.seed();
  const std::size_t n = c.paths();
  const SmoothFn f = read_function(c.root.child("function"));
  const ProcessConfig pc = read_process(c.root.child("process"));
  const GridPoint z = c.root.has("point") ? locate_point(g, c.root.numbers("point")) : g.corner();
  const std::string mode = c.root.str("mode", "expectation");
  ItoCheckOptions opt;
  if (mode == "pathwise") opt.mode = CheckMode::kPathwise;
  else if (mode != "expectation") throw ConfigError("config: 'mode' must be expectation or pathwise");
  bool doubling = opt.mode == CheckMode::kExpectation;
  if (c.root.has("allowance")) {
    const json& a = c.root.raw("allowance");
    if (a.is_number()) {
      opt.allowance = a.get<double>();
      doubling = false;
    } else if (!(a.is_string() && a.get<std::string>() == "grid-doubling")) {
      throw ConfigError("config: 'allowance' must be a number or \"grid-doubling\"");
    }
  }
  c.root.finish();
  const SheetEnsemble e = sample_sheet(g, seed, n);
  if (doubling) {
    const SheetEnsemble fine = sample_sheet(g.refined(), seed, n);
    opt.allowance = ito_grid_allowance(f, [&](const GridSpec& gg) { return pc.on(gg); }, z, fine);
  }
  const ItoReport r = ito_formula_check(f, pc.on(g), z, e, opt);
  write_report(c, "ito_report.csv", r);
  std::ostringstream os;
  if (opt.mode == CheckMode::kPathwise) {
    os << "max pathwise relative error " << num(r.max_pathwise_error);
  } else {
    os << "E[f(Y(z))] = " << num(r.lhs.mean) << ", deterministic groups " << num(r.rhs_expectation)
       << ", gap " << num(r.gap.mean) << " (stderr " << num(r.gap.stderr_) << ", allowance " << num(r.allowance)
       << ")";
  }
  c.check("ito_formula", r.pass, os.str());
}

void verify_ibp(Context& c) {
  const GridSpec g = c.grid();
  const std::uint64_t seed = c.seed();
  const std::size_t n = c.paths();
  const ProcessConfig p1 = read_process(c.root.child("process1"));
  const ProcessConfig p2 = read_process(c.root.child("process2"));
  const GridPoint z = c.root.has("point") ? locate_point(g, c.root.numbers("point")) : g.corner();
  c.root.finish();
  const SheetEnsemble e = sample_sheet(g, seed, n);
  const ItoReport r = ibp_check(p1.on(g), p2.on(g), z, e);
  write_report(c, "ibp_report.csv", r);
  c.check("integration_by_parts", r.pass,
          "E[Y1 Y2] = " + num(r.lhs.mean) + ", right side " + num(r.rhs_expectation) + ", gap stderr " +
              num(r.gap.stderr_));
}

void wellposedness(Context& c) {
  if (c.root.has("seed")) c.root.integer("seed");
  const double K1 = c.root.num("K1");
  const double K2 = c.root.num("K2");
  const double area = c.root.num("area");
  Csv csv(c.file("wellposedness.csv"), {"K1", "K2", "area", "r0", "margin", "well_posed"});
  const WellPosedness w = bspde_wellposedness(K1, K2, area);
  csv.line({num(K1), num(K2), num(area), num(w.r0), num(w.margin), w.well_posed ? "1" : "0"});
  c.check("decision", true, std::string(w.well_posed ? "well-posed" : "not well-posed") + ", margin " + num(w.margin));
  if (c.root.has("sweep")) {
    Obj s = c.root.child("sweep");
    const double k1max = s.num("K1_max"), k2max = s.num("K2_max");
    const long long steps = s.integer("steps");
    s.finish();
    if (steps < 2) throw ConfigError("config: 'sweep.steps' must be >= 2");
    bool monotone = true;
    std::vector<std::vector<bool>> wp(steps, std::vector<bool>(steps));
    for (long long a = 0; a < steps; ++a) {
      for (long long b = 0; b < steps; ++b) {
        const double k1 = k1max * a / (steps - 1), k2 = k2max * b / (steps - 1);
        const WellPosedness r = bspde_wellposedness(k1, k2, area);
        wp[a][b] = r.well_posed;
        csv.line({num(k1), num(k2), num(area), num(r.r0), num(r.margin), r.well_posed ? "1" : "0"});
        if (a > 0 && r.well_posed && !wp[a - 1][b]) monotone = false;
        if (b > 0 && r.well_posed && !wp[a][b - 1]) monotone = false;
      }
    }
    c.check("monotone", monotone, "increasing K1 or K2 never restores well-posedness");
  }
  if (c.root.has("expect_well_posed")) {
    const bool expect = c.root.flag("expect_well_posed", false);
    c.check("expected_decision", expect == w.well_posed, "expected " + std::string(expect ? "well-posed" : "not well-posed"));
  }
}

void check_nash_cmd(Context& c) {
  const GridSpec g = c.grid();
  const std::uint64_t seed = c.seed();
  const std::size_t n = c.paths();
  const long long example = c.root.integer("example");
  const PicardOptions picard = read_picard(c);
  const PerturbationSet set = read_perturbations(c, g);
  if (example == 1) {
    const Example1Params p = read_example1(c.root.child("params"), g);
    const Example1Formulation form = read_formulation(c);
    c.root.finish();
    const EquilibriumSolution s = solve_example1(p, g, seed, n, form, picard);
    write_nash(c, check_nash(example1_model(p), s.controls, set, s.ensemble));
  } else if (example == 2) {
    const Example2Params p = read_example2(c.root.child("params"), g);
    c.root.finish();
    const EquilibriumSolution s = solve_example2(p, g, seed, n, picard);
    write_nash(c, check_nash(example2_model(p), s.controls, set, s.ensemble));
  } else {
    throw ConfigError("config: 'example' must be 1 or 2");
  }
}

void solve_example1_cmd(Context& c) {
  const GridSpec g = c.grid();
  const std::uint64_t seed = c.seed();
  const std::size_t n = c.paths();
  const Example1Params p = read_example1(c.root.child("params"), g);
  const Example1Formulation form = read_formulation(c);
  const PicardOptions picard = read_picard(c);
  const bool nash = c.root.flag("nash_check", true);
  const PerturbationSet set = read_perturbations(c, g);
  c.root.finish();
  const EquilibriumSolution s = solve_example1(p, g, seed, n, form, picard);
  write_solution(c, s);
  const Example1Reduction red = example1_reduction(p);
  double ratio_err = 0.0;
  for (std::size_t k = 0; k < s.controls.u1.size(); ++k) {
    const auto& a = s.controls.u1[k].values();
    const auto& b = s.controls.u2[k].values();
    for (std::size_t q = 0; q < a.size(); ++q) ratio_err = std::max(ratio_err, std::abs(b[q] - red.ratio * a[q]));
  }
  if (form == Example1Formulation::kReduction) {
    c.check("proportionality", ratio_err == 0.0, "max |u2 - ratio u1| = " + num(ratio_err));
    if (p.sigma == 0.0) {
      const double u = example1_reduced_closed_form(p);
      const double err = std::abs(s.controls.u1[0](0, 0) - u);
      c.check("closed_form", err <= 1e-6 * std::max(1.0, std::abs(u)),
              "u1 = " + num(s.controls.u1[0](0, 0)) + ", closed form " + num(u));
    }
  }
  if (nash) write_nash(c, check_nash(example1_model(p), s.controls, set, s.ensemble));
}

void solve_example2_cmd(Context& c) {
  const GridSpec g = c.grid();
  const std::uint64_t seed = c.seed();
  const std::size_t n = c.paths();
  const Example2Params p = read_example2(c.root.child("params"), g);
  const PicardOptions picard = read_picard(c);
  const bool nash = c.root.flag("nash_check", true);
  const PerturbationSet set = read_perturbations(c, g);
  c.root.finish();
  const EquilibriumSolution s = solve_example2(p, g, seed, n, picard);
  write_solution(c, s);
  double l_err = 0.0;
  for (int pl = 0; pl < 2; ++pl) {
    for (std::size_t k = 0; k < s.states.size(); ++k) {
      const auto& L = s.L[pl][k].values();
      const auto& y = s.states[k].y.values();
      for (std::size_t q = 0; q < L.size(); ++q) l_err = std::max(l_err, std::abs(L[q] + y[q]));
    }
  }
  c.check("L_equals_minus_Y", l_err <= 1e-10, "max |L + Y| = " + num(l_err));
  if (nash) write_nash(c, check_nash(example2_model(p), s.controls, set, s.ensemble));
}

void symmetric_report_cmd(Context& c) {
  const GridSpec g = c.grid();
  const std::uint64_t seed = c.seed();
  const std::size_t n = c.paths();
  const Example2Params p = read_example2(c.root.child("params"), g);
  const PicardOptions picard = read_picard(c);
  c.root.finish();
  const SymmetricReport r = symmetric_case_report(p, g, seed, n, picard);
  Csv csv(c.file("symmetric.csv"), {"quantity", "value"});
  csv.line({"symmetric_params", r.symmetric_params ? "1" : "0"});
  csv.line({"max_deviation", num(r.max_deviation)});
  csv.line({"worst_t", num(g.t(r.worst_point.i))});
  csv.line({"worst_x", num(g.x(r.worst_point.j))});
  csv.line({"J1", num(r.J[0].mean)});
  csv.line({"J2", num(r.J[1].mean)});
  csv.line({"mean_terminal_state", num(r.mean_terminal_state)});
  if (r.superposition_error) csv.line({"superposition_error", num(*r.superposition_error)});
  if (r.symmetric_params) {
    c.check("symmetry", r.pass,
            "max |u1 - u2| = " + num(r.max_deviation) + " at t = " + num(g.t(r.worst_point.i)) +
                ", x = " + num(g.x(r.worst_point.j)));
  } else {
    c.check("symmetry", true, "asymmetric parameters: non-symmetric regime, max |u1 - u2| = " + num(r.max_deviation));
  }
  if (r.superposition_error) {
    c.check("superposition", *r.superposition_error <= 1e-6,
            "max |u(2y) - (2 u(y) - u(0))| = " + num(*r.superposition_error));
  }
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

}  // namespace

RunResult run(const std::string& subcommand, const json& config, const RunOverrides& overrides) {
  RunResult result;
  std::filesystem::path out = "out";
  static const std::map<std::string, std::function<void(Context&)>> table{
      {"simulate-sheet", simulate_sheet},       {"verify-ito", verify_ito},
      {"verify-ibp", verify_ibp},               {"wellposedness", wellposedness},
      {"check-nash", check_nash_cmd},           {"solve-example1", solve_example1_cmd},
      {"solve-example2", solve_example2_cmd},   {"symmetric-report", symmetric_report_cmd}};
  int workers = default_workers();
  try {
    const auto it = table.find(subcommand);
    if (it == table.end()) throw ConfigError("unknown subcommand '" + subcommand + "'");
    Context c{Obj(config, ""), out, overrides, result};
    if (c.root.has("subcommand") && c.root.str("subcommand", "") != subcommand) {
      throw ConfigError("config: 'subcommand' is '" + config.at("subcommand").get<std::string>() +
                        "' but '" + subcommand + "' was requested");
    }
    out = c.root.str("output_dir", "out");
    if (overrides.out_dir) out = *overrides.out_dir;
    c.out = out;
    if (c.root.has("workers")) workers = static_cast<int>(c.root.integer("workers"));
    if (overrides.workers) workers = *overrides.workers;
    if (workers < 1) throw ConfigError("workers must be >= 1");
    set_default_workers(workers);
    std::filesystem::create_directories(out);
    it->second(c);
    c.root.finish();
    result.status = kPass;
    for (const auto& ch : result.checks) {
      if (!ch.pass) result.status = kCheckFailed;
    }
    result.message = result.status == kPass ? "all checks passed"
                                             : "check failed; see " + (out / "manifest.json").string();
  } catch (const NumericalError& e) {
    result.status = kNumericalFailure;
    result.message = e.what();
  } catch (const ConfigError& e) {
    result.status = kConfigInvalid;
    result.message = e.what();
  } catch (const UsageError& e) {
    result.status = kConfigInvalid;
    result.message = std::string("config: ") + e.what();
  } catch (const UnsupportedModel& e) {
    result.status = kConfigInvalid;
    result.message = e.what();
  } catch (const ContractViolation& e) {
    result.status = kConfigInvalid;
    result.message = e.what();
  } catch (const json::exception& e) {
    result.status = kConfigInvalid;
    result.message = std::string("config: ") + e.what();
  } catch (const std::exception& e) {
    result.status = kNumericalFailure;
    result.message = e.what();
  }

  try {
    std::filesystem::create_directories(out);
    json m;
    m["subcommand"] = subcommand;
    m["version"] = kVersion;
    m["config"] = config;
    if (overrides.seed) m["seed"] = *overrides.seed;
    else if (config.is_object() && config.contains("seed")) m["seed"] = config["seed"];
    if (overrides.paths) m["n_paths"] = *overrides.paths;
    else if (config.is_object() && config.contains("n_paths")) m["n_paths"] = config["n_paths"];
    m["workers"] = workers;
    m["status"] = result.status;
    m["pass"] = result.status == kPass;
    m["message"] = result.message;
    json checks = json::array();
    for (const auto& ch : result.checks) checks.push_back({{"name", ch.name}, {"pass", ch.pass}, {"detail", ch.detail}});
    m["checks"] = checks;
    json outputs = json::array();
    for (const auto& o : result.outputs) outputs.push_back(o.filename().string());
    m["outputs"] = outputs;
    m["timestamp"] = timestamp();
    result.manifest = out / "manifest.json";
    std::ofstream(result.manifest) << m.dump(2) << '\n';
  } catch (const std::exception&) {
    result.manifest.clear();
  }
  return result;
}

RunResult run_file(const std::string& subcommand, const std::filesystem::path& config_path,
                   const RunOverrides& overrides) {
  std::ifstream in(config_path);
  if (!in) {
    RunResult r;
    r.status = kConfigInvalid;
    r.message = "cannot read config file " + config_path.string();
    return r;
  }
  json config;
  try {
    config = json::parse(in);
  } catch (const json::parse_error& e) {
    RunResult r;
    r.status = kConfigInvalid;
    r.message = "config parse error in " + config_path.string() + ": " + e.what();
    return r;
  }
  return run(subcommand, config, overrides);
}

}  // namespace sheetgame
