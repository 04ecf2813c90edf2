#include "rtf/equidist.hpp"
#include "rtf/geometric.hpp"
#include "rtf/lemma_suites.hpp"
#include "rtf/report.hpp"
#include "rtf/spectral.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

using namespace rtf;

namespace {

enum Exit { kPass = 0, kNumeric = 1, kUsage = 2, kData = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  int weight = 12;
  std::uint64_t level = 1;
  long long eta = 1;
  std::string S;
  double tol = 1e-10;
  double bound = 0.0;
  std::string data;
  std::string out;
  bool allow_partial = false;
  bool per_b = false;
  int threads = 0;
  double rtol = 1e-6;

  // verify-lemmas
  std::string filter;
  std::optional<double> lemma_tol;

  // equidist
  double q = 2.0;
  std::string eta_sign = "+";
  int bins = 20;
  std::string svg;
  std::size_t samples = 0;
  std::uint64_t seed = 1;
  std::uint64_t prime = 0;
};

using KV = std::vector<std::pair<std::string, std::string>>;

void header(std::ostream& os, const std::string& command, const KV& config) {
  os << "# tool: rtf " << kToolVersion << "\n";
  os << "# command: " << command << "\n";
  for (auto& [k, v] : config) os << "# config." << k << ": " << v << "\n";
}

// stdout unless --out is given
struct Output {
  std::unique_ptr<std::ofstream> file;
  std::ostream* os = &std::cout;
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file) throw UsageError("cannot write " + path);
    os = file.get();
  }
  std::ostream& operator*() { return *os; }
};

GeometricConfig geometric_config(const RunConfig& rc) {
  GeometricConfig cfg;
  cfg.weight = rc.weight;
  cfg.level = IdealQ(rc.level);
  cfg.eta = QuadraticCharacter(rc.eta);
  cfg.eps_trunc = rc.tol;
  cfg.bound = rc.bound;
  cfg.threads = rc.threads;
  cfg.keep_per_b = rc.per_b;
  return cfg;
}

KV common_config(const RunConfig& rc) {
  return {{"weight", std::to_string(rc.weight)},
          {"level", std::to_string(rc.level)},
          {"eta", std::to_string(rc.eta)},
          {"S", rc.S.empty() ? "(empty)" : rc.S},
          {"tol", format_double(rc.tol)},
          {"bound", rc.bound > 0 ? format_double(rc.bound) : "auto"},
          {"threads", std::to_string(resolve_threads(rc.threads))}};
}

void complex_row(CsvWriter& w, const std::string& section, const std::string& key, cplx z) {
  w.row({section, key, format_double(z.real()), format_double(z.imag())});
}

void real_row(CsvWriter& w, const std::string& section, const std::string& key, double x) {
  w.row({section, key, format_double(x), "0"});
}

void geometric_rows(CsvWriter& w, const GeometricReport& g) {
  complex_row(w, "geometric", "hyperbolic", g.hyperbolic);
  real_row(w, "geometric", "truncation_error", g.truncation_error);
  real_row(w, "geometric", "bound_used", g.bound_used);
  real_row(w, "geometric", "certified", g.certified ? 1.0 : 0.0);
  real_row(w, "geometric", "enumerated", static_cast<double>(g.enumerated));
  real_row(w, "geometric", "nonzero", static_cast<double>(g.nonzero));
  real_row(w, "geometric", "parity_skipped", static_cast<double>(g.parity_skipped));
  real_row(w, "geometric", "sign_condition", g.sign_condition);
  complex_row(w, "geometric", "unipotent_theorem", g.unipotent);
  complex_row(w, "geometric", "unipotent", g.unipotent_general);
  complex_row(w, "geometric", "total", g.total);
  for (auto& t : g.per_b) complex_row(w, "hyperbolic_b", t.b.str(), t.value);
}

void spectral_rows(CsvWriter& w, const SpectralReport& s) {
  real_row(w, "spectral", "constant", s.constant);
  real_row(w, "spectral", "complete", s.complete ? 1.0 : 0.0);
  for (auto& t : s.terms) {
    real_row(w, "form:" + t.label, "w", t.w);
    real_row(w, "form:" + t.label, "alpha", t.alpha);
    complex_row(w, "form:" + t.label, "i_cus", t.i_cus);
    w.row({"form:" + t.label, "provenance", t.provenance.empty() ? "none" : t.provenance, "0"});
  }
  complex_row(w, "spectral", "total", s.value);
}

SpectralDataSet load(const RunConfig& rc) {
  if (rc.data.empty()) throw UsageError("--data is required");
  return load_spectral_data(rc.data);
}

void require_complete(const SpectralDataSet& ds, const RunConfig& rc, std::ostream& os) {
  if (ds.complete_for(rc.weight, rc.level)) {
    os << "# status: data complete for weight " << rc.weight << " level " << rc.level << "\n";
    return;
  }
  if (!rc.allow_partial)
    throw DataError("spectral data not declared complete for weight " + std::to_string(rc.weight) + " level " +
                    std::to_string(rc.level) + " (use --allow-partial to override)");
  os << "# status: UNSOUND (spectral data incomplete for weight " << rc.weight << " level " << rc.level << ")\n";
}

int cmd_verify(const RunConfig& rc) {
  SuiteOptions opt;
  opt.tol = rc.lemma_tol;
  Output out(rc.out);
  header(*out, "verify-lemmas", {{"filter", rc.filter.empty() ? "(all)" : rc.filter},
                                 {"tol", rc.lemma_tol ? format_double(*rc.lemma_tol) : "per-suite default"}});
  auto results = run_suites(rc.filter, opt);
  if (results.empty()) throw UsageError("filter '" + rc.filter + "' matches no suite");
  CsvWriter w{*out};
  w.row({"suite", "lemma", "case", "closed_form", "oracle", "abs_err", "tol", "comparison", "pass"});
  bool ok = true;
  for (auto& s : results) {
    for (auto& r : s.rows)
      w.row({s.name, r.lemma, r.kase, format_double(r.closed_form), format_double(r.oracle), format_double(r.abs_err),
             r.exact ? "exact" : format_double(r.tol), r.exact ? "exact" : "numeric", r.pass ? "1" : "0"});
    ok = ok && s.passed();
  }
  for (auto& s : results) {
    std::cerr << (s.passed() ? "PASS " : "FAIL ") << s.name << ": " << s.rows.size() - s.failures() << "/" << s.rows.size()
              << " in " << std::fixed << std::setprecision(2) << s.seconds << "s\n";
    std::cerr.unsetf(std::ios::floatfield);
  }
  return ok ? kPass : kNumeric;
}

int cmd_geometric(const RunConfig& rc) {
  auto cfg = geometric_config(rc);
  auto alpha = parse_test_function(rc.S);
  auto g = geometric_side(cfg, alpha);
  Output out(rc.out);
  header(*out, "geometric", common_config(rc));
  *out << "# certificate: |hyperbolic tail| <= " << format_double(g.truncation_error) << " at bound "
       << format_double(g.bound_used) << (g.certified ? " (meets tol)" : " (exceeds tol)") << "\n";
  CsvWriter w{*out};
  w.row({"section", "key", "real", "imag"});
  geometric_rows(w, g);
  return g.certified ? kPass : kNumeric;
}

int cmd_spectral(const RunConfig& rc) {
  auto ds = load(rc);
  auto alpha = parse_test_function(rc.S);
  Output out(rc.out);
  auto cfg = common_config(rc);
  cfg.push_back({"data", rc.data});
  header(*out, "spectral", cfg);
  require_complete(ds, rc, *out);
  auto s = spectral_side(ds, rc.weight, IdealQ(rc.level), QuadraticCharacter(rc.eta), alpha, true);
  CsvWriter w{*out};
  w.row({"section", "key", "real", "imag"});
  spectral_rows(w, s);
  return kPass;
}

int cmd_rtf(const RunConfig& rc) {
  auto ds = load(rc);
  auto alpha = parse_test_function(rc.S);
  auto gcfg = geometric_config(rc);
  Output out(rc.out);
  auto cfg = common_config(rc);
  cfg.push_back({"data", rc.data});
  cfg.push_back({"rtol", format_double(rc.rtol)});
  header(*out, "rtf", cfg);
  require_complete(ds, rc, *out);
  bool sound = ds.complete_for(rc.weight, rc.level);
  auto s = spectral_side(ds, rc.weight, gcfg.level, gcfg.eta, alpha, true);
  auto g = geometric_side(gcfg, alpha);
  cplx lhs = s.value, rhs = g.total;
  double residual = std::abs(lhs - rhs);
  double scale = std::max(std::abs(lhs), std::abs(rhs));
  double rel = scale > 0 ? residual / scale : 0.0;
  // the truncation certificate widens the acceptance band
  bool ok = g.certified && (residual <= rc.rtol * scale + g.truncation_error);
  *out << "# certificate: |hyperbolic tail| <= " << format_double(g.truncation_error) << " at bound "
       << format_double(g.bound_used) << (g.certified ? " (meets tol)" : " (exceeds tol)") << "\n";
  *out << "# verdict: " << (ok ? "agree" : "disagree") << (sound ? "" : " UNSOUND") << "\n";
  CsvWriter w{*out};
  w.row({"section", "key", "real", "imag"});
  spectral_rows(w, s);
  geometric_rows(w, g);
  complex_row(w, "rtf", "lhs", lhs);
  complex_row(w, "rtf", "rhs", rhs);
  real_row(w, "rtf", "residual", residual);
  real_row(w, "rtf", "relative_residual", rel);
  real_row(w, "rtf", "sound", sound ? 1.0 : 0.0);
  return ok ? kPass : kNumeric;
}

int cmd_equidist(const RunConfig& rc) {
  if (rc.eta_sign != "+" && rc.eta_sign != "-") throw UsageError("--eta-sign must be + or -");
  MeasureSpec spec(rc.q, rc.eta_sign == "+" ? 1 : -1);
  if (rc.bins < 1) throw UsageError("--bins must be positive");
  Output out(rc.out);
  KV cfg{{"q", format_double(rc.q)}, {"eta_sign", rc.eta_sign}, {"bins", std::to_string(rc.bins)}};
  EmpiricalResult r;
  std::string mode = "model";
  std::vector<WeightedPoint> pts;
  if (!rc.data.empty()) {
    mode = "data";
    std::uint64_t p = rc.prime ? rc.prime : static_cast<std::uint64_t>(rc.q);
    if (static_cast<double>(p) != rc.q || !is_prime(p)) throw UsageError("--data needs a prime --q");
    cfg.insert(cfg.end(), {{"data", rc.data}, {"weight", std::to_string(rc.weight)}, {"level", std::to_string(rc.level)},
                           {"eta", std::to_string(rc.eta)}});
  } else if (rc.samples > 0) {
    mode = "samples";
    cfg.insert(cfg.end(), {{"samples", std::to_string(rc.samples)}, {"seed", std::to_string(rc.seed)}});
  }
  cfg.insert(cfg.begin(), {"mode", mode});
  header(*out, "equidist", cfg);
  if (mode == "data") {
    auto ds = load(rc);
    require_complete(ds, rc, *out);
    QuadraticCharacter eta(rc.eta);
    std::uint64_t p = static_cast<std::uint64_t>(rc.q);
    if (eta_local(eta, p) != spec.eta_p) throw UsageError("--eta-sign disagrees with the local value of eta at q");
    pts = spectral_points(ds, rc.weight, IdealQ(rc.level), eta, p);
  } else if (mode == "samples") {
    pts = sample_mu(spec, rc.samples, rc.seed);
  }
  r = mode == "model" ? model_histogram(spec, rc.bins) : weighted_empirical(pts, spec, rc.bins);
  if (mode != "model") {
    *out << "# points: " << pts.size() << "\n";
    *out << "# total_weight: " << format_double(r.total_weight) << "\n";
    *out << "# discrepancy: " << format_double(r.discrepancy) << "\n";
  }
  write_histogram_csv(*out, r);
  if (!rc.svg.empty()) {
    std::ofstream svg(rc.svg, std::ios::binary);
    if (!svg) throw UsageError("cannot write " + rc.svg);
    std::ostringstream title;
    title << "mu_q eta=" << rc.eta_sign << " q=" << format_double(rc.q) << " (" << mode << ")";
    write_svg(svg, spec, r, title.str());
  }
  return kPass;
}

void add_common(CLI::App* c, RunConfig& rc) {
  c->add_option("--weight", rc.weight, "weight l (even)")->capture_default_str();
  c->add_option("--level", rc.level, "level n")->capture_default_str();
  c->add_option("--eta", rc.eta, "fundamental discriminant of eta (1 = trivial)")->capture_default_str();
  c->add_option("--S", rc.S, "Hecke test function p:m,p:m");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relative trace formula toolkit"};
  app.set_version_flag("--version", std::string("rtf ") + kToolVersion);
  app.require_subcommand(1);
  RunConfig rc;
  app.add_option("--threads", rc.threads, "worker threads for the b-sum (default RTF_THREADS or 1)");

  auto* verify = app.add_subcommand("verify-lemmas", "closed forms against their oracles");
  verify->add_option("--filter", rc.filter, "substring of a suite or lemma name");
  verify->add_option("--tol", rc.lemma_tol, "override every numeric tolerance");
  verify->add_option("--out", rc.out, "CSV path (default stdout)");

  auto* geo = app.add_subcommand("geometric", "hyperbolic and unipotent terms");
  add_common(geo, rc);
  geo->add_option("--tol", rc.tol, "truncation target")->capture_default_str();
  geo->add_option("--bound", rc.bound, "archimedean bound B (default: from --tol)");
  geo->add_flag("--per-b", rc.per_b, "emit every nonzero b-term");
  geo->add_option("--out", rc.out, "CSV path (default stdout)");

  auto* spec = app.add_subcommand("spectral", "spectral side from eigenform data");
  add_common(spec, rc);
  spec->add_option("--data", rc.data, "spectral data file")->required();
  spec->add_flag("--allow-partial", rc.allow_partial, "accept data not declared complete (report is UNSOUND)");
  spec->add_option("--out", rc.out, "CSV path (default stdout)");

  auto* rtf = app.add_subcommand("rtf", "both sides and their residual");
  add_common(rtf, rc);
  rtf->add_option("--data", rc.data, "spectral data file")->required();
  rtf->add_option("--tol", rc.tol, "truncation target")->capture_default_str();
  rtf->add_option("--bound", rc.bound, "archimedean bound B (default: from --tol)");
  rtf->add_option("--rtol", rc.rtol, "relative residual accepted")->capture_default_str();
  rtf->add_flag("--allow-partial", rc.allow_partial, "accept data not declared complete (report is UNSOUND)");
  rtf->add_flag("--per-b", rc.per_b, "emit every nonzero b-term");
  rtf->add_option("--out", rc.out, "CSV path (default stdout)");

  auto* eq = app.add_subcommand("equidist", "limit measure, histogram and plot");
  eq->add_option("--q", rc.q, "residue size")->required();
  eq->add_option("--eta-sign", rc.eta_sign, "local sign of eta at q: + or -")->required();
  eq->add_option("--data", rc.data, "spectral data file (weights from L-values)");
  eq->add_option("--weight", rc.weight, "weight l for --data")->capture_default_str();
  eq->add_option("--level", rc.level, "level n for --data")->capture_default_str();
  eq->add_option("--eta", rc.eta, "discriminant of eta for --data")->capture_default_str();
  eq->add_flag("--allow-partial", rc.allow_partial, "accept incomplete data (report is UNSOUND)");
  eq->add_option("--samples", rc.samples, "Monte-Carlo sample count drawn from the measure");
  eq->add_option("--seed", rc.seed, "seed for --samples")->capture_default_str();
  eq->add_option("--bins", rc.bins, "histogram bins")->capture_default_str();
  eq->add_option("--svg", rc.svg, "write an SVG plot here");
  eq->add_option("--out", rc.out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*verify) return cmd_verify(rc);
    if (*geo) return cmd_geometric(rc);
    if (*spec) return cmd_spectral(rc);
    if (*rtf) return cmd_rtf(rc);
    if (*eq) return cmd_equidist(rc);
  } catch (const DataError& e) {
    std::cerr << "rtf: data error: " << e.what() << "\n";
    return kData;
  } catch (const UsageError& e) {
    std::cerr << "rtf: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "rtf: invalid argument: " << e.what() << "\n";
    return kUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "rtf: invalid argument: " << e.what() << "\n";
    return kUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "rtf: invalid argument: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "rtf: " << e.what() << "\n";
    return kNumeric;
  }
  return kUsage;
}
