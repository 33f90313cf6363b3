#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <locale>
#include <sstream>
#include <string>
#include <vector>

#include "qsl2r/modules.hpp"
#include "qsl2r/reps.hpp"
#include "qsl2r/suite.hpp"

using namespace qsl2r;

namespace {

constexpr int kOk = 0, kFailure = 1, kUsage = 2;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string format = "json";
  std::string output;
  double tol = kDefaultTol;
  double q = 0.5, a = 0, b = 0;
  std::string lambda = "0";
  std::vector<double> bs;
  std::string spin = "1";
  int N = 1, W = 12, nmax = kNmax;
  std::string family = "canonical";
  std::string grid = "-4:4:801";
  VerifyOptions verify;
};

std::string num(double x) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(17) << x + 0.0;  // + 0.0 clears signed zero
  return os.str();
}

void emit(const RunConfig& cfg, const std::string& body) {
  if (cfg.output.empty()) {
    std::cout << body;
    if (!body.empty() && body.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(cfg.output);
  if (!f) throw UsageError("cannot write " + cfg.output);
  f << body;
  if (!body.empty() && body.back() != '\n') f << '\n';
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2); }

void check_common(const RunConfig& cfg) {
  if (!(cfg.q > 0 && cfg.q < 1)) throw UsageError("--q must lie in (0, 1)");
  if (!(cfg.tol > 0)) throw UsageError("--tol must be positive");
}

Assignment assignment(const RunConfig& cfg) {
  Assignment as;
  as.q = cfg.q;
  as.a = cfg.a;
  return as;
}

int cmd_verify(const RunConfig& cfg) {
  VerifyReport r = run_verify(cfg.verify);
  if (cfg.format == "json") emit(cfg, dump_json(r.to_json()));
  else emit(cfg, r.text());
  if (!r.ok) {
    std::cerr << "verification failed: " << r.first_failure << "\n";
    return kFailure;
  }
  return kOk;
}

int cmd_spectrum(const RunConfig& cfg) {
  check_common(cfg);
  int n = parse_spin(cfg.spin);
  Assignment as = assignment(cfg);
  std::vector<LabelledEigenvalue> eig = spectrum_numeric(n, as);
  bool ok = true;
  for (const auto& e : eig) ok = ok && e.residual <= cfg.tol * std::max(1.0, std::abs(e.expected));
  if (cfg.format == "json") {
    nlohmann::json j = spectrum_json(n, as, eig);
    for (size_t k = 0; k < eig.size(); ++k) {
      j["eigenvalues"][k]["p"] = eig[k].p;
      j["eigenvalues"][k]["label"] = "[" + num(eig[k].c) + "]";
      j["eigenvalues"][k]["expected"] = eig[k].expected;
    }
    emit(cfg, dump_json(j));
  } else {
    std::ostringstream os;
    if (cfg.format == "csv") os << "p,c,value,expected,residual\n";
    for (const auto& e : eig) {
      if (cfg.format == "csv")
        os << e.p << ',' << num(e.c) << ',' << num(e.value) << ',' << num(e.expected) << ',' << num(e.residual) << '\n';
      else
        os << "p=" << e.p << "  [" << num(e.c) << "] = " << num(e.value) << "  residual " << num(e.residual) << '\n';
    }
    emit(cfg, os.str());
  }
  return ok ? kOk : kFailure;
}

int cmd_spherical(const RunConfig& cfg) {
  check_common(cfg);
  int n = parse_spin(cfg.spin);
  Assignment as = assignment(cfg);
  SphericalVector s = spherical_vector(n, as);
  if (cfg.format == "json") {
    emit(cfg, dump_json(spherical_json(s, as)));
  } else {
    std::ostringstream os;
    if (cfg.format == "csv") os << "k,re,im\n";
    else os << "eigenvalue [a] = " << num(s.eigenvalue) << ", residual " << num(s.residual) << '\n';
    for (int k = 0; k < s.v.size(); ++k)
      os << k << (cfg.format == "csv" ? "," : "  ") << num(s.v(k).real()) << (cfg.format == "csv" ? "," : " + i ")
         << num(s.v(k).imag()) << '\n';
    emit(cfg, os.str());
  }
  return s.residual <= cfg.tol ? kOk : kFailure;
}

std::string interval_str(const Interval& i) {
  return std::string(i.lo_closed ? "[" : "(") + num(i.lo) + ", " + num(i.hi) + (i.hi_closed ? "]" : ")");
}

int cmd_classify(const RunConfig& cfg) {
  check_common(cfg);
  if (cfg.nmax < 1) throw UsageError("--nmax must be >= 1");
  std::vector<ClassEntry> es = classify(cfg.q, cfg.a, cfg.nmax, cfg.tol);
  if (cfg.format == "json") {
    emit(cfg, dump_json(classification_json(cfg.q, cfg.a, es)));
    return kOk;
  }
  std::ostringstream os;
  if (cfg.format == "csv") {
    os << "label,family,sector,lambda,b,n,support,range_lo,range_hi,principal_lo,principal_hi\n";
    for (const ClassEntry& e : es) {
      os << '"' << e.label() << "\"," << to_string(e.family) << ',' << e.sector << ','
         << (e.lambda ? num(*e.lambda) : "") << ',' << num(e.b) << ',' << e.n << ',' << to_string(e.support) << ','
         << (e.range ? num(e.range->lo) + "," + num(e.range->hi) : ",") << ','
         << (e.principal ? num(e.principal->lo) + "," + num(e.principal->hi) : ",") << '\n';
    }
  } else {
    for (const std::string sector : {"even", "odd"}) {
      os << sector << " sector\n";
      for (const ClassEntry& e : es) {
        if (e.sector != sector) continue;
        os << "  " << std::left << std::setw(22) << e.label() << ' ';
        if (e.range) {
          os << "lambda in " << interval_str(*e.range);
          if (e.principal) os << ", principal " << interval_str(*e.principal);
          for (const Interval& c : e.complementary) os << ", complementary " << interval_str(c);
        } else {
          os << "lambda = " << num(*e.lambda) << ", b = " << num(e.b) << ", " << to_string(e.support);
        }
        os << '\n';
      }
    }
  }
  emit(cfg, os.str());
  return kOk;
}

ModuleWindow build_window(const RunConfig& cfg, const ModuleParams& p) {
  if (cfg.family == "canonical") return canonical_module(p, cfg.W, cfg.tol);
  if (cfg.family == "vplus") return admissible_family(p, 1, cfg.W, cfg.tol);
  if (cfg.family == "vminus") return admissible_family(p, -1, cfg.W, cfg.tol);
  if (cfg.family == "finite") return finite_quotient(p, cfg.N);
  throw UsageError("--family must be canonical, vplus, vminus or finite");
}

int cmd_module(const RunConfig& cfg) {
  check_common(cfg);
  if (cfg.W < 1) throw UsageError("--window must be >= 1");
  if (cfg.family == "finite" && cfg.N < 1) throw UsageError("--N must be >= 1");
  ModuleParams p{cfg.q, cfg.a, parse_lambda(cfg.lambda, cfg.q), cfg.b};
  ModuleWindow w = build_window(cfg, p);
  nlohmann::json res = {{"relations", relation_residual(w)},
                        {"casimir", casimir_residual(w)},
                        {"eigen", eigen_residual(w)}};
  if (!w.r.empty()) res["star"] = star_residual(w);
  if (cfg.family == "canonical") {
    GramReport g = gram_oracle(w);
    res["gram_diag"] = g.diag_residual;
    res["gram_offdiag"] = g.offdiag_residual;
  }
  bool ok = true;
  for (const auto& [k, v] : res.items()) ok = ok && v.get<double>() <= cfg.tol;
  if (cfg.format == "csv") {
    emit(cfg, window_csv(w));
  } else if (cfg.format == "json") {
    nlohmann::json j = {{"family", to_string(w.family)}, {"q", p.q},       {"a", p.a},
                        {"lambda", p.lambda},            {"b", p.b},       {"window", w.W},
                        {"generic", w.generic},          {"residuals", res}};
    nlohmann::json rows = nlohmann::json::array();
    const std::complex<double> I(0, 1);
    auto re = [](std::complex<double> z) { return z.real() + 0.0; };
    for (int k = 0; k < w.size(); ++k) {
      nlohmann::json row = {{"c", w.c[k]}, {"iB", re(I * w.B[k])}};
      if (!w.r.empty()) row["r"] = w.r[k];
      row["iX"] = {re(I * w.X.lo[k]), re(I * w.X.mid[k]), re(I * w.X.hi[k])};
      row["Z"] = {re(w.Z.lo[k]), re(w.Z.mid[k]), re(w.Z.hi[k])};
      row["iY"] = {re(I * w.Y.lo[k]), re(I * w.Y.mid[k]), re(I * w.Y.hi[k])};
      rows.push_back(row);
    }
    j["basis"] = rows;
    emit(cfg, dump_json(j));
  } else {
    std::ostringstream os;
    os << to_string(w.family) << " window, " << w.size() << " weights\n";
    for (const auto& [k, v] : res.items()) os << "  " << k << " residual " << num(v.get<double>()) << '\n';
    emit(cfg, os.str());
  }
  return ok ? kOk : kFailure;
}

std::vector<double> parse_grid(const std::string& g, int& count) {
  std::vector<std::string> parts;
  std::stringstream ss(g);
  for (std::string s; std::getline(ss, s, ':');) parts.push_back(s);
  if (parts.size() != 3) throw UsageError("--lambda-grid must be lo:hi:count");
  try {
    size_t used = 0;
    double lo = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("");
    double hi = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("");
    count = std::stoi(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("");
    if (count < 1) throw UsageError("grid count must be >= 1");
    if (!(hi >= lo)) throw UsageError("grid needs lo <= hi");
    return {lo, hi};
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception&) {
    throw UsageError("malformed --lambda-grid '" + g + "'");
  }
}

int cmd_scan(const RunConfig& cfg) {
  check_common(cfg);
  int count = 0;
  std::vector<double> lh = parse_grid(cfg.grid, count);
  std::vector<double> bs = cfg.bs.empty() ? std::vector<double>{cfg.b} : cfg.bs;
  std::sort(bs.begin(), bs.end());
  bs.erase(std::unique(bs.begin(), bs.end()), bs.end());

  struct Row {
    double lambda, b;
    UnitarityVerdict v;
  };
  std::vector<Row> rows;
  nlohmann::json per_b = nlohmann::json::array();
  bool ok = true;
  for (double b : bs) {
    ScanResult s = scan_lambda(cfg.q, cfg.a, b, lh[0], lh[1], count, cfg.tol);
    for (size_t i = 0; i < s.grid.size(); ++i) rows.push_back({s.grid[i], b, s.verdicts[i]});
    nlohmann::json bj = {{"b", b}, {"closed_form_bounds", s.closed_form_bounds}};
    nlohmann::json bounds = nlohmann::json::array();
    for (double x : s.boundaries) {
      double d = std::numeric_limits<double>::infinity();
      for (double c : s.closed_form_bounds) d = std::min(d, std::abs(x - c));
      // Transitions away from the interval ends come from isolated discrete
      // series points on the grid.
      bool matched = d <= 1e3 * cfg.tol * std::max(1.0, std::abs(x));
      bool discrete = false;
      if (!matched) {
        auto it = std::lower_bound(s.grid.begin(), s.grid.end(), x);
        for (auto j = std::max(s.grid.begin(), it - 1); j != s.grid.end() && j <= it; ++j) {
          const UnitarityVerdict& v = s.verdicts[j - s.grid.begin()];
          discrete = discrete || (v.unitary && v.support != Support::TwoSided);
        }
      }
      ok = ok && (matched || discrete);
      bounds.push_back({{"lambda", x}, {"matches_closed_form", matched}, {"discrete_point", discrete}});
    }
    bj["boundaries"] = bounds;
    per_b.push_back(bj);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& x, const Row& y) { return x.lambda != y.lambda ? x.lambda < y.lambda : x.b < y.b; });
  if (cfg.format == "json") {
    nlohmann::json grid = nlohmann::json::array();
    for (const Row& r : rows)
      grid.push_back({{"lambda", r.lambda},
                      {"b", r.b},
                      {"unitary", r.v.unitary},
                      {"case", r.v.case_no},
                      {"support", to_string(r.v.support)}});
    emit(cfg, dump_json({{"q", cfg.q}, {"a", cfg.a}, {"scans", per_b}, {"grid", grid}}));
  } else if (cfg.format == "csv") {
    std::ostringstream os;
    os << "lambda,b,unitary,case,support\n";
    for (const Row& r : rows)
      os << num(r.lambda) << ',' << num(r.b) << ',' << (r.v.unitary ? 1 : 0) << ',' << r.v.case_no << ','
         << to_string(r.v.support) << '\n';
    emit(cfg, os.str());
  } else {
    std::ostringstream os;
    for (const auto& bj : per_b) {
      os << "b = " << num(bj["b"].get<double>()) << ": closed-form bounds " << num(bj["closed_form_bounds"][0]) << ", "
         << num(bj["closed_form_bounds"][1]) << "\n";
      for (const auto& x : bj["boundaries"])
        os << "  boundary " << num(x["lambda"].get<double>())
           << (x["matches_closed_form"].get<bool>() ? "" : x["discrete_point"].get<bool>() ? " (discrete point)"
                                                                                            : " (UNMATCHED)")
           << '\n';
    }
    emit(cfg, os.str());
  }
  return ok ? kOk : kFailure;
}

int cmd_finite_dim(const RunConfig& cfg) {
  check_common(cfg);
  if (cfg.N < 1 || cfg.N > kNmax) throw UsageError("--N must lie in 1.." + std::to_string(kNmax));
  std::vector<FiniteDimModule> ms = finite_dim_classify(cfg.q, cfg.a, cfg.N);
  bool ok = true;
  nlohmann::json list = nlohmann::json::array();
  for (const FiniteDimModule& m : ms) {
    for (double r : {m.top_residual, m.bottom_residual, m.submodule_residual, m.casimir, m.relations})
      ok = ok && r <= cfg.tol;
    list.push_back({{"entry", to_json(m.entry)},
                    {"weights", m.window.c},
                    {"top_residual", m.top_residual},
                    {"bottom_residual", m.bottom_residual},
                    {"submodule_residual", m.submodule_residual},
                    {"casimir_residual", m.casimir},
                    {"relation_residual", m.relations}});
  }
  if (cfg.format == "json") {
    emit(cfg, dump_json({{"q", cfg.q}, {"a", cfg.a}, {"N", cfg.N}, {"modules", list}}));
  } else {
    std::ostringstream os;
    if (cfg.format == "csv") os << "label,lambda,b,admissible,top,bottom,submodule,casimir,relations\n";
    for (const FiniteDimModule& m : ms) {
      if (cfg.format == "csv")
        os << '"' << m.entry.label() << "\"," << num(*m.entry.lambda) << ',' << num(m.entry.b) << ','
           << (m.entry.admissible ? 1 : 0) << ',' << num(m.top_residual) << ',' << num(m.bottom_residual) << ','
           << num(m.submodule_residual) << ',' << num(m.casimir) << ',' << num(m.relations) << '\n';
      else
        os << m.entry.label() << ": lambda = " << num(*m.entry.lambda) << ", lowest weight " << num(m.entry.b)
           << (m.entry.admissible ? ", admissible" : ", not admissible") << ", max residual "
           << num(std::max({m.top_residual, m.bottom_residual, m.submodule_residual, m.casimir, m.relations}))
           << '\n';
    }
    emit(cfg, os.str());
  }
  return ok ? kOk : kFailure;
}

double env_tol() {
  const char* s = std::getenv("QSL2R_TOL");
  if (!s || !*s) return kDefaultTol;
  std::istringstream is(s);
  is.imbue(std::locale::classic());
  double v = 0;
  if (!(is >> v) || !is.eof() || !(v > 0)) throw UsageError(std::string("QSL2R_TOL must be a positive number, got '") + s + "'");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  try {
    cfg.tol = env_tol();
  } catch (const UsageError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  }

  CLI::App app{"qsl2r: quantum SL(2,R) coideal computations"};
  app.require_subcommand(1);
  auto common = [&](CLI::App* s, const std::string& default_format) {
    cfg.format = default_format;
    s->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
    s->add_option("--output,-o", cfg.output, "Write output to this path");
    s->add_option("--tol", cfg.tol, "Tolerance (default 1e-9 or $QSL2R_TOL)");
  };
  auto params = [&](CLI::App* s) {
    s->add_option("--q", cfg.q, "Deformation parameter in (0,1)");
    s->add_option("--a", cfg.a, "t = [[a]]");
  };

  CLI::App* verify = app.add_subcommand("verify", "Exact verification suites");
  verify->add_option("--presentation", cfg.verify.presentation, "all, uqsu2, oqsu2, podles or qsl2r");
  verify->add_flag("--corrupt", cfg.verify.corrupt, "Test hook: replace the PODLES rule XY by XY -> 1");
  verify->add_option("--max-degree", cfg.verify.orthogonality_only_degree,
                     "Run only coideal orthogonality up to this degree")
      ->check(CLI::PositiveNumber);
  std::string load_path;
  verify->add_option("--load", load_path, "Check a dumped presentation file instead")->check(CLI::ExistingFile);
  std::string dump_name;
  verify->add_option("--dump", dump_name, "Print the text dump of a bundled presentation and exit");

  CLI::App* spectrum = app.add_subcommand("spectrum", "Spectrum of pi_j(iB_t)");
  CLI::App* spherical = app.add_subcommand("spherical", "Spherical vector of pi_j");
  for (CLI::App* s : {spectrum, spherical}) {
    params(s);
    s->add_option("--spin", cfg.spin, "Spin j (integer or n/2)")->required();
  }

  CLI::App* cls = app.add_subcommand("classify", "Admissible irreducible *-representations for t = [[a]]");
  params(cls);
  cls->add_option("--nmax", cfg.nmax, "Members listed per discrete family");

  CLI::App* module = app.add_subcommand("module", "Window of a weight module with consistency residuals");
  params(module);
  module->add_option("--lambda", cfg.lambda, "Casimir value: number, qang:x or neg-qang:x");
  module->add_option("--b", cfg.b, "Weight b");
  module->add_option("--window,-W", cfg.W, "Half-width W");
  module->add_option("--family", cfg.family, "canonical, vplus, vminus or finite");
  module->add_option("--N", cfg.N, "Dimension for --family finite");

  CLI::App* scan = app.add_subcommand("scan", "Unitarity region in lambda");
  params(scan);
  scan->add_option("--b", cfg.bs, "Weight b (repeatable)");
  scan->add_option("--lambda-grid", cfg.grid, "lo:hi:count");

  CLI::App* fd = app.add_subcommand("finite-dim", "Finite-dimensional modules V_N^+ and V_N^-");
  params(fd);
  fd->add_option("--N", cfg.N, "Dimension")->required();

  std::vector<std::pair<CLI::App*, std::string>> formats = {{verify, "text"}, {spectrum, "json"}, {spherical, "json"},
                                                            {cls, "json"},    {module, "json"},   {scan, "json"},
                                                            {fd, "json"}};
  for (auto& [s, f] : formats) common(s, f);
  for (auto& [s, f] : formats) {
    const std::string def = f;
    s->preparse_callback([&cfg, def](size_t) { cfg.format = def; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (verify->parsed()) {
      if (!dump_name.empty()) {
        std::shared_ptr<Presentation> p = dump_name == "uqsu2"    ? make_uqsu2()
                                          : dump_name == "oqsu2"  ? make_oqsu2()
                                          : dump_name == "podles" ? make_podles()
                                          : dump_name == "qsl2r"  ? make_qsl2r()
                                                                  : nullptr;
        if (!p) throw UsageError("unknown presentation '" + dump_name + "'");
        emit(cfg, p->dump());
        return kOk;
      }
      if (!load_path.empty()) {
        std::ifstream f(load_path);
        std::stringstream ss;
        ss << f.rdbuf();
        cfg.verify.loaded_text = ss.str();
      }
      return cmd_verify(cfg);
    }
    if (spectrum->parsed()) return cmd_spectrum(cfg);
    if (spherical->parsed()) return cmd_spherical(cfg);
    if (cls->parsed()) return cmd_classify(cfg);
    if (module->parsed()) return cmd_module(cfg);
    if (scan->parsed()) return cmd_scan(cfg);
    if (fd->parsed()) return cmd_finite_dim(cfg);
  } catch (const InternalConsistencyError& e) {
    std::cerr << "internal cross-check failed: " << e.what() << "\n";
    return kFailure;
  } catch (const SpectralMismatch& e) {
    std::cerr << "spectral mismatch: " << e.what() << "\n";
    return kFailure;
  } catch (const NoSphericalVector& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
