#include "vkplate/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace vkplate {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr const char* kToolVersion = "1.0.0";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + v + "' is not a number");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError("key '" + key + "': '" + v + "' is not an integer");
  return x;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("key '" + key + "': '" + v + "' is not an unsigned integer");
  }
  return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "': '" + v + "' is not a boolean");
}

struct Key {
  std::string name;
  std::string help;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<json(const RunConfig&)> get;
};

#define VK_DOUBLE(NAME, FIELD, HELP)                                                          \
  Key {                                                                                       \
    NAME, HELP, [](RunConfig& r, const std::string& v) { r.FIELD = parse_double(NAME, v); }, \
        [](const RunConfig& r) { return json(r.FIELD); }                                     \
  }
#define VK_INT(NAME, FIELD, HELP)                                                                    \
  Key {                                                                                              \
    NAME, HELP, [](RunConfig& r, const std::string& v) { r.FIELD = int(parse_int(NAME, v)); },      \
        [](const RunConfig& r) { return json(r.FIELD); }                                            \
  }
#define VK_STRING(NAME, FIELD, HELP)                                                                       \
  Key {                                                                                                    \
    NAME, HELP, [](RunConfig& r, const std::string& v) { r.FIELD = v; }, [](const RunConfig& r) { return json(r.FIELD); } \
  }
#define VK_BOOL(NAME, FIELD, HELP)                                                          \
  Key {                                                                                     \
    NAME, HELP, [](RunConfig& r, const std::string& v) { r.FIELD = parse_bool(NAME, v); }, \
        [](const RunConfig& r) { return json(r.FIELD); }                                   \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> k{
      VK_DOUBLE("ell", plate.ell, "half-width of the deck"),
      VK_DOUBLE("sigma", plate.sigma, "Poisson ratio, 0 < sigma < 1/2"),
      VK_DOUBLE("eps", plate.eps, "width of each hanger strip"),
      VK_DOUBLE("k", plate.k, "hanger Hooke constant (>= 0)"),
      VK_DOUBLE("delta", plate.delta, "cable nonlinearity (>= 0)"),
      VK_STRING("lambda", lam, "buckling load: number or multiple of lambda1, e.g. 1.05*lambda1"),
      VK_INT("M", M, "number of sine modes in x"),
      VK_INT("N", N, "polynomial degree + 1 in y"),
      VK_DOUBLE("lam_max", lam_max, "spectrum: upper end of the enumeration"),
      VK_STRING("lam_from", lam_from, "sweep: first lambda"),
      VK_STRING("lam_to", lam_to, "sweep: last lambda"),
      VK_INT("steps", steps, "sweep: number of lambda values (>= 2)"),
      VK_STRING("load", load, "external load: zero | sinx | e1"),
      VK_DOUBLE("load_amplitude", load_amplitude, "c in c*sin(x) or c*e1"),
      VK_BOOL("mountain_pass", mountain_pass, "solve: search a saddle between minima of opposite sign"),
      VK_INT("plot_nx", plot_nx, "plot samples in x"),
      VK_INT("plot_ny", plot_ny, "plot samples in y"),
      Key{"seed", "random seed for starts and probes",
          [](RunConfig& r, const std::string& v) { r.solver.seed = parse_u64("seed", v); },
          [](const RunConfig& r) { return json(r.solver.seed); }},
      VK_INT("n_starts", solver.n_starts, "multistart: number of starts"),
      VK_INT("eigen_starts", solver.eigen_starts, "multistart: eigenmodes used for +-s e_k starts"),
      VK_DOUBLE("start_scale", solver.start_scale, "multistart: amplitude scale of random starts"),
      VK_DOUBLE("grad_tol", solver.grad_tol, "relative residual tolerance"),
      VK_DOUBLE("step_tol", solver.step_tol, "relative Newton increment tolerance"),
      VK_INT("max_iter", solver.max_iter, "descent iterations per start"),
      VK_DOUBLE("divergence_norm", solver.divergence_norm, "||u||_* that stops a divergent descent"),
      VK_DOUBLE("dedup_tol", solver.dedup_tol, "relative distance for equal equilibria"),
      VK_BOOL("deflation", solver.deflation, "push later starts away from found equilibria"),
      VK_DOUBLE("deflation_power", solver.deflation_power, "deflation exponent"),
      VK_DOUBLE("deflation_shift", solver.deflation_shift, "deflation weight"),
      VK_INT("string_images", solver.string_images, "mountain pass: images on the string"),
      VK_INT("saddle_iters", solver.saddle_iters, "mountain pass: Newton refinement iterations"),
      VK_DOUBLE("curvature_tol", solver.curvature_tol, "stability: curvature threshold"),
      VK_DOUBLE("small_f", solver.small_f, "L2 norm of the default small load in theorem scenarios"),
      VK_STRING("out", out, "output directory"),
      VK_STRING("only", only, "verify: run one suite"),
  };
  return k;
}

#undef VK_DOUBLE
#undef VK_INT
#undef VK_STRING
#undef VK_BOOL

json config_echo(const RunConfig& rc) {
  json j = json::object();
  for (const auto& k : keys()) j[k.name] = k.get(rc);
  return j;
}

std::string timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

json metadata(const RunConfig& rc, const std::string& command) {
  const PlateConfig p = effective_plate(rc);
  json m;
  m["tool"] = "vkplate";
  m["version"] = kToolVersion;
  m["command"] = command;
  m["timestamp"] = timestamp();
  m["seed"] = rc.solver.seed;
  m["grid"] = {{"M", rc.M}, {"N", rc.N}};
  m["lambda"] = p.lambda;
  m["config"] = config_echo(rc);
  return m;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ParameterError("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

// CSV plus a sidecar <file>.meta.json holding the metadata block.
class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const json& meta, const std::vector<std::string>& columns)
      : os_(path, std::ios::binary) {
    if (!os_) throw ParameterError("cannot write " + path.string());
    json side = meta;
    side["columns"] = columns;
    write_json(path.string() + ".meta.json", side);
    for (size_t i = 0; i < columns.size(); ++i) os_ << (i ? "," : "") << columns[i];
    os_ << '\n';
    os_ << std::setprecision(12);
  }
  template <class... T>
  void row(const T&... v) {
    bool first = true;
    ((os_ << (first ? "" : ",") << v, first = false), ...);
    os_ << '\n';
  }

 private:
  std::ofstream os_;
};

void write_field_csv(const fs::path& path, const json& meta, const Field& u, int nx, int ny) {
  CsvWriter w(path, meta, {"x", "y", "value"});
  const double ell = u.grid().ell();
  for (int i = 0; i < nx; ++i) {
    const double x = std::numbers::pi * i / (nx - 1);
    for (int j = 0; j < ny; ++j) {
      const double y = -ell + 2.0 * ell * j / (ny - 1);
      w.row(x, y, u.value(x, y));
    }
  }
}

LoadSpec load_spec(const RunConfig& rc) {
  if (rc.load == "zero") return LoadSpec::zero();
  if (rc.load == "sinx") return LoadSpec::sin_x(rc.load_amplitude);
  if (rc.load == "e1") return LoadSpec::e1(rc.load_amplitude);
  throw ConfigError("load must be zero, sinx or e1");
}

json equilibrium_json(const Equilibrium& e, int index) {
  json j;
  j["index"] = index;
  j["lambda"] = e.lambda;
  j["energy"] = e.energy;
  j["residual"] = e.residual;
  j["amplitude_e1"] = e.amplitude;
  j["norm_star"] = norm_star(e.u);
  j["converged"] = e.converged;
  j["iterations"] = e.iterations;
  j["origin"] = e.origin;
  j["stability"] = to_string(e.stability.tag);
  j["morse_estimate"] = e.stability.morse_estimate;
  j["curvatures"] = e.stability.curvatures;
  if (e.stability.curvature_plus_e1) j["curvature_plus_e1"] = *e.stability.curvature_plus_e1;
  if (e.stability.curvature_minus_e1) j["curvature_minus_e1"] = *e.stability.curvature_minus_e1;
  json rows = json::array();
  for (Eigen::Index m = 0; m < e.u.coeffs().rows(); ++m) {
    std::vector<double> r(e.u.coeffs().cols());
    for (Eigen::Index c = 0; c < e.u.coeffs().cols(); ++c) r[c] = e.u.coeffs()(m, c);
    rows.push_back(r);
  }
  j["coefficients"] = rows;
  return j;
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& config_keys() {
  static const std::vector<std::pair<std::string, std::string>> list = [] {
    std::vector<std::pair<std::string, std::string>> v;
    for (const auto& k : keys()) v.emplace_back(k.name, k.help);
    return v;
  }();
  return list;
}

void set_config_value(RunConfig& rc, const std::string& key_in, const std::string& value_in) {
  std::string key = trim(key_in);
  const std::string value = trim(value_in);
  if (key == "lam") key = "lambda";
  if (key == "lam-max") key = "lam_max";
  for (const auto& k : keys()) {
    if (k.name == key) {
      k.set(rc, value);
      rc.given[key] = value;
      return;
    }
  }
  throw ConfigError("unknown configuration key '" + key + "'");
}

void parse_config_text(RunConfig& rc, const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    set_config_value(rc, line.substr(0, eq), line.substr(eq + 1));
  }
}

void load_config_file(RunConfig& rc, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  parse_config_text(rc, ss.str());
}

double resolve_lambda(const std::string& text_in, const PlateConfig& cfg) {
  const std::string text = trim(text_in);
  const std::string tag = "lambda1";
  if (text.size() >= tag.size() && text.compare(text.size() - tag.size(), tag.size(), tag) == 0) {
    std::string factor = trim(text.substr(0, text.size() - tag.size()));
    if (!factor.empty() && factor.back() == '*') factor = trim(factor.substr(0, factor.size() - 1));
    const double f = factor.empty() ? 1.0 : parse_double("lambda", factor);
    PlateConfig c = cfg;
    c.lambda = 0.0;
    c.validate();
    return f * lambda1_value(c);
  }
  return parse_double("lambda", text);
}

PlateConfig effective_plate(const RunConfig& rc) {
  PlateConfig p = rc.plate;
  p.lambda = resolve_lambda(rc.lam, rc.plate);
  return p;
}

void validate_run_config(const RunConfig& rc) {
  effective_plate(rc).validate();
  if (rc.M < 1) throw ParameterError("M must be >= 1");
  if (rc.N < 8) throw ParameterError("N must be >= 8");
  if (!(rc.lam_max > 0.0)) throw ParameterError("lam_max must be > 0");
  if (rc.steps < 2) throw ParameterError("steps must be >= 2");
  if (rc.plot_nx < 2 || rc.plot_ny < 2) throw ParameterError("plot_nx and plot_ny must be >= 2");
  if (rc.load != "zero" && rc.load != "sinx" && rc.load != "e1") throw ConfigError("load must be zero, sinx or e1");
  rc.solver.validate();
  if (!rc.only.empty()) {
    const auto& n = suite_names();
    if (std::find(n.begin(), n.end(), rc.only) == n.end()) throw ConfigError("unknown suite '" + rc.only + "'");
  }
}

int cmd_spectrum(const RunConfig& rc, std::ostream& log) {
  validate_run_config(rc);
  const PlateConfig p = effective_plate(rc);
  const auto modes = enumerate_spectrum(p, rc.lam_max);
  fs::create_directories(rc.out);
  json doc;
  doc["metadata"] = metadata(rc, "spectrum");
  json list = json::array();
  for (const auto& e : modes) {
    json j;
    j["m"] = e.m;
    j["lambda"] = e.lambda;
    j["kind"] = to_string(e.kind);
    j["beta"] = e.beta;
    j["gamma"] = e.gamma;
    j["coeffs"] = e.coeffs;
    list.push_back(j);
  }
  doc["modes"] = list;
  write_json(fs::path(rc.out) / "spectrum.json", doc);

  // Mode shapes with the profile scaled to unit maximum modulus.
  CsvWriter w(fs::path(rc.out) / "modes.csv", doc["metadata"], {"m", "lambda", "x", "y", "value"});
  for (const auto& e : modes) {
    double peak = 0.0;
    for (int j = 0; j < rc.plot_ny; ++j) {
      const double y = -p.ell + 2.0 * p.ell * j / (rc.plot_ny - 1);
      peak = std::max(peak, std::abs(e.profile(y)));
    }
    if (peak == 0.0) peak = 1.0;
    for (int i = 0; i < rc.plot_nx; ++i) {
      const double x = std::numbers::pi * i / (rc.plot_nx - 1);
      for (int j = 0; j < rc.plot_ny; ++j) {
        const double y = -p.ell + 2.0 * p.ell * j / (rc.plot_ny - 1);
        w.row(e.m, e.lambda, x, y, e.profile(y) / peak * std::sin(e.m * x));
      }
    }
  }
  log << modes.size() << " eigenvalues below " << rc.lam_max;
  if (!modes.empty()) log << ", lambda1 = " << std::setprecision(15) << modes.front().lambda;
  log << '\n';
  return kExitOk;
}

int cmd_solve(const RunConfig& rc, std::ostream& log) {
  validate_run_config(rc);
  const PlateConfig p = effective_plate(rc);
  const GridPtr g = make_grid(rc.M, rc.N, p);
  const Functional J(g, p, load_spec(rc));
  const MultistartResult ms = multistart(J, rc.solver, default_starts(J, rc.solver));
  std::vector<Equilibrium> sols = ms.solutions;
  std::vector<std::string> notes;
  if (rc.mountain_pass) {
    const Equilibrium* lo = nullptr;
    const Equilibrium* hi = nullptr;
    for (const auto& s : sols) {
      if (s.stability.tag != Stability::Stable) continue;
      if (s.amplitude < 0.0 && !lo) lo = &s;
      if (s.amplitude > 0.0 && !hi) hi = &s;
    }
    if (lo && hi) {
      try {
        Equilibrium sad = mountain_pass(*lo, *hi, J, rc.solver);
        const bool dup = std::any_of(sols.begin(), sols.end(), [&](const Equilibrium& s) {
          return norm_star(s.u - sad.u) <= rc.solver.dedup_tol * std::max(1.0, norm_star(s.u));
        });
        if (sad.converged && !dup) sols.push_back(std::move(sad));
      } catch (const NumericalError& e) {
        notes.emplace_back(std::string("mountain pass: ") + e.what());
      }
    }
  }
  fs::create_directories(rc.out);
  json doc;
  doc["metadata"] = metadata(rc, "solve");
  doc["load"] = load_spec(rc).describe();
  doc["starts"] = ms.starts;
  doc["converged_starts"] = ms.converged;
  doc["notes"] = notes;
  json list = json::array();
  for (size_t i = 0; i < sols.size(); ++i) {
    list.push_back(equilibrium_json(sols[i], int(i)));
    write_field_csv(fs::path(rc.out) / ("u_" + std::to_string(i) + ".csv"), doc["metadata"], sols[i].u, rc.plot_nx,
                    rc.plot_ny);
    write_field_csv(fs::path(rc.out) / ("phi_" + std::to_string(i) + ".csv"), doc["metadata"], sols[i].phi,
                    rc.plot_nx, rc.plot_ny);
    log << "solution " << i << ": energy " << std::setprecision(10) << sols[i].energy << ", residual "
        << std::setprecision(3) << sols[i].residual << ", (u,e1)* " << std::setprecision(8) << sols[i].amplitude
        << ", " << to_string(sols[i].stability.tag) << " (morse " << sols[i].stability.morse_estimate << ")\n";
  }
  doc["solutions"] = list;
  write_json(fs::path(rc.out) / "equilibria.json", doc);
  for (const auto& n : notes) log << n << '\n';
  return kExitOk;
}

int cmd_sweep(const RunConfig& rc, std::ostream& log) {
  validate_run_config(rc);
  const PlateConfig p = effective_plate(rc);
  const double from = resolve_lambda(rc.lam_from, p);
  const double to = resolve_lambda(rc.lam_to, p);
  const GridPtr g = make_grid(rc.M, rc.N, p);
  const ContinuationResult res = continuation(g, p, load_spec(rc), from, to, rc.steps, rc.solver);
  fs::create_directories(rc.out);
  const json meta = metadata(rc, "sweep");
  CsvWriter w(fs::path(rc.out) / "branches.csv", meta,
              {"lambda", "branch", "parent", "energy", "amplitude", "norm_star", "residual", "stability"});
  for (const auto& b : res.branches) {
    for (const auto& pt : b.points) {
      w.row(pt.lambda, b.id, b.parent ? std::to_string(*b.parent) : std::string(""), pt.energy, pt.amplitude,
            norm_star(pt.u), pt.residual, to_string(pt.stability.tag));
    }
  }
  json doc;
  doc["metadata"] = meta;
  doc["lambda_from"] = from;
  doc["lambda_to"] = to;
  doc["steps"] = rc.steps;
  json bif = json::array();
  for (const auto& b : res.bifurcations) {
    bif.push_back({{"lambda", b.lambda}, {"lambda_previous", b.lambda_previous}, {"branch", b.branch},
                   {"parent", b.parent}});
  }
  doc["bifurcations"] = bif;
  write_json(fs::path(rc.out) / "bifurcations.json", doc);
  log << res.branches.size() << " branches, " << res.bifurcations.size() << " bifurcations";
  for (const auto& b : res.bifurcations)
    log << "; branch " << b.branch << " appears in (" << b.lambda_previous << ", " << b.lambda << "]";
  log << '\n';
  return kExitOk;
}

int cmd_verify(const RunConfig& rc, std::ostream& log) {
  validate_run_config(rc);
  VerifyContext ctx;
  ctx.plate = rc.plate;
  ctx.plate.k = 0.0;
  ctx.plate.delta = 0.0;
  ctx.plate.lambda = 0.0;
  ctx.plate.validate();
  ctx.M = rc.M;
  ctx.N = rc.N;
  ctx.solver = rc.solver;
  std::vector<std::string> names = rc.only.empty() ? suite_names() : std::vector<std::string>{rc.only};
  bool all = true;
  for (const auto& n : names) {
    const SuiteResult r = run_suite(n, ctx);
    all = all && r.passed;
    log << (r.passed ? "PASS" : "FAIL") << "  " << std::setw(2) << r.criterion << "  " << std::left << std::setw(13)
        << r.name << std::right << std::fixed << std::setprecision(1) << std::setw(7) << r.seconds << "s  "
        << std::defaultfloat << r.detail << '\n';
  }
  log << (all ? "all suites passed" : "some suites failed") << '\n';
  return all ? kExitOk : kExitVerifyFailed;
}

int run_command(const std::string& command, const RunConfig& rc, std::ostream& log, std::ostream& err) {
  try {
    if (command == "spectrum") return cmd_spectrum(rc, log);
    if (command == "solve") return cmd_solve(rc, log);
    if (command == "sweep") return cmd_sweep(rc, log);
    if (command == "verify") return cmd_verify(rc, log);
    err << "unknown command '" << command << "'\n";
    return kExitConfigError;
  } catch (const ParameterError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const NoConvergenceError& e) {
    err << "no convergence: " << e.what() << '\n';
    return kExitNoConvergence;
  } catch (const std::exception& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumericalError;
  }
}

}  // namespace vkplate
