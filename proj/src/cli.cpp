#include "prevlab/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "prevlab/boxdim.hpp"
#include "prevlab/circle_map.hpp"
#include "prevlab/density.hpp"
#include "prevlab/discrete_measure.hpp"
#include "prevlab/engine.hpp"
#include "prevlab/hopf.hpp"
#include "prevlab/interval_set.hpp"
#include "prevlab/predicates.hpp"
#include "prevlab/probe.hpp"
#include "prevlab/rng.hpp"
#include "prevlab/text.hpp"

namespace prevlab {

namespace {

std::string timestamp_utc() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

// Collects the report (key=value) and CSV bodies, then writes both files
// atomically at the end; a failed run leaves nothing behind.
class Outputs {
 public:
  explicit Outputs(const ExperimentConfig& cfg) : prefix_(cfg.get("out", cfg.command)) {
    report_ << "schema=1\n";
    report_ << "command=" << cfg.command << '\n';
    csv_ << "# schema=1\n";
  }

  void kv(const std::string& key, const std::string& value) {
    report_ << key << '=' << value << '\n';
  }
  void kv(const std::string& key, double value) { kv(key, format_double(value)); }
  void kv(const std::string& key, long value) { kv(key, std::to_string(value)); }

  std::ostringstream& csv() { return csv_; }

  void flush() {
    report_ << "timestamp=" << timestamp_utc() << '\n';
    atomic_write_file(prefix_ + ".report.txt", report_.str());
    atomic_write_file(prefix_ + ".csv", csv_.str());
  }

 private:
  std::string prefix_;
  std::ostringstream report_;
  std::ostringstream csv_;
};

long require_long(const ExperimentConfig& cfg, const std::string& key) {
  if (!cfg.has(key)) throw std::invalid_argument("missing required key '" + key + "'");
  return parse_long(cfg.get(key));
}

double require_double(const ExperimentConfig& cfg, const std::string& key) {
  if (!cfg.has(key)) throw std::invalid_argument("missing required key '" + key + "'");
  return parse_double(cfg.get(key));
}

std::string require_string(const ExperimentConfig& cfg, const std::string& key) {
  if (!cfg.has(key)) throw std::invalid_argument("missing required key '" + key + "'");
  return cfg.get(key);
}

std::uint64_t seed_of(const ExperimentConfig& cfg) {
  return static_cast<std::uint64_t>(parse_long(cfg.get("seed", "0")));
}

int workers_of(const ExperimentConfig& cfg) {
  if (cfg.has("workers")) return static_cast<int>(parse_long(cfg.get("workers")));
  if (const char* env = std::getenv("PREVLAB_WORKERS")) return static_cast<int>(parse_long(env));
  return 1;
}

// ---- sets ----------------------------------------------------------------

void run_sets(const ExperimentConfig& cfg, Outputs& out) {
  std::string example = cfg.get("example");
  if (example == "binary-shift") {
    if (cfg.has("m")) {
      int m = static_cast<int>(require_long(cfg, "m"));
      int span = static_cast<int>(parse_long(cfg.get("span", "25")));
      int n_hi = m + span;
      out.kv("example", std::string("binary-shift"));
      out.kv("m", static_cast<long>(m));
      out.kv("n_hi", static_cast<long>(n_hi));
      out.csv() << "n,intervals,measure_un,union_measure\n";
      for (int n = m + 1; n <= n_hi; ++n) {
        DyadicMeasure cum = binary_shift_union_measure(m, n);
        double mu_n = std::ldexp(1.0, -n);
        out.csv() << n << ',' << format_double(std::ldexp(1.0, n)) << ',' << format_double(mu_n)
                  << ',' << format_double(cum.to_double()) << '\n';
      }
      DyadicMeasure total = binary_shift_union_measure(m, n_hi);
      out.kv("measure", total.to_double());
      out.kv("bound", std::ldexp(1.0, -m));
      out.kv("bound_satisfied", std::string(total.less_than_pow2(m) ? "yes" : "no"));
      if (!total.less_than_pow2(m))
        throw std::runtime_error("binary-shift union measure violates its 2^-m bound");
      return;
    }
    int n = static_cast<int>(require_long(cfg, "n"));
    IntervalSet u = binary_shift_set(n);
    out.kv("example", std::string("binary-shift"));
    out.kv("n", static_cast<long>(n));
    out.kv("intervals", static_cast<long>(u.size()));
    out.kv("measure", u.measure());
    out.kv("expected_measure", std::ldexp(1.0, -n));
    out.csv() << "a,b\n";
    for (auto [a, b] : u.parts()) out.csv() << format_double(a) << ',' << format_double(b) << '\n';
    return;
  }
  if (example == "liouville") {
    double c = require_double(cfg, "c");
    int n = static_cast<int>(require_long(cfg, "exponent"));
    int qmax = static_cast<int>(require_long(cfg, "qmax"));
    IntervalSet s = liouville_neighborhood(c, n, qmax);
    double union_bound = 0.0;
    for (int q = 1; q <= qmax; ++q)
      union_bound += (q + 1) * 2.0 * c / std::pow(static_cast<double>(q), n);
    out.kv("example", std::string("liouville"));
    out.kv("c", c);
    out.kv("exponent", static_cast<long>(n));
    out.kv("qmax", static_cast<long>(qmax));
    out.kv("intervals", static_cast<long>(s.size()));
    out.kv("measure", s.measure());
    out.kv("union_bound", union_bound);
    out.csv() << "a,b\n";
    for (auto [a, b] : s.parts()) out.csv() << format_double(a) << ',' << format_double(b) << '\n';
    return;
  }
  if (cfg.has("op")) {
    std::string op = cfg.get("op");
    double amb_lo = parse_double(cfg.get("ambient_lo", "0"));
    double amb_hi = parse_double(cfg.get("ambient_hi", "1"));
    IntervalSet a = read_intervals_file(require_string(cfg, "a"), amb_lo, amb_hi);
    IntervalSet result = IntervalSet::empty(amb_lo, amb_hi);
    if (op == "complement") {
      result = set_complement(a);
    } else {
      IntervalSet b = read_intervals_file(require_string(cfg, "b"), amb_lo, amb_hi);
      if (op == "union")
        result = set_union(a, b);
      else if (op == "intersect")
        result = set_intersect(a, b);
      else
        throw std::invalid_argument("unknown set op '" + op + "'");
    }
    out.kv("op", op);
    out.kv("measure", result.measure());
    out.csv() << "a,b\n";
    for (auto [x, y] : result.parts())
      out.csv() << format_double(x) << ',' << format_double(y) << '\n';
    return;
  }
  throw std::invalid_argument("sets: need --example binary-shift|liouville or --op");
}

// ---- convolve --------------------------------------------------------------

void run_convolve(const ExperimentConfig& cfg, Outputs& out) {
  std::vector<std::string> files = split_on(require_string(cfg, "inputs"), ',');
  if (files.empty()) throw std::invalid_argument("convolve: empty input list");
  std::vector<DiscreteMeasure> measures;
  for (const std::string& f : files) measures.push_back(read_measure_file(trim(f)));
  DiscreteMeasure result = measures[0];
  if (cfg.has("sequence")) {
    int N = static_cast<int>(require_long(cfg, "sequence"));
    result = convolve_sequence(measures, N);
    out.kv("mode", std::string("sequence"));
    out.kv("N", static_cast<long>(N));
    out.kv("tail_bound", std::ldexp(1.0, -N));
  } else {
    for (size_t i = 1; i < measures.size(); ++i) result = convolve(result, measures[i]);
    out.kv("mode", std::string("fold"));
  }
  out.kv("dim", static_cast<long>(result.dim()));
  out.kv("atoms", static_cast<long>(result.atoms().size()));
  out.kv("mass", result.total_mass());
  for (int k = 0; k < result.dim(); ++k) out.csv() << 'x' << (k + 1) << ',';
  out.csv() << "w\n";
  for (const Atom& a : result.atoms()) {
    for (int k = 0; k < result.dim(); ++k) out.csv() << format_double(a.point[static_cast<size_t>(k)]) << ',';
    out.csv() << format_double(a.weight) << '\n';
  }
}

// ---- density ---------------------------------------------------------------

void run_density(const ExperimentConfig& cfg, Outputs& out) {
  IntervalSet s = IntervalSet::empty(-1e9, 1e9);
  if (cfg.has("set_file")) {
    s = read_intervals_file(cfg.get("set_file"), -1e9, 1e9);
  } else if (cfg.has("set_interval")) {
    auto parts = split_on(cfg.get("set_interval"), ',');
    if (parts.size() != 2) throw std::invalid_argument("--set-interval expects 'a,b'");
    s = IntervalSet(-1e9, 1e9, {{parse_double(parts[0]), parse_double(parts[1])}});
  } else {
    throw std::invalid_argument("density: need --set-file or --set-interval");
  }
  SetIndicator ind = [&s](const std::vector<double>& x) { return s.contains(x[0]); };

  std::string family_spec = require_string(cfg, "family");
  if (!family_spec.starts_with("uniform:"))
    throw std::invalid_argument("density: family must be 'uniform:W1,W2,...'");
  int atoms = static_cast<int>(parse_long(cfg.get("family_atoms", "2000")));
  std::vector<DiscreteMeasure> family;
  std::vector<double> widths;
  for (const std::string& w : split_on(family_spec.substr(8), ',')) {
    double width = parse_double(trim(w));
    widths.push_back(width);
    family.push_back(DiscreteMeasure::uniform_grid_1d(-width, width, atoms));
  }

  auto grid_spec = split_on(require_string(cfg, "grid"), ',');
  if (grid_spec.size() != 3) throw std::invalid_argument("density: grid must be 'lo,hi,step'");
  double lo = parse_double(grid_spec[0]), hi = parse_double(grid_spec[1]),
         step = parse_double(grid_spec[2]);
  if (!(step > 0.0) || hi < lo) throw std::invalid_argument("density: malformed grid");
  std::vector<std::vector<double>> grid;
  for (double v = lo; v <= hi + 1e-12; v += step) grid.push_back({v});

  DensityEstimate est = density_bracket(ind, family, grid);
  out.kv("set_measure", s.measure());
  out.kv("family_size", static_cast<long>(family.size()));
  out.kv("family_atoms", static_cast<long>(atoms));
  out.kv("grid_points", static_cast<long>(grid.size()));
  out.kv("grid_lo", lo);
  out.kv("grid_hi", hi);
  out.kv("grid_step", step);
  out.kv("rho_lower", est.lower);
  out.kv("rho_upper", est.upper);
  out.kv("lower_argmax_width", widths[static_cast<size_t>(est.lower_argmax)]);
  out.kv("upper_argmin_width", widths[static_cast<size_t>(est.upper_argmin)]);
  out.kv("note", std::string("heuristic bracket over the echoed family/grid only"));
  out.csv() << "measure_idx,width,v,mass\n";
  for (size_t i = 0; i < family.size(); ++i)
    for (size_t j = 0; j < grid.size(); ++j)
      out.csv() << i << ',' << format_double(widths[i]) << ',' << format_double(grid[j][0]) << ','
                << format_double(est.table[i][j]) << '\n';
}

// ---- dimension -------------------------------------------------------------

void run_dimension(const ExperimentConfig& cfg, Outputs& out) {
  std::string path = require_string(cfg, "points");
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open points file: " + path);
  std::vector<std::vector<double>> points;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<double> row;
    for (const std::string& tok : split_on(t, ',')) row.push_back(parse_double(trim(tok)));
    points.push_back(std::move(row));
  }
  std::vector<double> scales;
  for (const std::string& tok : split_on(require_string(cfg, "scales"), ','))
    scales.push_back(parse_double(trim(tok)));
  BoxCountReport report = box_counting_dimension(points, scales);
  out.kv("points", static_cast<long>(points.size()));
  out.kv("dimension", report.dimension);
  out.csv() << "scale,count\n";
  for (const BoxCountRow& r : report.rows)
    out.csv() << format_double(r.scale) << ',' << r.count << '\n';
}

// ---- tongues ---------------------------------------------------------------

void run_tongues(const ExperimentConfig& cfg, Outputs& out) {
  double eps = require_double(cfg, "eps");
  int grid = static_cast<int>(require_long(cfg, "grid"));
  int qmax = static_cast<int>(parse_long(cfg.get("qmax", "32")));
  TongueScan scan = tongue_scan(eps, grid, qmax, seed_of(cfg), workers_of(cfg));
  out.kv("eps", eps);
  out.kv("grid", static_cast<long>(grid));
  out.kv("qmax", static_cast<long>(qmax));
  out.kv("seed", static_cast<long>(seed_of(cfg)));
  out.kv("locked_count", scan.locked_count);
  out.kv("undecided_count", scan.undecided_count);
  out.kv("locked_fraction", scan.locked_fraction);
  out.kv("note", std::string("q_max truncation can only undercount locking"));
  out.csv() << "omega,locked,period,multiplier\n";
  for (const TongueRow& r : scan.rows)
    out.csv() << format_double(r.omega) << ',' << static_cast<int>(r.locked) << ',' << r.period
              << ',' << format_double(r.multiplier) << '\n';
}

// ---- hopf ------------------------------------------------------------------

void run_hopf(const ExperimentConfig& cfg, Outputs& out) {
  PlanarFamily family(read_polymap_file(require_string(cfg, "family"), "family"));
  std::vector<HopfReport> reports;
  if (cfg.has("at")) {
    auto parts = split_on(cfg.get("at"), ',');
    if (parts.size() != 3) throw std::invalid_argument("--at expects 'mu,y,z'");
    reports.push_back(hopf_classify_at(family, parse_double(parts[0]),
                                       Eigen::Vector2d(parse_double(parts[1]),
                                                       parse_double(parts[2]))));
  } else {
    HopfSearchBox box;
    if (cfg.has("box")) {
      auto parts = split_on(cfg.get("box"), ',');
      if (parts.size() != 4) throw std::invalid_argument("--box expects 'mu_lo,mu_hi,x_lo,x_hi'");
      box.mu_lo = parse_double(parts[0]);
      box.mu_hi = parse_double(parts[1]);
      box.x_lo = parse_double(parts[2]);
      box.x_hi = parse_double(parts[3]);
    }
    box.grid_per_dim = static_cast<int>(parse_long(cfg.get("grid", "7")));
    reports = hopf_classify(family, box);
  }
  out.kv("candidates", static_cast<long>(reports.size()));
  out.kv("convention",
         std::string("negative lyapunov = supercritical (stable cycles); "
                     "positive = subcritical"));
  out.csv() << "mu0,x,y,omega,trace_mu_deriv,lyapunov,classification\n";
  for (const HopfReport& r : reports)
    out.csv() << format_double(r.mu0) << ',' << format_double(r.x0(0)) << ','
              << format_double(r.x0(1)) << ',' << format_double(r.omega) << ','
              << format_double(r.trace_mu_deriv) << ',' << format_double(r.lyapunov) << ','
              << to_string(r.classification) << '\n';
}

// ---- shyness ---------------------------------------------------------------

PolyMap parse_base(const std::string& spec, const Probe& probe) {
  if (spec == "x-x2") {
    PolyMap f(1, 1);
    f.add_coeff(MultiIndex::unit(1, 0), 0, 1.0);
    f.add_coeff(MultiIndex{{2u}}, 0, -1.0);
    return f;
  }
  if (spec.starts_with("zero:")) {
    auto parts = split_on(spec.substr(5), ',');
    if (parts.size() != 2) throw std::invalid_argument("base zero:n,m malformed");
    return PolyMap(static_cast<int>(parse_long(parts[0])), static_cast<int>(parse_long(parts[1])));
  }
  if (spec.starts_with("file:")) return read_polymap_file(spec.substr(5));
  if (spec == "zero") return PolyMap(probe.ambient.n, probe.ambient.m);
  throw std::invalid_argument("unknown base spec '" + spec + "'");
}

Probe parse_probe(const std::string& spec) {
  if (spec.starts_with("constant:")) return constant_probe(static_cast<int>(parse_long(spec.substr(9))));
  if (spec.starts_with("polynomial:")) {
    auto p = split_on(spec.substr(11), ',');
    if (p.size() != 3) throw std::invalid_argument("probe polynomial:n,m,k malformed");
    return polynomial_probe(static_cast<int>(parse_long(p[0])), static_cast<int>(parse_long(p[1])),
                            static_cast<int>(parse_long(p[2])));
  }
  if (spec.starts_with("linear:")) {
    auto p = split_on(spec.substr(7), ',');
    if (p.size() != 2) throw std::invalid_argument("probe linear:n,m malformed");
    return linear_probe(static_cast<int>(parse_long(p[0])), static_cast<int>(parse_long(p[1])));
  }
  if (spec.starts_with("harmonic:")) return harmonic_probe(static_cast<int>(parse_long(spec.substr(9))));
  if (spec.starts_with("file:")) return read_probe_file(spec.substr(5));
  throw std::invalid_argument("unknown probe spec '" + spec + "'");
}

PropertyPredicate parse_predicate(const std::string& spec, const Probe& probe) {
  if (spec == "integral-nonzero") return integral_nonzero_predicate();
  if (spec.starts_with("integral-nonzero:"))
    return integral_nonzero_predicate(parse_double(spec.substr(17)));
  if (spec == "fixed-points-hyperbolic") return fixed_points_hyperbolic_predicate();
  if (spec.starts_with("fixed-points-hyperbolic:")) {
    auto p = split_on(spec.substr(24), ',');
    if (p.size() != 2) throw std::invalid_argument("fixed-points-hyperbolic:lo,hi malformed");
    return fixed_points_hyperbolic_predicate(parse_double(p[0]), parse_double(p[1]));
  }
  if (spec == "half-space")
    return coefficient_halfspace_predicate(MultiIndex::zeros(probe.ambient.n), 0);
  if (spec.starts_with("interval-file:")) {
    IntervalSet s = read_intervals_file(spec.substr(14), -1e9, 1e9);
    return coefficient_set_predicate(MultiIndex::zeros(probe.ambient.n), 0, std::move(s));
  }
  if (spec.starts_with("binary-shift:")) {
    // membership of lambda + offset in the union of U_n, n in (m, m+span]
    auto p = split_on(spec.substr(13), ',');
    int m = static_cast<int>(parse_long(p[0]));
    int span = p.size() > 1 ? static_cast<int>(parse_long(p[1])) : 8;
    double offset = p.size() > 2 ? parse_double(p[2]) : 0.5;
    IntervalSet v = IntervalSet::empty(0.0, 1.0);
    for (int n = m + 1; n <= m + span; ++n) v = set_union(v, binary_shift_set(n));
    return coefficient_set_predicate(MultiIndex::zeros(probe.ambient.n), 0, std::move(v), -offset);
  }
  if (spec == "always-holds") return always_holds_predicate();
  if (spec == "always-fails") return always_fails_predicate();
  throw std::invalid_argument("unknown predicate spec '" + spec + "'");
}

void run_shyness(const ExperimentConfig& cfg, Outputs& out) {
  Probe probe = parse_probe(require_string(cfg, "probe"));
  if (cfg.has("R")) probe.box_radius = require_double(cfg, "R");
  if (probe.ambient.kind != AmbientKind::poly)
    throw std::invalid_argument("shyness command supports polynomial ambients");
  PolyMap base = parse_base(require_string(cfg, "base"), probe);
  PropertyPredicate phi = parse_predicate(require_string(cfg, "predicate"), probe);
  std::uint64_t seed = seed_of(cfg);
  int workers = workers_of(cfg);

  out.kv("base", cfg.get("base"));
  out.kv("probe", probe.id);
  out.kv("predicate", phi.name);
  out.kv("R", probe.box_radius);
  out.kv("seed", static_cast<long>(seed));
  out.kv("note",
         std::string("failure fraction statistically indistinguishable from zero at this N "
                     "and box is the strongest certificate Monte Carlo gives"));

  if (cfg.has("profile_levels")) {
    auto p = split_on(cfg.get("profile_levels"), ',');
    std::vector<int> levels;
    for (const std::string& tok : p) levels.push_back(static_cast<int>(parse_long(trim(tok))));
    int per_cell = static_cast<int>(parse_long(cfg.get("profile_samples", "64")));
    auto rows = failure_density_profile(phi, probe, base, levels, per_cell, seed, workers);
    out.csv() << "level,cells,samples,fails,failure_fraction,cell_coverage\n";
    for (const auto& r : rows)
      out.csv() << r.level << ',' << r.cells << ',' << r.samples << ',' << r.fails << ','
                << format_double(r.failure_fraction) << ',' << format_double(r.cell_coverage)
                << '\n';
    return;
  }

  long N = require_long(cfg, "N");
  if (cfg.has("translates")) {
    long k = require_long(cfg, "translates");
    std::vector<FunctionElement> bases;
    for (long i = 0; i < k; ++i) {
      Rng rng(sub_seed(seed, "bases", static_cast<std::uint64_t>(i)));
      PolyMap b(probe.ambient.n, probe.ambient.m);
      std::vector<MultiIndex> zero_first = {MultiIndex::zeros(probe.ambient.n)};
      // random coefficients on monomials of degree <= 2
      Probe quad = polynomial_probe(probe.ambient.n, probe.ambient.m, 2);
      for (const FunctionElement& g : quad.basis)
        b += rng.uniform(-1.0, 1.0) * std::get<PolyMap>(g);
      bases.emplace_back(std::move(b));
    }
    TranslateScan scan = translate_scan(phi, probe, bases, N, seed, workers);
    out.kv("translates", k);
    out.kv("max_fraction", scan.max_fraction);
    out.csv() << "base,N,R,holds,fails,undecided,failure_fraction,ci_lo,ci_hi\n";
    for (const ShynessReport& r : scan.rows)
      out.csv() << r.base_id << ',' << r.samples << ',' << format_double(r.box_radius) << ','
                << r.holds << ',' << r.fails << ',' << r.undecided << ','
                << format_double(r.failure_fraction) << ',' << format_double(r.ci.lo) << ','
                << format_double(r.ci.hi) << '\n';
    return;
  }

  ShynessReport r =
      estimate_failure_measure(base, probe, phi, N, seed, workers, cfg.get("base"));
  out.kv("N", r.samples);
  out.kv("holds", r.holds);
  out.kv("fails", r.fails);
  out.kv("undecided", r.undecided);
  out.kv("failure_fraction", r.failure_fraction);
  out.kv("ci_lo", r.ci.lo);
  out.kv("ci_hi", r.ci.hi);
  out.csv() << "base,probe,predicate,N,R,seed,holds,fails,undecided,failure_fraction,ci_lo,ci_hi\n";
  out.csv() << r.base_id << ',' << r.probe_id << ',' << phi.name << ',' << r.samples << ','
            << format_double(r.box_radius) << ',' << r.seed << ',' << r.holds << ',' << r.fails
            << ',' << r.undecided << ',' << format_double(r.failure_fraction) << ','
            << format_double(r.ci.lo) << ',' << format_double(r.ci.hi) << '\n';
}

const std::map<std::string, std::vector<std::string>>& required_keys() {
  static const std::map<std::string, std::vector<std::string>> req = {
      {"sets", {}},
      {"convolve", {"inputs"}},
      {"density", {"family", "grid"}},
      {"dimension", {"points", "scales"}},
      {"tongues", {"eps", "grid"}},
      {"hopf", {"family"}},
      {"shyness", {"base", "probe", "predicate"}},
  };
  return req;
}

}  // namespace

std::string ExperimentConfig::get(const std::string& key, const std::string& fallback) const {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  ExperimentConfig cfg;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line is not 'key = value': '" + line + "'");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key == "command")
      cfg.command = value;
    else
      cfg.kv[key] = value;
  }
  if (cfg.command.empty()) throw std::invalid_argument("config file has no 'command = ...' line");
  return cfg;
}

int run_experiment(const ExperimentConfig& config, std::ostream& err) {
  try {
    auto it = required_keys().find(config.command);
    if (it == required_keys().end())
      throw std::invalid_argument("unknown command '" + config.command + "'");
    for (const std::string& key : it->second)
      if (!config.has(key))
        throw std::invalid_argument(config.command + ": missing required key '" + key + "'");

    Outputs out(config);
    if (config.command == "sets")
      run_sets(config, out);
    else if (config.command == "convolve")
      run_convolve(config, out);
    else if (config.command == "density")
      run_density(config, out);
    else if (config.command == "dimension")
      run_dimension(config, out);
    else if (config.command == "tongues")
      run_tongues(config, out);
    else if (config.command == "hopf")
      run_hopf(config, out);
    else if (config.command == "shyness")
      run_shyness(config, out);
    out.flush();
    return 0;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 3;
  }
}

int cli_main(int argc, char** argv) {
  CLI::App app{"prevlab: desk-scale laboratory for prevalence and shyness experiments"};
  app.require_subcommand(0, 1);

  ExperimentConfig cfg;
  std::string config_path;
  app.add_option("--config", config_path, "experiment config file (key = value lines)");

  auto add_common = [&cfg](CLI::App* sub) {
    auto bind = [&cfg](const std::string& key) {
      return [&cfg, key](const std::string& v) { cfg.kv[key] = v; };
    };
    sub->add_option_function<std::string>("--seed", bind("seed"), "master seed (default 0)");
    sub->add_option_function<std::string>("--workers", bind("workers"),
                                          "worker threads; never affects results "
                                          "(fallback: PREVLAB_WORKERS)");
    sub->add_option_function<std::string>("--out", bind("out"),
                                          "output prefix for .report.txt and .csv");
  };
  auto opt = [&cfg](CLI::App* sub, const std::string& flag, const std::string& key,
                    const std::string& help) {
    sub->add_option_function<std::string>(
        flag, [&cfg, key](const std::string& v) { cfg.kv[key] = v; }, help);
  };

  CLI::App* sets = app.add_subcommand(
      "sets", "exact interval sets: binary-shift U_n / V_m, Liouville neighborhoods, set algebra. "
              "CSV: (a,b) rows, or (n,intervals,measure_un,union_measure) in --m mode");
  opt(sets, "--example", "example", "binary-shift | liouville");
  opt(sets, "--n", "n", "binary-shift: single U_n");
  opt(sets, "--m", "m", "binary-shift: union over n in (m, m+span]");
  opt(sets, "--span", "span", "binary-shift union span (default 25)");
  opt(sets, "--c", "c", "liouville constant c > 0");
  opt(sets, "--exponent", "exponent", "liouville exponent n >= 3");
  opt(sets, "--qmax", "qmax", "liouville largest denominator");
  opt(sets, "--op", "op", "union | intersect | complement");
  opt(sets, "--a", "a", "first interval-set file");
  opt(sets, "--b", "b", "second interval-set file");
  opt(sets, "--ambient-lo", "ambient_lo", "ambient interval lower end (default 0)");
  opt(sets, "--ambient-hi", "ambient_hi", "ambient interval upper end (default 1)");
  add_common(sets);

  CLI::App* convolve_cmd = app.add_subcommand(
      "convolve", "discrete measure convolution. CSV: atom rows (x1..xd,w)");
  opt(convolve_cmd, "--inputs", "inputs", "comma-separated measure files");
  opt(convolve_cmd, "--sequence", "sequence",
      "convolve the first N inputs under the shrinking-support contract");
  add_common(convolve_cmd);

  CLI::App* density = app.add_subcommand(
      "density", "relative-prevalence brackets rho- <= rho+ over a family/grid. "
                 "CSV: (measure_idx,width,v,mass)");
  opt(density, "--set-file", "set_file", "interval-set file for S");
  opt(density, "--set-interval", "set_interval", "S as a single interval 'a,b'");
  opt(density, "--family", "family", "uniform:W1,W2,... (uniform measures on [-W, W])");
  opt(density, "--family-atoms", "family_atoms", "atoms per family measure (default 2000)");
  opt(density, "--grid", "grid", "translate grid 'lo,hi,step'");
  add_common(density);

  CLI::App* dimension = app.add_subcommand(
      "dimension", "box-counting dimension of a point cloud. CSV: (scale,count)");
  opt(dimension, "--points", "points", "CSV file, one point per row");
  opt(dimension, "--scales", "scales", "comma-separated box sizes");
  add_common(dimension);

  CLI::App* tongues = app.add_subcommand(
      "tongues", "Arnold tongue scan of x + omega + eps sin x. "
                 "CSV: (omega,locked,period,multiplier), locked 1/0/-1(undecided)");
  opt(tongues, "--eps", "eps", "coupling 0 <= eps < 1");
  opt(tongues, "--grid", "grid", "number of omega grid points (>= 1000)");
  opt(tongues, "--qmax", "qmax", "largest certified period (default 32)");
  add_common(tongues);

  CLI::App* hopf_cmd = app.add_subcommand(
      "hopf", "Andronov-Hopf nondegeneracy for a planar family file ('family 3 2' header). "
              "CSV: (mu0,x,y,omega,trace_mu_deriv,lyapunov,classification)");
  opt(hopf_cmd, "--family", "family", "family file in polynomial text format");
  opt(hopf_cmd, "--box", "box", "search box 'mu_lo,mu_hi,x_lo,x_hi' (default [-1,1]^3)");
  opt(hopf_cmd, "--grid", "grid", "seeds per axis (default 7)");
  opt(hopf_cmd, "--at", "at", "classify at a fixed point 'mu,y,z' instead of searching");
  add_common(hopf_cmd);

  CLI::App* shyness = app.add_subcommand(
      "shyness", "Monte-Carlo failure measure along a probe. "
                 "CSV: one row (base,probe,predicate,N,R,seed,holds,fails,undecided,"
                 "failure_fraction,ci_lo,ci_hi); --profile-levels and --translates switch "
                 "to per-level / per-translate rows");
  opt(shyness, "--base", "base", "x-x2 | zero | zero:n,m | file:PATH");
  opt(shyness, "--probe", "probe", "constant:m | polynomial:n,m,k | linear:n,m | harmonic:N | file:PATH");
  opt(shyness, "--predicate", "predicate",
      "integral-nonzero[:tol] | fixed-points-hyperbolic[:lo,hi] | half-space | "
      "interval-file:PATH | binary-shift:m[,span[,offset]] | always-holds | always-fails");
  opt(shyness, "--N", "N", "sample count (>= 100)");
  opt(shyness, "--R", "R", "probe box radius (default 1)");
  opt(shyness, "--translates", "translates", "scan this many random base translates");
  opt(shyness, "--profile-levels", "profile_levels", "comma-separated refinement levels");
  opt(shyness, "--profile-samples", "profile_samples", "stratified samples per cell (default 64)");
  add_common(shyness);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (!config_path.empty()) {
    try {
      ExperimentConfig file_cfg = parse_config_file(config_path);
      // flags override file values
      for (auto& [k, v] : cfg.kv) file_cfg.kv[k] = v;
      if (!app.get_subcommands().empty()) file_cfg.command = app.get_subcommands()[0]->get_name();
      return run_experiment(file_cfg, std::cerr);
    } catch (const std::invalid_argument& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 2;
    }
  }
  if (app.get_subcommands().empty()) {
    std::cerr << "error: no command given (see --help)\n";
    return 2;
  }
  cfg.command = app.get_subcommands()[0]->get_name();
  return run_experiment(cfg, std::cerr);
}

}  // namespace prevlab
