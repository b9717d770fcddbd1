// Command-line front end: thresholds, figure data, time maps, orbits,
// horseshoe certification, periodic-orbit search and parameter scans.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nagumo/config.hpp"
#include "nagumo/error.hpp"
#include "nagumo/figures.hpp"
#include "nagumo/flow.hpp"
#include "nagumo/horseshoe.hpp"
#include "nagumo/model.hpp"
#include "nagumo/parallel.hpp"
#include "nagumo/symbolic.hpp"
#include "nagumo/timemaps.hpp"

namespace fs = std::filesystem;
using namespace nagumo;

namespace {

enum Exit { kPass = 0, kCertFail = 1, kUsage = 2, kNumeric = 3 };

struct Flags {
  std::string config;
  std::string out;
  std::optional<int> paths;
  std::optional<double> tol;
  std::optional<int> symbols;
  bool force = false;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17e", v);
  return buf;
}

/// Config file (if any) with command-line overrides applied.
RunConfig load_config(const Flags& f) {
  RunConfig cfg = f.config.empty() ? RunConfig{} : RunConfig::load(f.config);
  if (!f.out.empty()) cfg.out = f.out;
  if (f.paths) {
    if (*f.paths < 1) throw Error(ErrorKind::ParseError, "--paths must be positive");
    cfg.paths = *f.paths;
  }
  if (f.tol) {
    if (!(*f.tol > 0.0)) throw Error(ErrorKind::ParseError, "--tol must be positive");
    cfg.tol.rel = *f.tol;
    cfg.tol.abs = 1e-2 * *f.tol;
  }
  if (f.symbols) {
    if (*f.symbols < 1) throw Error(ErrorKind::ParseError, "--symbols must be positive");
    cfg.p_symbols = *f.symbols;
  }
  return cfg;
}

std::string preamble(const RunConfig& cfg, const std::string& command) {
  std::ostringstream os;
  os << "# nagumo " << command << "\n";
  cfg.write(os, "# ");
  return os.str();
}

fs::path output_path(const RunConfig& cfg, const std::string& name) {
  const fs::path dir(cfg.out);
  fs::create_directories(dir);
  return dir / name;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path.string() + "'");
  body(f);
  std::cout << "wrote " << path.string() << "\n";
}

void require_model(const RunConfig& cfg) { cfg.require({"g", "a", "n0", "n1", "alpha", "beta"}); }

// ------------------------------------------------------------------ thresholds

int cmd_thresholds(const RunConfig& cfg) {
  const ModelParams& p = cfg.params;
  std::ostringstream os;
  os << preamble(cfg, "thresholds");
  os << "thresholds\n";
  auto line = [&](const std::string& key, const std::function<std::string()>& value) {
    std::string v;
    try {
      v = value();
    } catch (const Error& e) {
      v = std::string("error: ") + e.what();
    }
    os << "  " << key << " = " << v << "\n";
  };
  const Model m = p.model();
  line("m0star", [&] { return num(m.m0star()); });
  line("m1star", [&] { return num(m.m1star()); });
  line("m1star_optimal", [&] { return num(m.m1star_optimal(1e-12)); });
  line("lambda_sup", [&] { return num(m.lambda_theta().first); });
  line("theta_sup", [&] { return num(m.lambda_theta().second); });
  line("b", [&] { return num(m.root_b()); });

  std::optional<Thresholds> th;
  try {
    th = horseshoe_constants(p, cfg.mu_bar);
  } catch (const Error& e) {
    os << "  constants = error: " << e.what() << "\n";
  }
  if (th) {
    os << "  mu_bar = " << num(th->mu_bar) << "\n";
    os << "  b_mu_bar = " << num(th->b_mu_bar) << "\n";
    os << "  kappa = " << num(th->kappa) << "\n";
    os << "  eta = " << num(th->eta) << "\n";
    os << "  mu_star = " << num(th->mu_star) << "\n";
    os << "  mu_tilde = " << num(th->mu_tilde) << "\n";
    os << "  m2star = " << num(th->m2star) << "\n";
    os << "  p_hat0 = " << num(th->p_hat0) << "\n";
    os << "  p_hat0_interior = " << (th->p_hat0_interior ? "true" : "false") << "\n";
  }
  std::optional<double> check;
  line("p_check0", [&] {
    check = timemaps::p_check0(p).value;
    return num(*check);
  });

  os << "  regime\n";
  double m0 = std::nan("");
  try {
    m0 = m.m0star();
  } catch (const Error&) {
  }
  const bool low_ok = p.n0 < m0;
  os << "    n0_below_m0star = " << (low_ok ? "true" : "false") << "\n";
  if (th) {
    os << "    m0star_below_m2star = " << (th->m0star < th->m2star ? "true" : "false") << "\n";
    os << "    n1_above_m2star = " << (p.n1 > th->m2star ? "true" : "false") << "\n";
  }
  if (th && check) {
    const double pstar = std::min(*check, th->p_hat0);
    os << "    p_star = " << num(pstar) << "\n";
    try {
      const double pb = cfg.resolved_pbar0();
      const double p0 = cfg.resolved_p0(pb);
      os << "    pbar0 = " << num(pb) << "\n";
      os << "    p0 = " << num(p0) << "\n";
      os << "    anchor_order = " << (pb > 0 && pb < p0 && p0 < pstar ? "true" : "false") << "\n";
    } catch (const Error& e) {
      os << "    anchors = error: " << e.what() << "\n";
    }
  }
  const bool regime = th && low_ok && th->m0star < th->m2star && p.n1 > th->m2star;
  os << "    in_horseshoe_regime = " << (regime ? "true" : "false") << "\n";

  std::cout << os.str();
  write_file(output_path(cfg, "thresholds.txt"), [&](std::ostream& f) { f << os.str(); });
  return kPass;
}

// ------------------------------------------------------------------ figures

int cmd_figure(const RunConfig& cfg, int k) {
  if (k < 1 || k > 5) throw Error(ErrorKind::InvalidArgument, "figure index must be 1..5");
  figures::FigureParams fp = figures::figure_defaults(k);
  if (cfg.has("g")) fp.g = cfg.params.g;
  if (cfg.has("a")) fp.a = cfg.params.a;
  if (cfg.has("n0")) fp.n0 = cfg.params.n0;
  if (cfg.has("n1")) fp.n1 = cfg.params.n1;
  if (cfg.pbar0) fp.pbar0 = *cfg.pbar0;
  if (cfg.p0) fp.p0 = *cfg.p0;
  const figures::Table t = figures::figure(k, fp);

  std::ostringstream head;
  head << preamble(cfg, "figure " + std::to_string(k));
  head << "# figure.g = " << num(fp.g) << "\n# figure.a = " << num(fp.a) << "\n# figure.n0 = " << num(fp.n0)
       << "\n# figure.n1 = " << num(fp.n1) << "\n# figure.pbar0 = " << num(fp.pbar0)
       << "\n# figure.p0 = " << num(fp.p0) << "\n";
  for (const auto& [key, value] : t.meta) std::cout << key << " = " << value << "\n";
  write_file(output_path(cfg, "fig" + std::to_string(k) + ".csv"),
             [&](std::ostream& f) { t.write_csv(f, head.str()); });
  return kPass;
}

int cmd_levelsets(const RunConfig& cfg) {
  const Model m = cfg.params.model();
  const double mu = cfg.mu.value_or(cfg.params.n1);
  std::vector<double> levels = cfg.levels;
  std::vector<double> through = cfg.through;
  if (levels.empty() && through.empty()) {
    levels.push_back(0.0);
    for (int k = 1; k <= 9; ++k) through.push_back(0.1 * k);
  }
  for (double x : through) levels.push_back(m.energy(mu, x, 0.0));
  figures::Table t = figures::level_sets(m, mu, levels);
  t.note("mu", mu);
  write_file(output_path(cfg, "levelsets.csv"),
             [&](std::ostream& f) { t.write_csv(f, preamble(cfg, "levelsets")); });
  return kPass;
}

// ------------------------------------------------------------------ timemap

int cmd_timemap(const RunConfig& cfg) {
  const ModelParams& p = cfg.params;
  const Model m = p.model();
  const double mu = cfg.mu.value_or(p.n1);
  std::vector<double> xs = cfg.queries;
  if (cfg.random_queries > 0) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> U(0.01 * p.a, 0.99 * p.a);
    for (int i = 0; i < cfg.random_queries; ++i) xs.push_back(U(rng));
  }
  if (xs.empty())
    for (int k = 1; k <= 7; ++k) xs.push_back(0.05 * k);

  figures::Table t;
  t.columns = {"x0", "sigma", "sigma_lower", "sigma_upper", "tau", "x1", "tau_sqrt_mu", "tau_limit"};
  const double nan = std::nan("");
  for (double x0 : xs) {
    double s = nan, slo = nan, shi = nan, tau = nan, x1 = nan, lim = nan;
    try {
      s = timemaps::sigma(m, p.n0, x0, p.a);
      std::tie(slo, shi) = timemaps::sigma_bounds(m, p.n0, x0, p.a);
    } catch (const Error&) {
    }
    try {
      const auto per = timemaps::tau(m, mu, x0);
      tau = per.period;
      x1 = per.x1;
      lim = timemaps::tau_limit(m, x0);
    } catch (const Error&) {
    }
    t.add({x0, s, slo, shi, tau, x1, tau * std::sqrt(mu), lim});
  }
  t.note("sigma_weight", p.n0);
  t.note("sigma_target", p.a);
  t.note("tau_weight", mu);
  write_file(output_path(cfg, "timemap.csv"),
             [&](std::ostream& f) { t.write_csv(f, preamble(cfg, "timemap")); });
  return kPass;
}

// ------------------------------------------------------------------ orbit

int cmd_orbit(const RunConfig& cfg) {
  const ModelParams& p = cfg.params;
  p.validate();
  if (cfg.periods < 1) throw Error(ErrorKind::InvalidArgument, "periods must be positive");
  const flow::Trajectory traj =
      flow::flow_switched(p, {cfg.x0, cfg.y0}, cfg.periods * p.beta, cfg.tol);
  const auto conf = flow::confinement_check(traj);

  figures::Table blocks;
  blocks.columns = {"block", "maxima", "minima", "slope_alpha", "slope_beta"};
  for (int k = 0; k < cfg.periods; ++k) {
    const double t0 = k * p.beta;
    double maxima = std::nan(""), minima = std::nan("");
    try {
      const auto [mx, mn] = flow::count_extrema(traj, t0, t0 + p.alpha);
      maxima = mx;
      minima = mn;
    } catch (const Error&) {
    }
    blocks.add({static_cast<double>(k), maxima, minima, traj.state_at(t0 + p.alpha).y,
                traj.state_at(t0 + p.beta).y});
  }
  blocks.note("inf_x", conf.inf_x);
  blocks.note("sup_x", conf.sup_x);
  blocks.note("confined", conf.confined ? "true" : "false");

  const std::string head = preamble(cfg, "orbit");
  write_file(output_path(cfg, "orbit.csv"), [&](std::ostream& f) {
    f << head;
    traj.write_csv(f, p.n0, p.n1);
  });
  write_file(output_path(cfg, "orbit_blocks.csv"), [&](std::ostream& f) { blocks.write_csv(f, head); });
  std::cout << "confined = " << (conf.confined ? "true" : "false") << " inf_x = " << num(conf.inf_x)
            << " sup_x = " << num(conf.sup_x) << "\n";
  return kPass;
}

// ------------------------------------------------------------------ certify

horseshoe::Certificate certify(const RunConfig& cfg, unsigned threads) {
  horseshoe::CertifyOptions opts = cfg.certify();
  opts.stretch.threads = threads;
  double pb = std::nan(""), p0 = std::nan("");
  try {
    pb = cfg.resolved_pbar0();
    p0 = cfg.resolved_p0(pb);
  } catch (const Error& e) {
    // Defaulted anchors need the regime; report a regime failure as such.
    horseshoe::Certificate cert = horseshoe::certify_horseshoe(cfg.params, pb, p0, opts);
    if (cert.first_failure == "regime") return cert;
    cert.stages.clear();
    cert.min_margin = std::nan("");
    cert.first_failure = "anchors";
    cert.stages.push_back({"anchors", false, {{"error", e.what()}}});
    return cert;
  }
  return horseshoe::certify_horseshoe(cfg.params, pb, p0, opts);
}

int cmd_certify(const RunConfig& cfg) {
  require_model(cfg);
  const horseshoe::Certificate cert = certify(cfg, cfg.threads);
  const std::string head = preamble(cfg, "certify");
  write_file(output_path(cfg, "certificate.txt"), [&](std::ostream& f) {
    f << head;
    cert.write(f);
  });
  write_file(output_path(cfg, "certificate_paths.csv"), [&](std::ostream& f) {
    f << head;
    cert.write_paths_csv(f);
  });
  std::cout << "pass = " << (cert.pass ? "true" : "false");
  if (!cert.pass) std::cout << " (failed stage: " << cert.first_failure << ")";
  std::cout << " min_margin = " << num(cert.min_margin) << "\n";
  return cert.pass ? kPass : kCertFail;
}

// ------------------------------------------------------------------ find-periodic

/// Reads `key = value` pairs of a certificate's top block and parameter block.
std::map<std::string, std::string> read_certificate(const fs::path& path) {
  std::ifstream f(path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("  stage ", 0) == 0) break;
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    key.erase(0, key.find_first_not_of(' '));
    kv[key] = line.substr(eq + 3);
  }
  return kv;
}

/// Empty when the certificate in the output directory covers this config.
std::string certificate_problem(const RunConfig& cfg, double pb, double p0) {
  const fs::path path = fs::path(cfg.out) / "certificate.txt";
  if (!fs::exists(path)) return "no certificate at " + path.string();
  const auto kv = read_certificate(path);
  auto get = [&](const std::string& k) {
    const auto it = kv.find(k);
    return it == kv.end() ? std::string() : it->second;
  };
  if (get("pass") != "true") return "certificate at " + path.string() + " does not pass";
  const ModelParams& p = cfg.params;
  const std::vector<std::pair<std::string, double>> expect = {
      {"g", p.g}, {"a", p.a}, {"n0", p.n0}, {"n1", p.n1}, {"alpha", p.alpha},
      {"beta", p.beta}, {"pbar0", pb}, {"p0", p0}};
  for (const auto& [k, v] : expect)
    if (get(k) != num(v)) return "certificate parameter " + k + " = " + get(k) + " differs from " + num(v);
  const std::string ps = get("p_symbols");
  if (ps.empty() || std::stoi(ps) < cfg.p_symbols)
    return "certificate covers " + (ps.empty() ? std::string("?") : ps) + " symbols, need " +
           std::to_string(cfg.p_symbols);
  return {};
}

int cmd_find_periodic(const RunConfig& cfg, const std::string& itin_text, bool force) {
  require_model(cfg);
  const symbolic::Itinerary itin = symbolic::Itinerary::parse(itin_text);
  itin.validate(cfg.p_symbols);
  const double pb = cfg.resolved_pbar0();
  const double p0 = cfg.resolved_p0(pb);
  if (!force) {
    const std::string problem = certificate_problem(cfg, pb, p0);
    if (!problem.empty()) {
      std::cerr << "error: " << problem << "; run certify first or pass --force\n";
      return kCertFail;
    }
  }
  horseshoe::RegionOptions ro;
  ro.mu_bar = cfg.mu_bar;
  const horseshoe::RegionSet regions = horseshoe::build_regions(cfg.params, pb, p0, ro);
  const symbolic::PeriodicOrbit orbit = symbolic::find_periodic(cfg.params, regions, itin, cfg.search());

  std::string stem = "periodic_";
  for (std::size_t i = 0; i < itin.size(); ++i) stem += (i ? "-" : "") + std::to_string(itin.symbols[i]);
  const std::string head = preamble(cfg, "find-periodic " + itin.str());
  write_file(output_path(cfg, stem + ".csv"), [&](std::ostream& f) {
    f << head;
    orbit.write_csv(f, cfg.params, cfg.tol);
  });
  write_file(output_path(cfg, stem + ".txt"), [&](std::ostream& f) {
    f << head;
    orbit.write(f);
  });
  std::cout << "itinerary = " << itin.str() << " residual = " << num(orbit.residual)
            << " verified = " << (orbit.verification.pass ? "true" : "false") << "\n";
  for (std::size_t k = 0; k < orbit.anchors.size(); ++k) {
    const PhaseState z = orbit.anchor(k);
    std::cout << "  z" << k << " = (" << num(z.x) << ", " << num(z.y) << ")\n";
  }
  if (!orbit.verification.pass) {
    std::cerr << "verification failed: " << orbit.verification.first_failure << "\n";
    return kCertFail;
  }
  return kPass;
}

// ------------------------------------------------------------------ scan

struct ScanPoint {
  ModelParams params;
  int p_symbols = 2;
};

int cmd_scan(const RunConfig& cfg) {
  const std::vector<std::string> axes_order = {"n0", "n1", "alpha", "beta", "low", "p_symbols"};
  std::vector<std::pair<std::string, std::vector<double>>> axes;
  for (const auto& name : axes_order)
    if (const auto it = cfg.scan.find(name); it != cfg.scan.end()) axes.emplace_back(name, it->second);
  if (cfg.scan.count("beta") && cfg.scan.count("low"))
    throw Error(ErrorKind::ParseError, "scan.beta and scan.low are exclusive");

  std::size_t total = 1;
  for (const auto& [name, values] : axes) total *= values.size();
  const double base_low = cfg.params.beta - cfg.params.alpha;

  std::vector<ScanPoint> points;
  points.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    ScanPoint sp{cfg.params, cfg.p_symbols};
    std::optional<double> low;
    bool beta_set = false;
    std::size_t rem = idx;
    for (auto it = axes.rbegin(); it != axes.rend(); ++it) {
      const double v = it->second[rem % it->second.size()];
      rem /= it->second.size();
      if (it->first == "n0") sp.params.n0 = v;
      if (it->first == "n1") sp.params.n1 = v;
      if (it->first == "alpha") sp.params.alpha = v;
      if (it->first == "beta") {
        sp.params.beta = v;
        beta_set = true;
      }
      if (it->first == "low") low = v;
      if (it->first == "p_symbols") sp.p_symbols = static_cast<int>(v);
    }
    if (low) {
      sp.params.beta = sp.params.alpha + *low;
    } else if (!beta_set) {
      sp.params.beta = sp.params.alpha + base_low;
    }
    points.push_back(sp);
  }

  struct Row {
    horseshoe::Certificate cert;
    std::string error;
  };
  std::vector<Row> rows(points.size());
  std::mutex print;
  parallel_for(points.size(), cfg.threads, [&](std::size_t i) {
    RunConfig local = cfg;
    local.params = points[i].params;
    local.p_symbols = points[i].p_symbols;
    try {
      rows[i].cert = certify(local, 1);
    } catch (const std::exception& e) {
      rows[i].error = e.what();
    }
    std::lock_guard<std::mutex> lock(print);
    std::cerr << "scan point " << i + 1 << "/" << points.size() << ": "
              << (rows[i].cert.pass ? "pass" : "fail") << "\n";
  });

  auto stage_value = [](const horseshoe::Certificate& c, const std::string& key) {
    for (const auto& st : c.stages)
      for (const auto& [k, v] : st.values)
        if (k == key) return sci(std::strtod(v.c_str(), nullptr));
    return std::string("nan");
  };
  std::size_t passed = 0;
  write_file(output_path(cfg, "scan.csv"), [&](std::ostream& f) {
    f << preamble(cfg, "scan");
    f << "n0,n1,alpha,beta,low,p_symbols,pbar0,p0,pass,failing_stage,min_margin,margin_low,"
         "margin_high,check_margin,hat_margin,min_zeta,error\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
      const ModelParams& p = points[i].params;
      const auto& c = rows[i].cert;
      std::string err = rows[i].error;
      for (const auto& st : c.stages)
        for (const auto& [k, v] : st.values)
          if (k == "error" && err.empty()) err = v;
      for (char& ch : err)
        if (ch == '"') ch = '\'';
      passed += c.pass ? 1 : 0;
      f << sci(p.n0) << "," << sci(p.n1) << "," << sci(p.alpha) << "," << sci(p.beta) << ","
        << sci(p.beta - p.alpha) << "," << points[i].p_symbols << "," << sci(c.pbar0) << "," << sci(c.p0)
        << "," << (c.pass ? "true" : "false") << "," << (c.pass ? "none" : c.first_failure) << ","
        << sci(c.min_margin) << "," << stage_value(c, "margin_low") << "," << stage_value(c, "margin_high")
        << "," << stage_value(c, "check_margin") << "," << stage_value(c, "hat_margin") << ","
        << stage_value(c, "min_zeta") << ",\"" << err << "\"\n";
    }
  });
  std::cout << "points = " << points.size() << " passed = " << passed << "\n";
  return kPass;
}

int run(int argc, char** argv) {
  CLI::App app{"Switched Nagumo equation: thresholds, figure data, horseshoe certificates and orbits"};
  app.require_subcommand(1);
  Flags flags;
  app.add_option("--config", flags.config, "Configuration file (key = value)")->check(CLI::ExistingFile);
  app.add_option("--out", flags.out, "Output directory (overrides the config)");
  app.add_option("--paths", flags.paths, "Crossing paths per stretching check");
  app.add_option("--tol", flags.tol, "Relative integration tolerance");
  app.add_option("--symbols", flags.symbols, "Number of symbols p");
  app.add_flag("--force", flags.force, "Run find-periodic without a passing certificate");

  int fig = 0;
  std::string itinerary;
  auto* thresholds = app.add_subcommand("thresholds", "Print every threshold and the regime verdict");
  auto* figure = app.add_subcommand("figure", "Emit plot data for figure K (1..5)");
  figure->add_option("k", fig, "Figure index")->required()->check(CLI::Range(1, 5));
  auto* levelsets = app.add_subcommand("levelsets", "Level lines of the energy at weight mu");
  auto* timemap = app.add_subcommand("timemap", "Half-transit times and periods at query abscissae");
  auto* orbit = app.add_subcommand("orbit", "Integrate the switched equation from (x0, y0)");
  auto* certify_cmd = app.add_subcommand("certify", "Certify the horseshoe at the configured parameters");
  auto* find = app.add_subcommand("find-periodic", "Locate the periodic orbit with a given itinerary");
  find->add_option("itinerary", itinerary, "Symbols of one period, e.g. 1,2,1")->required();
  auto* scan = app.add_subcommand("scan", "Certify every point of the configured parameter grid");
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    const RunConfig cfg = load_config(flags);
    if (*thresholds) return cmd_thresholds(cfg);
    if (*figure) return cmd_figure(cfg, fig);
    if (*levelsets) return cmd_levelsets(cfg);
    if (*timemap) return cmd_timemap(cfg);
    if (*orbit) return cmd_orbit(cfg);
    if (*certify_cmd) return cmd_certify(cfg);
    if (*find) return cmd_find_periodic(cfg, itinerary, flags.force);
    if (*scan) return cmd_scan(cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    const bool usage = e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::InvalidArgument;
    return usage ? kUsage : kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  }
  return kUsage;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
