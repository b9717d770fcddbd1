#include "nagumo/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "nagumo/error.hpp"

namespace nagumo {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double to_double(std::string_view text) {
  const std::string s(trim(text));
  if (s.empty()) throw std::invalid_argument("empty number");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

long to_long(std::string_view text) {
  const double v = to_double(text);
  if (v != static_cast<double>(static_cast<long>(v))) throw std::invalid_argument("not an integer");
  return static_cast<long>(v);
}

std::vector<double> to_list(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    out.push_back(to_double(text.substr(pos, end - pos)));
    pos = end + 1;
  }
  return out;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
  return s;
}

std::vector<double> range_values(std::string_view text) {
  text = trim(text);
  if (text.find(':') == std::string_view::npos) return to_list(text);
  const std::size_t c1 = text.find(':'), c2 = text.find(':', c1 + 1);
  if (c2 == std::string_view::npos) throw std::invalid_argument("range needs lo:hi:count");
  const double lo = to_double(text.substr(0, c1));
  const double hi = to_double(text.substr(c1 + 1, c2 - c1 - 1));
  const long n = to_long(text.substr(c2 + 1));
  if (n < 0) throw std::invalid_argument("negative count");
  std::vector<double> out;
  for (long i = 0; i < n; ++i)
    out.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  return out;
}

}  // namespace

std::vector<double> parse_range(std::string_view text) {
  try {
    return range_values(text);
  } catch (const std::invalid_argument& e) {
    throw Error(ErrorKind::ParseError, "range '" + std::string(trim(text)) + "': " + e.what());
  }
}

RunConfig RunConfig::parse(std::istream& is, const std::string& source) {
  RunConfig cfg;
  cfg.source = source;
  bool beta_given = false;
  std::optional<double> low;

  using Setter = std::function<void(RunConfig&, std::string_view)>;
  auto d = [](double RunConfig::*field) -> Setter {
    return [field](RunConfig& c, std::string_view v) { c.*field = to_double(v); };
  };
  auto p = [](double ModelParams::*field) -> Setter {
    return [field](RunConfig& c, std::string_view v) { c.params.*field = to_double(v); };
  };
  auto opt = [](std::optional<double> RunConfig::*field) -> Setter {
    return [field](RunConfig& c, std::string_view v) { c.*field = to_double(v); };
  };
  auto i = [](int RunConfig::*field) -> Setter {
    return [field](RunConfig& c, std::string_view v) { c.*field = static_cast<int>(to_long(v)); };
  };
  const std::map<std::string, Setter, std::less<>> setters = {
      {"g", p(&ModelParams::g)},
      {"a", p(&ModelParams::a)},
      {"n0", p(&ModelParams::n0)},
      {"n1", p(&ModelParams::n1)},
      {"alpha", p(&ModelParams::alpha)},
      {"beta", p(&ModelParams::beta)},
      {"low", [&](RunConfig&, std::string_view v) { low = to_double(v); }},
      {"pbar0", opt(&RunConfig::pbar0)},
      {"pbar0_fraction", d(&RunConfig::pbar0_fraction)},
      {"p0", opt(&RunConfig::p0)},
      {"mu_bar", opt(&RunConfig::mu_bar)},
      {"tol", [](RunConfig& c, std::string_view v) {
         c.tol.rel = to_double(v);
         c.tol.abs = 1e-2 * c.tol.rel;
       }},
      {"tol_rel", [](RunConfig& c, std::string_view v) { c.tol.rel = to_double(v); }},
      {"tol_abs", [](RunConfig& c, std::string_view v) { c.tol.abs = to_double(v); }},
      {"paths", i(&RunConfig::paths)},
      {"refine_tol", d(&RunConfig::refine_tol)},
      {"p_symbols", i(&RunConfig::p_symbols)},
      {"threads", [](RunConfig& c, std::string_view v) { c.threads = static_cast<unsigned>(to_long(v)); }},
      {"seed", [](RunConfig& c, std::string_view v) { c.seed = static_cast<std::uint64_t>(to_long(v)); }},
      {"out", [](RunConfig& c, std::string_view v) { c.out = std::string(v); }},
      {"x0", d(&RunConfig::x0)},
      {"y0", d(&RunConfig::y0)},
      {"periods", i(&RunConfig::periods)},
      {"mu", opt(&RunConfig::mu)},
      {"levels", [](RunConfig& c, std::string_view v) { c.levels = to_list(v); }},
      {"through", [](RunConfig& c, std::string_view v) { c.through = to_list(v); }},
      {"queries", [](RunConfig& c, std::string_view v) { c.queries = to_list(v); }},
      {"random_queries", i(&RunConfig::random_queries)},
      {"periodic_tol", d(&RunConfig::periodic_tol)},
      {"search_grid", i(&RunConfig::search_grid)},
  };
  const std::set<std::string, std::less<>> scan_keys = {"n0", "n1", "alpha", "beta", "low", "p_symbols"};

  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string_view sv = line;
    if (const auto hash = sv.find('#'); hash != std::string_view::npos) sv = sv.substr(0, hash);
    sv = trim(sv);
    if (sv.empty()) continue;
    auto fail = [&](const std::string& key, const std::string& msg) {
      std::ostringstream os;
      os << source << ":" << lineno;
      if (!key.empty()) os << ": key '" << key << "'";
      os << ": " << msg;
      throw Error(ErrorKind::ParseError, os.str());
    };
    const auto eq = sv.find('=');
    if (eq == std::string_view::npos) fail("", "expected 'key = value'");
    const std::string key(trim(sv.substr(0, eq)));
    const std::string_view value = trim(sv.substr(eq + 1));
    if (key.empty()) fail("", "empty key");
    if (value.empty()) fail(key, "empty value");
    if (cfg.given.count(key)) fail(key, "duplicate key");
    try {
      if (key.rfind("scan.", 0) == 0) {
        const std::string name = key.substr(5);
        if (!scan_keys.count(name)) fail(key, "cannot scan '" + name + "'");
        cfg.scan[name] = range_values(value);
      } else {
        const auto it = setters.find(key);
        if (it == setters.end()) fail(key, "unknown key");
        it->second(cfg, value);
        if (key == "beta") beta_given = true;
      }
    } catch (const std::invalid_argument& e) {
      fail(key, e.what());
    }
    cfg.given.insert(key);
  }
  if (low) {
    if (beta_given) throw Error(ErrorKind::ParseError, source + ": keys 'beta' and 'low' are exclusive");
    cfg.params.beta = cfg.params.alpha + *low;
  }
  return cfg;
}

RunConfig RunConfig::parse_string(std::string_view text, const std::string& source) {
  std::istringstream is{std::string(text)};
  return parse(is, source);
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::ParseError, "cannot open config '" + path + "'");
  return parse(f, path);
}

void RunConfig::require(std::initializer_list<std::string_view> keys) const {
  for (std::string_view k : keys) {
    if (k == "beta" && has("low")) continue;
    if (!has(k)) throw Error(ErrorKind::ParseError, source + ": missing config key " + std::string(k));
  }
}

double RunConfig::resolved_pbar0() const {
  if (pbar0) return *pbar0;
  return pbar0_fraction * horseshoe::p_star(params, mu_bar);
}

double RunConfig::resolved_p0(double pb) const {
  if (p0) return *p0;
  return horseshoe::default_p0(params, pb, mu_bar);
}

horseshoe::StretchOptions RunConfig::stretch() const {
  horseshoe::StretchOptions s;
  s.paths = paths;
  s.refine_tol = refine_tol;
  s.p_symbols = p_symbols;
  s.tol = tol;
  s.threads = threads;
  return s;
}

horseshoe::CertifyOptions RunConfig::certify() const {
  horseshoe::CertifyOptions c;
  c.stretch = stretch();
  c.mu_bar = mu_bar;
  return c;
}

symbolic::SearchOptions RunConfig::search() const {
  symbolic::SearchOptions s;
  s.tol = periodic_tol;
  s.grid = search_grid;
  s.max_grid = std::max(search_grid, 512);
  s.stretch = stretch();
  return s;
}

void RunConfig::write(std::ostream& os, std::string_view prefix) const {
  auto kv = [&](std::string_view k, const std::string& v) { os << prefix << k << " = " << v << "\n"; };
  kv("source", source);
  kv("g", num(params.g));
  kv("a", num(params.a));
  kv("n0", num(params.n0));
  kv("n1", num(params.n1));
  kv("alpha", num(params.alpha));
  kv("beta", num(params.beta));
  if (pbar0) {
    kv("pbar0", num(*pbar0));
  } else {
    kv("pbar0_fraction", num(pbar0_fraction));
  }
  kv("p0", p0 ? num(*p0) : std::string("default"));
  kv("mu_bar", mu_bar ? num(*mu_bar) : std::string("default"));
  kv("tol_rel", num(tol.rel));
  kv("tol_abs", num(tol.abs));
  kv("paths", std::to_string(paths));
  kv("refine_tol", num(refine_tol));
  kv("p_symbols", std::to_string(p_symbols));
  kv("threads", std::to_string(threads));
  kv("seed", std::to_string(seed));
  kv("out", out);
  kv("x0", num(x0));
  kv("y0", num(y0));
  kv("periods", std::to_string(periods));
  if (mu) kv("mu", num(*mu));
  if (!levels.empty()) kv("levels", list(levels));
  if (!through.empty()) kv("through", list(through));
  if (!queries.empty()) kv("queries", list(queries));
  kv("random_queries", std::to_string(random_queries));
  kv("periodic_tol", num(periodic_tol));
  kv("search_grid", std::to_string(search_grid));
  for (const auto& [name, values] : scan) kv("scan." + name, list(values));
}

}  // namespace nagumo
