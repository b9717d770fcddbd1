#include "nagumo/figures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "nagumo/error.hpp"
#include "nagumo/horseshoe.hpp"
#include "nagumo/timemaps.hpp"

namespace nagumo::figures {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Connected pieces of a level line, each an upper-then-lower polyline.
std::vector<std::vector<PhaseState>> trace_level(const Model& model, double mu, double level,
                                                 int resolution) {
  const int n = std::max(3, resolution);
  auto radicand = [&](double x) { return 2.0 * (level - model.energy(mu, x, 0.0)); };
  auto turning = [&](double in, double out) {
    // radicand(in) ≥ 0 > radicand(out)
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (in + out);
      (radicand(mid) >= 0.0 ? in : out) = mid;
    }
    return in;
  };
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = static_cast<double>(i) / (n - 1);

  std::vector<std::vector<PhaseState>> pieces;
  std::size_t i = 0;
  while (i < xs.size()) {
    if (radicand(xs[i]) < 0.0) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < xs.size() && radicand(xs[j + 1]) >= 0.0) ++j;
    std::vector<std::pair<double, bool>> pts;  // (x, is turning point)
    if (i > 0) pts.emplace_back(turning(xs[i], xs[i - 1]), true);
    for (std::size_t k = i; k <= j; ++k) pts.emplace_back(xs[k], false);
    if (j + 1 < xs.size()) pts.emplace_back(turning(xs[j], xs[j + 1]), true);

    std::vector<PhaseState> piece;
    for (const auto& [x, tp] : pts) piece.push_back({x, tp ? 0.0 : std::sqrt(std::max(0.0, radicand(x)))});
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
      if (it->second && it != pts.rbegin()) {
        piece.push_back({it->first, 0.0});
      } else if (!it->second) {
        piece.push_back({it->first, -std::sqrt(std::max(0.0, radicand(it->first)))});
      }
    }
    pieces.push_back(std::move(piece));
    i = j + 1;
  }
  return pieces;
}

void add_curve(Table& t, const std::string& label, const std::vector<PhaseState>& pts) {
  for (const PhaseState& z : pts) t.add({z.x, z.y}, label);
}

void add_level(Table& t, const std::string& label, const Model& model, double mu, double level,
               int resolution) {
  for (const auto& piece : trace_level(model, mu, level, resolution)) add_curve(t, label, piece);
}

Table figure1(const FigureParams& fp) {
  const Model m(fp.g, Nonlinearity::cubic(fp.a));
  Table t;
  t.columns = {"s", "curve_n0", "curve_n1"};
  const int n = std::max(3, fp.resolution);
  double n0_max = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / (n - 1);
    const double y0 = -fp.g * s + fp.n0 * m.F().F(s);
    const double y1 = -fp.g * s + fp.n1 * m.F().F(s);
    if (i > 0) n0_max = std::max(n0_max, y0);
    t.add({s, y0, y1});
  }
  t.note("m0star", m.m0star());
  t.note("n0_curve_max_on_(0,1]", n0_max);
  t.note("n0_curve_negative", n0_max < 0.0 ? "true" : "false");
  if (fp.n1 > m.m0star()) {
    const auto [lo, hi] = m.equilibria(fp.n1);
    t.note("n1_zero_lo", lo);
    t.note("n1_zero_hi", hi);
  } else {
    t.note("n1_zeros", "none");
  }
  return t;
}

Table figure2(const FigureParams& fp) {
  const Model m(fp.g, Nonlinearity::cubic(fp.a));
  Table t;
  for (double mu : {fp.n1, fp.n0}) {
    std::vector<double> levels{0.0};
    for (int k = 1; k <= 9; ++k) levels.push_back(m.energy(mu, 0.1 * k, 0.0));
    for (double level : levels) append_level_set(t, m, mu, level, fp.resolution);
  }
  t.note("mu_high", fp.n1);
  t.note("mu_low", fp.n0);
  t.note("ladder", "level 0 and the levels through (p, 0), p = 0.1, 0.2, ..., 0.9");
  t.note("m0star", m.m0star());
  t.note("m1star", m.m1star());
  if (fp.n1 > m.m1star()) {
    t.note("center_high", m.equilibria(fp.n1).first);
    t.note("b_mu_high", m.b_mu(fp.n1));
  }
  return t;
}

Table figure3(const FigureParams& fp) {
  const Model m(fp.g, Nonlinearity::cubic(fp.a));
  const double c = m.energy(fp.n1, fp.pbar0, 0.0);
  const double an1 = m.equilibria(fp.n1).first;
  const double center = m.energy(fp.n1, an1, 0.0);
  const double plus = m.x_plus(fp.pbar0);

  Table t;
  t.label_column = "curve";
  t.columns = {"x", "y"};
  add_level(t, "M1c_inner", m, fp.n1, c, fp.resolution);
  add_level(t, "M1c_outer", m, fp.n1, 0.0, fp.resolution);

  // N_c = M¹_c ∩ {x ≥ a_n1, y ≥ 0}: vertical side, outer arc, axis, inner arc.
  auto y_at = [&](double level, double x) {
    return std::sqrt(std::max(0.0, 2.0 * (level - m.energy(fp.n1, x, 0.0))));
  };
  std::vector<PhaseState> nc;
  const int n = std::max(3, fp.resolution / 4);
  const double b = m.b_mu(fp.n1);
  for (int i = 0; i < n; ++i) nc.push_back({an1, y_at(c, an1) + (y_at(0.0, an1) - y_at(c, an1)) * i / (n - 1)});
  for (int i = 1; i < n; ++i) {
    const double x = an1 + (b - an1) * i / (n - 1);
    nc.push_back({x, y_at(0.0, x)});
  }
  for (int i = 1; i < n; ++i) nc.push_back({b + (plus - b) * i / (n - 1), 0.0});
  for (int i = 1; i < n; ++i) {
    const double x = plus + (an1 - plus) * i / (n - 1);
    nc.push_back({x, y_at(c, x)});
  }
  add_curve(t, "Nc_boundary", nc);

  // A vertical crossing path of N_c from the inner to the outer boundary.
  const double xp = 0.5 * (an1 + plus);
  std::vector<PhaseState> path;
  for (int i = 0; i < n; ++i) path.push_back({xp, y_at(c, xp) + (y_at(0.0, xp) - y_at(c, xp)) * i / (n - 1)});
  add_curve(t, "crossing_path", path);

  t.note("c", c);
  t.note("a_n1", an1);
  t.note("E1_center", center);
  t.note("pbar0_plus", plus);
  t.note("b_n1", b);
  return t;
}

Table figure4(const FigureParams& fp) {
  const Model m(fp.g, Nonlinearity::cubic(fp.a));
  const double p1 = timemaps::p1_of_p0(m, fp.n1, fp.p0);
  const double hi = m.energy(fp.n0, fp.p0, 0.0), lo = m.energy(fp.n0, p1, 0.0);
  Table t;
  t.label_column = "line";
  t.columns = {"x", "y"};
  add_level(t, "E0_through_p0", m, fp.n0, hi, fp.resolution);
  add_level(t, "E0_through_p1", m, fp.n0, lo, fp.resolution);
  t.note("p0", fp.p0);
  t.note("p1", p1);
  t.note("e0_hi", hi);
  t.note("e0_lo", lo);
  return t;
}

Table figure5(const FigureParams& fp) {
  ModelParams mp;
  mp.g = fp.g;
  mp.a = fp.a;
  mp.n0 = fp.n0;
  mp.n1 = fp.n1;
  horseshoe::RegionOptions ro;
  ro.enforce_regime = false;
  const horseshoe::RegionSet r = horseshoe::build_regions(mp, fp.pbar0, fp.p0, ro);
  const int n = std::max(3, fp.resolution / 4);

  Table t;
  t.label_column = "curve";
  t.columns = {"x", "y"};
  double ymax = 0.0;
  auto arc = [&](const std::string& label, auto chart_at, bool upper) {
    std::vector<PhaseState> pts;
    for (int i = 0; i < n; ++i) {
      const PhaseState z = r.from_chart(chart_at(static_cast<double>(i) / (n - 1)), upper);
      ymax = std::max(ymax, std::abs(z.y));
      pts.push_back(z);
    }
    add_curve(t, label, pts);
  };
  for (bool upper : {true, false}) {
    const std::string R = upper ? "A_" : "B_";
    arc(R + "E1_eq_c", [&](double u) { return horseshoe::Chart{r.c, r.e0_lo + u * (r.e0_hi - r.e0_lo)}; }, upper);
    arc(R + "E1_eq_0", [&](double u) { return horseshoe::Chart{0.0, r.e0_lo + u * (r.e0_hi - r.e0_lo)}; }, upper);
    arc(R + "E0_eq_hi", [&](double u) { return horseshoe::Chart{r.c * (1.0 - u), r.e0_hi}; }, upper);
    arc(R + "E0_eq_lo", [&](double u) { return horseshoe::Chart{r.c * (1.0 - u), r.e0_lo}; }, upper);
  }
  const double yg = 1.2 * ymax;
  for (const auto& [label, x] : {std::pair<std::string, double>{"guide_x_eq_a", fp.a}, {"guide_x_eq_a_n1", r.a_n1}}) {
    add_curve(t, label, {{x, -yg}, {x, yg}});
  }
  t.note("c", r.c);
  t.note("a_n1", r.a_n1);
  t.note("p1", r.p1);
  t.note("pbar0_plus", r.pbar0_plus);
  t.note("inclusion_a_n1_le_pbar0_plus", r.a_n1 <= r.pbar0_plus ? "true" : "false");
  t.note("A_left_side", "E1_eq_c");
  t.note("A_right_side", "E1_eq_0");
  t.note("B_left_side", "E0_eq_hi");
  t.note("B_right_side", "E0_eq_lo");
  return t;
}

}  // namespace

void Table::add(std::vector<double> row, std::string label) {
  rows.push_back(std::move(row));
  if (!label_column.empty()) labels.push_back(std::move(label));
}

void Table::note(std::string key, double value) { meta.emplace_back(std::move(key), num(value)); }
void Table::note(std::string key, std::string value) { meta.emplace_back(std::move(key), std::move(value)); }

void Table::write_csv(std::ostream& os, std::string_view preamble) const {
  os << preamble;
  for (const auto& [k, v] : meta) os << "# " << k << " = " << v << "\n";
  bool first = true;
  if (!label_column.empty()) {
    os << label_column;
    first = false;
  }
  for (const auto& c : columns) {
    os << (first ? "" : ",") << c;
    first = false;
  }
  os << "\n";
  char buf[64];
  for (std::size_t i = 0; i < rows.size(); ++i) {
    first = true;
    if (!label_column.empty()) {
      os << labels[i];
      first = false;
    }
    for (double v : rows[i]) {
      std::snprintf(buf, sizeof buf, "%.17e", v);
      os << (first ? "" : ",") << buf;
      first = false;
    }
    os << "\n";
  }
}

void append_level_set(Table& table, const Model& model, double mu, double level, int resolution) {
  if (table.columns.empty()) table.columns = {"mu", "level", "component", "x", "y"};
  int comp = 0;
  for (const auto& piece : trace_level(model, mu, level, resolution)) {
    for (const PhaseState& z : piece) table.add({mu, level, static_cast<double>(comp), z.x, z.y});
    ++comp;
  }
}

Table level_sets(const Model& model, double mu, const std::vector<double>& levels, int resolution) {
  Table t;
  t.columns = {"mu", "level", "component", "x", "y"};
  for (double level : levels) append_level_set(t, model, mu, level, resolution);
  return t;
}

FigureParams figure_defaults(int k) {
  FigureParams fp;
  if (k == 1) {
    fp.g = 0.5;
    fp.n0 = 0.8;
    fp.n1 = 16.0;
  }
  return fp;
}

Table figure(int k, const FigureParams& fp) {
  switch (k) {
    case 1: return figure1(fp);
    case 2: return figure2(fp);
    case 3: return figure3(fp);
    case 4: return figure4(fp);
    case 5: return figure5(fp);
    default: throw Error(ErrorKind::InvalidArgument, "figure index must be 1..5");
  }
}

}  // namespace nagumo::figures
