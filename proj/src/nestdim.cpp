#include "hedgedim/nestdim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "hedgedim/error.hpp"

namespace hedgedim {

namespace {

// Neumaier summation
struct Sum {
  double s = 0, c = 0;
  void add(double v) {
    double t = s + v;
    if (std::fabs(s) >= std::fabs(v))
      c += (s - t) + v;
    else
      c += (v - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

// children[n][j]: indices in generation n+1 of the children of box j of generation n
using ChildIndex = std::vector<std::vector<std::vector<int>>>;

int find_parent(const Generation& parents, const Generation& kids, size_t i) {
  const Box& b = kids.boxes[i];
  if (i < kids.parent.size()) {
    int p = kids.parent[i];
    if (p >= 0 && p < static_cast<int>(parents.count()) && parents.boxes[p].contains(b)) return p;
  }
  for (size_t j = 0; j < parents.count(); ++j)
    if (parents.boxes[j].contains(b)) return static_cast<int>(j);
  return -1;
}

ChildIndex build_children(const NestedFamily& f) {
  ChildIndex out;
  for (size_t n = 0; n + 1 < f.generations.size(); ++n) {
    const Generation& par = f.generations[n];
    const Generation& kid = f.generations[n + 1];
    std::vector<std::vector<int>> ch(par.count());
    for (size_t i = 0; i < kid.count(); ++i) {
      int p = find_parent(par, kid, i);
      if (p < 0)
        throw Error(ErrorKind::InvalidArgument,
                    "box " + std::to_string(i) + " of generation " + std::to_string(n + 1) + " has no parent",
                    static_cast<long>(n + 1));
      ch[p].push_back(static_cast<int>(i));
    }
    out.push_back(std::move(ch));
  }
  return out;
}

// first pair of siblings with positive overlap, by a sweep over x
std::pair<int, int> first_overlap(const std::vector<Box>& boxes) {
  std::vector<int> order(boxes.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return boxes[a].x != boxes[b].x ? boxes[a].x < boxes[b].x : boxes[a].y < boxes[b].y;
  });
  for (size_t k = 0; k < order.size(); ++k) {
    const Box& a = boxes[order[k]];
    for (size_t m = k + 1; m < order.size(); ++m) {
      const Box& b = boxes[order[m]];
      if (b.x >= a.x + a.side) break;
      if (intersection_area(a, b) > 0) return {std::min(order[k], order[m]), std::max(order[k], order[m])};
    }
  }
  return {-1, -1};
}

struct Grid {
  std::uint64_t n = 1;  // cells per side
  double scale = 1;
  std::vector<std::uint64_t> keys;  // sorted, i * n + j
};

Grid occupied(const std::vector<Point>& pts, const Box& root, double scale, bool exact_division) {
  Grid g;
  g.scale = scale;
  double ratio = root.side / scale;
  g.n = static_cast<std::uint64_t>(exact_division ? std::llround(ratio) : std::ceil(ratio * (1 - 1e-12)));
  g.keys.reserve(pts.size());
  for (const Point& p : pts) {
    if (!root.contains_point(p.first, p.second)) continue;
    auto cell = [&](double v, double lo) {
      double t = (v - lo) / root.side * static_cast<double>(g.n);
      std::uint64_t i = static_cast<std::uint64_t>(std::floor(t));
      return std::min(i, g.n - 1);
    };
    g.keys.push_back(cell(p.first, root.x) * g.n + cell(p.second, root.y));
  }
  std::sort(g.keys.begin(), g.keys.end());
  g.keys.erase(std::unique(g.keys.begin(), g.keys.end()), g.keys.end());
  return g;
}

}  // namespace

double Box::diameter() const { return std::sqrt(2.0) * side; }

bool Box::contains(const Box& b) const {
  return b.x >= x && b.y >= y && b.x + b.side <= x + side && b.y + b.side <= y + side;
}

bool Box::contains_point(double px, double py) const {
  if (half_open) return px >= x && py >= y && px < x + side && py < y + side;
  return px >= x && py >= y && px <= x + side && py <= y + side;
}

bool Box::meets_disk(double cx, double cy, double r) const {
  double dx = std::max({x - cx, 0.0, cx - (x + side)});
  double dy = std::max({y - cy, 0.0, cy - (y + side)});
  return dx * dx + dy * dy <= r * r;
}

bool Box::inside_disk(double cx, double cy, double r) const {
  double dx = std::max(std::fabs(x - cx), std::fabs(x + side - cx));
  double dy = std::max(std::fabs(y - cy), std::fabs(y + side - cy));
  return dx * dx + dy * dy <= r * r;
}

double intersection_area(const Box& a, const Box& b) {
  double w = std::min(a.x + a.side, b.x + b.side) - std::max(a.x, b.x);
  double h = std::min(a.y + a.side, b.y + b.side) - std::max(a.y, b.y);
  if (w <= 0 || h <= 0) return 0;
  return w * h;
}

double density(const std::vector<Box>& K, const Box& omega) {
  if (!(omega.side > 0)) throw Error(ErrorKind::InvalidArgument, "density needs a box of positive area");
  Sum s;
  for (const Box& k : K) s.add(intersection_area(k, omega));
  return s.value() / omega.area();
}

NestingReport validate_nesting(const NestedFamily& f) {
  NestingReport r;
  auto fail = [&](int cond, int gen, int box, std::string msg) {
    r.ok = false;
    r.condition = cond;
    r.generation = gen;
    r.box = box;
    r.message = std::move(msg);
    return r;
  };
  if (f.generations.empty() || f.generations[0].count() != 1) return fail(1, 0, -1, "generation 0 must be a single box");
  for (size_t n = 0; n < f.generations.size(); ++n)
    for (size_t i = 0; i < f.generations[n].count(); ++i)
      if (!(f.generations[n].boxes[i].side > 0)) return fail(1, n, i, "box with non-positive side");

  std::vector<std::vector<std::vector<int>>> children;
  for (size_t n = 0; n + 1 < f.generations.size(); ++n) {
    const Generation& par = f.generations[n];
    const Generation& kid = f.generations[n + 1];
    std::vector<std::vector<int>> ch(par.count());
    for (size_t i = 0; i < kid.count(); ++i) {
      int p = find_parent(par, kid, i);
      if (p < 0) return fail(2, n + 1, i, "child not contained in any parent");
      ch[p].push_back(static_cast<int>(i));
    }
    for (size_t j = 0; j < ch.size(); ++j)
      if (ch[j].empty()) return fail(3, n, j, "parent without children");
    children.push_back(std::move(ch));
  }
  for (size_t n = 0; n < f.generations.size(); ++n) {
    auto [a, b] = first_overlap(f.generations[n].boxes);
    if (a >= 0) return fail(4, n, b, "boxes " + std::to_string(a) + " and " + std::to_string(b) + " overlap");
  }

  if (f.dia.size() < f.generations.size() || f.delta.size() != f.dia.size())
    return fail(6, -1, -1, "declared delta/dia shorter than the family");
  for (size_t n = 0; n < f.generations.size(); ++n) {
    double dmax = 0;
    for (const Box& b : f.generations[n].boxes) dmax = std::max(dmax, b.diameter());
    if (f.dia[n] < dmax * (1 - 1e-14)) return fail(6, n, -1, "declared diameter below the actual maximum");
  }
  for (size_t n = 0; n + 1 < f.dia.size(); ++n)
    if (!(f.dia[n + 1] < f.dia[n])) return fail(6, n + 1, -1, "declared diameters not decreasing");
  for (size_t k = 1; k < f.generations.size(); ++k) {
    const Generation& par = f.generations[k - 1];
    const Generation& kid = f.generations[k];
    for (size_t j = 0; j < par.count(); ++j) {
      std::vector<Box> ks;
      for (int i : children[k - 1][j]) ks.push_back(kid.boxes[i]);
      if (f.delta[k] > density(ks, par.boxes[j]) + 1e-14) return fail(5, k, j, "declared delta exceeds a parent's density");
    }
  }
  return r;
}

DimensionBound mcmullen_bound(const NestedFamily& f, int window, bool mcmullen_indexing) {
  if (window < 1) throw Error(ErrorKind::InvalidArgument, "window must be at least 1");
  const int N = f.declared_depth();
  if (static_cast<int>(f.delta.size()) < N) throw Error(ErrorKind::InvalidArgument, "delta shorter than dia");
  const int last = mcmullen_indexing ? N - 1 : N - 2;
  DimensionBound out;
  out.window = window;
  out.mcmullen_indexing = mcmullen_indexing;
  Sum num;
  int top = mcmullen_indexing ? 0 : 1;  // highest k summed so far
  if (!mcmullen_indexing && N >= 2) {
    if (!(f.delta[1] > 0)) throw Error(ErrorKind::InvalidArgument, "delta must be positive", 1);
    num.add(std::fabs(std::log(f.delta[1])));
  }
  out.first_n = -1;
  for (int n = 0; n <= last; ++n) {
    int need = mcmullen_indexing ? n : n + 1;
    while (top < need) {
      ++top;
      if (!(f.delta[top] > 0)) throw Error(ErrorKind::InvalidArgument, "delta must be positive", top);
      num.add(std::fabs(std::log(f.delta[top])));
    }
    if (f.dia[n] >= 1) {
      if (n > 0) throw Error(ErrorKind::DegenerateDiameter, "d_n >= 1 past generation 0", n);
      continue;
    }
    if (out.first_n < 0) out.first_n = n;
    out.quotient_tail.push_back(num.value() / std::fabs(std::log(f.dia[n])));
  }
  if (out.quotient_tail.empty()) throw Error(ErrorKind::InvalidArgument, "no generation with d_n < 1");
  size_t w = std::min<size_t>(window, out.quotient_tail.size());
  double sup = *std::max_element(out.quotient_tail.end() - w, out.quotient_tail.end());
  out.raw = 2 - sup;
  out.value = std::clamp(out.raw, 0.0, 2.0);
  return out;
}

MartingaleMeasure martingale_measure(const NestedFamily& f) {
  if (f.generations.empty()) throw Error(ErrorKind::EmptyInput, "empty family");
  ChildIndex ch = build_children(f);
  MartingaleMeasure m;
  m.mass.push_back({1.0});
  for (size_t n = 0; n < ch.size(); ++n) {
    const Generation& kid = f.generations[n + 1];
    std::vector<double> next(kid.count(), 0.0);
    for (size_t j = 0; j < ch[n].size(); ++j) {
      if (ch[n][j].empty())
        throw Error(ErrorKind::ChildlessParent,
                    "box " + std::to_string(j) + " of generation " + std::to_string(n) + " has no children",
                    static_cast<long>(n));
      Sum area;
      for (int i : ch[n][j]) area.add(kid.boxes[i].area());
      double total = area.value();
      Sum check;
      for (int i : ch[n][j]) {
        next[i] = m.mass[n][j] * (kid.boxes[i].area() / total);
        check.add(next[i]);
      }
      m.max_conservation_error = std::max(m.max_conservation_error, std::fabs(check.value() - m.mass[n][j]));
    }
    m.mass.push_back(std::move(next));
  }
  return m;
}

FrostmanReport frostman_check(const MartingaleMeasure& measure, const NestedFamily& f, double s, int samples,
                              std::uint64_t seed) {
  ChildIndex ch = build_children(f);
  const int deepest = static_cast<int>(f.generations.size()) - 1;
  const Box& root = f.generations[0].boxes[0];
  FrostmanReport rep;
  rep.s = s;
  rep.samples = samples;
  rep.r_max = f.dia[0];
  rep.r_min = f.dia[deepest];

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(root.x, root.x + root.side), uy(root.y, root.y + root.side);
  std::uniform_real_distribution<double> ulr(std::log(rep.r_min), std::log(rep.r_max));

  std::vector<std::pair<int, int>> stack;
  for (int k = 0; k < samples; ++k) {
    double cx = ux(rng), cy = uy(rng), r = std::exp(ulr(rng));
    Sum mu;
    stack.assign(1, {0, 0});
    while (!stack.empty()) {
      auto [n, j] = stack.back();
      stack.pop_back();
      const Box& b = f.generations[n].boxes[j];
      if (!b.meets_disk(cx, cy, r)) continue;
      if (n == deepest || b.inside_disk(cx, cy, r)) {
        mu.add(measure.mass[n][j]);
        continue;
      }
      for (int i : ch[n][j]) stack.push_back({n + 1, i});
    }
    double ratio = mu.value() / std::pow(r, s);
    if (ratio > rep.max_ratio) {
      rep.max_ratio = ratio;
      rep.at_x = cx;
      rep.at_y = cy;
      rep.at_r = r;
    }
  }
  return rep;
}

NestedFamily extract_nest(const std::vector<Point>& points, const std::vector<double>& scales, const Box& root) {
  if (points.empty()) throw Error(ErrorKind::EmptyInput, "no points");
  NestedFamily f;
  Generation g0;
  g0.boxes.push_back(root);
  f.generations.push_back(g0);
  f.delta.push_back(1.0);
  f.dia.push_back(root.diameter());

  Grid prev;
  prev.n = 1;
  prev.scale = root.side;
  prev.keys = {0};
  for (double s : scales) {
    if (!(s > 0)) throw Error(ErrorKind::InvalidArgument, "scales must be positive");
    if (s == prev.scale && f.generations.size() == 1) continue;
    double factor = prev.scale / s;
    if (factor < 1.5 || std::fabs(factor - std::round(factor)) > 1e-9 * factor)
      throw Error(ErrorKind::InvalidArgument, "each scale must divide the previous by an integer factor");
    std::uint64_t fac = static_cast<std::uint64_t>(std::llround(factor));
    Grid g = occupied(points, root, s, true);
    if (g.keys.empty()) throw Error(ErrorKind::EmptyInput, "no points inside the root box");

    Generation gen;
    gen.index = static_cast<int>(f.generations.size());
    std::vector<int> per_parent(prev.keys.size(), 0);
    for (std::uint64_t key : g.keys) {
      std::uint64_t i = key / g.n, j = key % g.n;
      gen.boxes.push_back({root.x + static_cast<double>(i) * s, root.y + static_cast<double>(j) * s, s, true});
      std::uint64_t pk = (i / fac) * prev.n + (j / fac);
      auto it = std::lower_bound(prev.keys.begin(), prev.keys.end(), pk);
      int p = static_cast<int>(it - prev.keys.begin());
      gen.parent.push_back(p);
      ++per_parent[p];
    }
    int fewest = *std::min_element(per_parent.begin(), per_parent.end());
    f.delta.push_back(static_cast<double>(fewest) / static_cast<double>(fac * fac));
    f.dia.push_back(std::sqrt(2.0) * s);
    f.generations.push_back(std::move(gen));
    prev = std::move(g);
  }
  return f;
}

Box dyadic_bounding_square(const std::vector<Point>& points) {
  if (points.empty()) throw Error(ErrorKind::EmptyInput, "no points");
  double x0 = points[0].first, x1 = x0, y0 = points[0].second, y1 = y0;
  for (const auto& [x, y] : points) {
    if (!std::isfinite(x) || !std::isfinite(y)) throw Error(ErrorKind::InvalidArgument, "non-finite point");
    x0 = std::min(x0, x), x1 = std::max(x1, x);
    y0 = std::min(y0, y), y1 = std::max(y1, y);
  }
  double extent = std::max(x1 - x0, y1 - y0);
  double side = std::exp2(std::ceil(std::log2(extent > 0 ? extent : 1.0)));
  for (;; side *= 2) {
    double step = side / 8;
    double x = std::floor(x0 / step) * step, y = std::floor(y0 / step) * step;
    if (x1 < x + side && y1 < y + side) return Box{x, y, side, true};
  }
}

BoxCountEstimate box_count_dimension(const std::vector<Point>& points, const std::vector<double>& scales,
                                     const Box& root) {
  if (scales.size() < 2) throw Error(ErrorKind::FewerThanTwoScales, "box counting needs at least two scales");
  if (points.empty()) throw Error(ErrorKind::EmptyInput, "no points");
  BoxCountEstimate e;
  e.scales = scales;
  std::vector<double> xs, ys;
  for (double s : scales) {
    if (!(s > 0)) throw Error(ErrorKind::InvalidArgument, "scales must be positive");
    Grid g = occupied(points, root, s, false);
    if (g.keys.empty()) throw Error(ErrorKind::EmptyInput, "no points inside the root box");
    e.counts.push_back(g.keys.size());
    xs.push_back(std::log(1.0 / s));
    ys.push_back(std::log(static_cast<double>(g.keys.size())));
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0) throw Error(ErrorKind::FewerThanTwoScales, "scales must be distinct");
  e.slope = sxy / sxx;
  e.intercept = my - e.slope * mx;
  e.r2 = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return e;
}

NestedFamily corner_family(int generations, int materialize, double side) {
  if (generations < 0 || materialize < 0) throw Error(ErrorKind::InvalidArgument, "negative depth");
  materialize = std::min(materialize, generations);
  NestedFamily f;
  Generation g0;
  g0.boxes.push_back({0, 0, side, true});
  f.generations.push_back(g0);
  for (int n = 1; n <= materialize; ++n) {
    const Generation& p = f.generations.back();
    Generation g;
    g.index = n;
    for (size_t j = 0; j < p.count(); ++j) {
      const Box& b = p.boxes[j];
      double c = b.side / 4, off = 3 * c;
      for (int q = 0; q < 4; ++q) {
        g.boxes.push_back({b.x + (q & 1 ? off : 0), b.y + (q & 2 ? off : 0), c, true});
        g.parent.push_back(static_cast<int>(j));
      }
    }
    f.generations.push_back(std::move(g));
  }
  for (int n = 0; n <= generations; ++n) {
    f.delta.push_back(n == 0 ? 1.0 : 0.25);
    f.dia.push_back(std::sqrt(2.0) * side * std::pow(4.0, -n));
  }
  return f;
}

NestedFamily rescale(const NestedFamily& family, double lambda) {
  NestedFamily f = family;
  for (Generation& g : f.generations)
    for (Box& b : g.boxes) {
      b.x *= lambda;
      b.y *= lambda;
      b.side *= lambda;
    }
  for (double& d : f.dia) d *= lambda;
  return f;
}

std::vector<Point> corner_points(int depth) {
  NestedFamily f = corner_family(depth, depth);
  std::vector<Point> pts;
  for (const Box& b : f.generations.back().boxes) pts.push_back({b.x + b.side / 2, b.y + b.side / 2});
  return pts;
}

nlohmann::json family_to_json(const NestedFamily& f) {
  nlohmann::json gens = nlohmann::json::array();
  for (const Generation& g : f.generations) {
    nlohmann::json boxes = nlohmann::json::array();
    for (const Box& b : g.boxes) boxes.push_back({b.x, b.y, b.side});
    nlohmann::json e{{"index", g.index}, {"count", g.count()}, {"boxes", boxes}};
    if (!g.parent.empty()) e["parent"] = g.parent;
    gens.push_back(e);
  }
  return {{"generations", gens}, {"delta", f.delta}, {"dia", f.dia}};
}

std::string family_to_csv(const NestedFamily& f) {
  std::ostringstream os;
  os.precision(17);
  os << "gen,idx,x,y,side,parent_idx\n";
  for (size_t n = 0; n < f.generations.size(); ++n) {
    const Generation& g = f.generations[n];
    for (size_t i = 0; i < g.count(); ++i) {
      const Box& b = g.boxes[i];
      int p = i < g.parent.size() ? g.parent[i] : -1;
      os << n << ',' << i << ',' << b.x << ',' << b.y << ',' << b.side << ',' << p << '\n';
    }
  }
  return os.str();
}

nlohmann::json to_json(const DimensionBound& b) {
  return {{"value", b.value},
          {"raw", b.raw},
          {"window", b.window},
          {"first_n", b.first_n},
          {"indexing", b.mcmullen_indexing ? "k=1..n" : "k=1..n+1"},
          {"quotient_tail", b.quotient_tail}};
}

nlohmann::json to_json(const BoxCountEstimate& e) {
  nlohmann::json rows = nlohmann::json::array();
  for (size_t i = 0; i < e.scales.size(); ++i)
    rows.push_back({{"scale", e.scales[i]},
                    {"count", e.counts[i]},
                    {"log_inv_scale", std::log(1.0 / e.scales[i])},
                    {"log_count", std::log(static_cast<double>(e.counts[i]))}});
  return {{"slope", e.slope}, {"intercept", e.intercept}, {"r2", e.r2}, {"per_scale", rows}};
}

std::vector<Point> read_points_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path);
  std::vector<Point> pts;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double re, im;
    if (!(ls >> re >> im)) {
      if (pts.empty() && lineno == 1) continue;  // header
      throw Error(ErrorKind::Parse, path + ": bad row", lineno);
    }
    pts.push_back({re, im});
  }
  return pts;
}

}  // namespace hedgedim
