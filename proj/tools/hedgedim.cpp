#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hedgedim/arithmetic.hpp"
#include "hedgedim/arithmetic_json.hpp"
#include "hedgedim/dynamics.hpp"
#include "hedgedim/error.hpp"
#include "hedgedim/nestdim.hpp"

using namespace hedgedim;
using json = nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

enum Exit { kOk = 0, kUsage = 1, kGate = 2, kUndetermined = 3 };

struct Globals {
  int precision = 0;  // 0: command default, possibly from HEDGEDIM_PRECISION
  int depth = 0;      // 0: command default
  std::uint64_t seed = 1;
  std::string format = "json";
  std::string out;
  int threads = 1;
  bool no_timestamp = false;
};

struct Output {
  json result;
  int code = kOk;
  std::string text;  // csv or binary payload, replaces the JSON envelope when set
};

int exit_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse:
    case ErrorKind::InvalidArgument:
    case ErrorKind::EmptyInput:
    case ErrorKind::FewerThanTwoScales:
      return kUsage;
    case ErrorKind::RationalTermination:
    case ErrorKind::DepthInsufficient:
    case ErrorKind::BrjunoUndetermined:
      return kUndetermined;
    default:
      return kGate;
  }
}

int env_precision() {
  const char* v = std::getenv("HEDGEDIM_PRECISION");
  if (!v || !*v) return 0;
  char* end = nullptr;
  long b = std::strtol(v, &end, 10);
  if (*end || b < 16 || b > 1 << 20) throw Error(ErrorKind::Parse, "HEDGEDIM_PRECISION must be an integer >= 16");
  return static_cast<int>(b);
}

int bits_for(const Globals& g, int fallback) {
  if (g.precision) return g.precision;
  if (int e = env_precision()) return e;
  return fallback;
}

int depth_for(const Globals& g, int fallback) { return g.depth > 0 ? g.depth : fallback; }

// the jagged and spiky generators reach tower-sized digits within a dozen levels
int number_depth(const Globals& g, const std::string& number) {
  bool towers = number == "jagged-example" || number == "spiky-example";
  return depth_for(g, towers ? 14 : 60);
}


std::string timestamp_utc() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json option_record(const CLI::App* app) {
  json o = json::object();
  for (const CLI::Option* opt : app->get_options()) {
    std::string name = opt->get_name(false, true);
    if (name.empty() || name == "--help" || name == "-h" || name == "--help-all") continue;
    while (!name.empty() && name[0] == '-') name.erase(0, 1);
    if (auto c = name.find(','); c != std::string::npos) name = name.substr(c + 1);
    while (!name.empty() && name[0] == '-') name.erase(0, 1);
    const auto& res = opt->results();
    if (opt->get_expected_max() > 1) {
      o[name] = res;
    } else if (!res.empty()) {
      o[name] = res.back();
    } else {
      o[name] = opt->get_default_str();
    }
  }
  return o;
}

// ------------------------------------------------------------------ inputs

struct NumberInput {
  DigitSequence seq;
  std::optional<Real> value;  // set for decimal literals
  std::string source;
};

NumberInput resolve_number(const std::string& s, int depth, long a0) {
  NumberInput n;
  n.source = s;
  if (s == "golden") {
    n.seq = golden_sequence(depth);
  } else if (s == "sqrt2") {
    n.seq = sqrt2_sequence(depth);
  } else if (s == "jagged-example") {
    n.seq = jagged_example(depth, a0);
  } else if (s == "spiky-example") {
    n.seq = spiky_example(depth, a0);
  } else if (s.rfind("constant:", 0) == 0) {
    long a = std::stol(s.substr(9));
    if (a < 2) throw Error(ErrorKind::Parse, "constant digit must be >= 2");
    n.seq = constant_sequence(a, 1, depth);
  } else if (s.rfind("digits:", 0) == 0) {
    std::string body = s.substr(7);
    if (!body.empty() && body[0] == '@') {
      std::ifstream in(body.substr(1));
      if (!in) throw Error(ErrorKind::Parse, "cannot open " + body.substr(1));
      std::stringstream ss;
      ss << in.rdbuf();
      body = ss.str();
    }
    try {
      n.seq = digits_from_json(json::parse(body));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::Parse, e.what());
    }
  } else {
    bool exact = false;
    Real x = Real::parse(s, &exact);
    n.value = x;
    n.seq = modified_cf(x, depth, exact);
  }
  return n;
}

// alpha and 1 - alpha give complex-conjugate maps; generated inputs are folded into (0, 1/2]
Real alpha_of(const NumberInput& n) {
  if (n.value) return *n.value;
  Real x = realize(n.seq, n.seq.depth()).value;
  x = x - floor(x);
  return x > Real(0.5) ? Real(1) - x : x;
}

using C = ComplexHP;

C parse_complex(const std::string& s) {
  auto c = s.find(',');
  if (c == std::string::npos) return C(Real::parse(s));
  return C(Real::parse(s.substr(0, c)), Real::parse(s.substr(c + 1)));
}

std::vector<Point> load_points(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path);
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() == 4 && std::string(magic, 4) == "HDOR") {
    in.seekg(0);
    HdorData d = read_hdor(in);
    std::vector<Point> pts;
    pts.reserve(d.points.size());
    for (const auto& p : d.points) pts.push_back({p.re, p.im});
    return pts;
  }
  return read_points_csv(path);
}

Box parse_root(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
  if (v.size() != 3 || !(v[2] > 0)) throw Error(ErrorKind::Parse, "--root expects x,y,side");
  return Box{v[0], v[1], v[2], true};
}

// ------------------------------------------------------------------ arithmetic commands

struct NumberOpts {
  std::string number = "golden";
  long a0 = 3;
};

struct ClassifyOpts {
  NumberOpts num;
  long N = 3;
  int levels = 4;
  int p_max = 6;
  int brjuno_depth = 40;
  int check_depth = 4;
  double tol = 1e-9;
};

json error_json(const Error& e) {
  json j{{"kind", kind_name(e.kind())}, {"message", e.what()}};
  if (e.index() >= 0) j["index"] = e.index();
  return j;
}

// herman_test reads tails up to levels - 1 + p_max + brjuno_depth
std::pair<int, int> herman_budget(const DigitSequence& s, int levels, int p_max, int brjuno_depth) {
  int hb = std::min(brjuno_depth, s.depth() - levels + 1 - p_max);
  while (hb < 1 && levels > 1) hb = std::min(brjuno_depth, s.depth() - --levels + 1 - p_max);
  return {levels, std::max(hb, 1)};
}

Output cmd_classify(const Globals& g, const ClassifyOpts& o) {
  PrecisionScope scope(bits_for(g, kArithmeticBits));
  NumberInput n = resolve_number(o.num.number, number_depth(g, o.num.number), o.num.a0);
  const DigitSequence& s = n.seq;
  Output out;
  json r;
  r["digits"] = digits_to_json(s);
  r["canonical"] = validate_canonical(s).ok;
  r["high_type"] = {{"N", o.N}, {"holds", is_high_type(s, o.N)}};
  int nb = std::min(o.brjuno_depth, std::max(0, s.depth() - 1));
  BrjunoEvaluation ev = brjuno_sum(s, nb, Real(o.tol));
  r["brjuno"] = to_json(ev);
  if (ev.verdict == BrjunoVerdict::ConvergedWithin) r["brjuno"]["value_approx"] = ev.partial_sums.back().to_double();
  auto [levels, hb] = herman_budget(s, o.levels, o.p_max, o.brjuno_depth);
  HermanReport hr = herman_test(s, levels, o.p_max, hb);
  r["herman"] = to_json(hr);
  r["herman"]["brjuno_depth"] = hb;
  int k = std::min(o.check_depth, std::max(0, s.depth() - 2));
  try {
    r["jagged"] = to_json(jagged_check(s, jagged_default_u(s, k), k));
  } catch (const Error& e) {
    r["jagged"] = {{"error", error_json(e)}};
  }
  try {
    r["spiky"] = to_json(spiky_check(s, spiky_default_v(k), Real(1), k));
  } catch (const Error& e) {
    r["spiky"] = {{"error", error_json(e)}};
  }
  out.result = r;
  if (hr.verdict == HermanVerdict::Indeterminate) out.code = kUndetermined;
  return out;
}

struct BrjunoOpts {
  NumberOpts num;
  int n_max = 40;
  double tol = 1e-9;
  std::string bound = "1000";
};

Output cmd_brjuno(const Globals& g, const BrjunoOpts& o) {
  PrecisionScope scope(bits_for(g, kArithmeticBits));
  NumberInput n = resolve_number(o.num.number, number_depth(g, o.num.number), o.num.a0);
  int nb = std::min(o.n_max, std::max(0, n.seq.depth() - 1));
  BrjunoEvaluation ev = brjuno_sum(n.seq, nb, Real(o.tol), parse_tower(o.bound));
  Output out;
  out.result = {{"digits", digits_to_json(n.seq)}, {"brjuno", to_json(ev)}, {"tails", to_json(tails(n.seq, nb))}};
  if (ev.verdict == BrjunoVerdict::Undetermined) out.code = kUndetermined;
  return out;
}

struct HermanOpts {
  NumberOpts num;
  int levels = 4;
  int p_max = 6;
  int brjuno_depth = 40;
  bool chain = false;
};

Output cmd_herman(const Globals& g, const HermanOpts& o) {
  PrecisionScope scope(bits_for(g, kArithmeticBits));
  NumberInput n = resolve_number(o.num.number, number_depth(g, o.num.number), o.num.a0);
  const DigitSequence& s = n.seq;
  auto [levels, hb] = herman_budget(s, o.levels, o.p_max, o.brjuno_depth);
  HermanReport hr = herman_test(s, levels, o.p_max, hb);
  Output out;
  out.result = {{"digits", digits_to_json(s)}, {"herman", to_json(hr)}, {"brjuno_depth", hb}};
  if (o.chain) out.result["spiky_chain"] = to_json(spiky_herman_chain(s, 3, o.p_max));
  if (hr.verdict == HermanVerdict::Indeterminate) out.code = kUndetermined;
  return out;
}

// ------------------------------------------------------------------ dynamics commands

struct MapOpts {
  std::string family = "Q";
  std::string alpha = "golden";
  long a0 = 3;
};

MapSpec map_of(const Globals& g, const MapOpts& m, json& provenance) {
  MapSpec spec;
  spec.family = parse_family(m.family);
  spec.precision = bits_for(g, 128);
  {
    PrecisionScope scope(std::max<int>(spec.precision, kArithmeticBits));
    provenance = {{"alpha_source", m.alpha}};
    bool exact = false;
    std::optional<Real> literal;
    try {
      literal = Real::parse(m.alpha, &exact);
    } catch (const Error&) {
    }
    if (literal) {
      spec.alpha = *literal;
    } else {
      NumberInput n = resolve_number(m.alpha, number_depth(g, m.alpha), m.a0);
      spec.alpha = alpha_of(n);
      provenance["digits"] = digits_to_json(n.seq);
    }
  }
  PrecisionScope scope(spec.precision);
  Real a = Real::zero_with_precision(spec.precision);
  mpfr_set(a.raw(), spec.alpha.raw(), MPFR_RNDN);
  spec.alpha = a;
  provenance["map"] = to_json(spec);
  return spec;
}

struct OrbitOpts {
  MapOpts map;
  std::size_t n = 100000;
  double radius = 10;
  bool full = false;
  bool points = false;
};

json orbit_summary(const OrbitSample& s, std::size_t requested) {
  json j{{"requested", requested},
         {"count", s.size()},
         {"escape_radius", s.escape_radius},
         {"max_modulus", s.max_modulus},
         {"start", complex_json(s.start)}};
  j["escaped_at"] = s.escaped_at ? json(*s.escaped_at) : json(nullptr);
  return j;
}

Output cmd_orbit(const Globals& g, const OrbitOpts& o) {
  json prov;
  MapSpec spec = map_of(g, o.map, prov);
  OrbitSample s = postcritical_orbit(spec, o.n, o.radius, o.full);
  Output out;
  if (g.format == "csv") {
    out.text = orbit_csv(s);
  } else if (g.format == "hdor") {
    std::ostringstream buf;
    write_hdor(buf, s, o.full);
    out.text = buf.str();
  } else {
    out.result = {{"input", prov}, {"orbit", orbit_summary(s, o.n)}};
    if (o.points) {
      json pts = json::array();
      for (const auto& p : s.rounded) pts.push_back({p.re, p.im});
      out.result["points"] = pts;
    }
  }
  return out;
}

struct FatouOpts {
  MapOpts map;
  std::vector<int> K{2000};
  int terms = 40;
  double tol = 1e-6;
  int grid = 10;
};

ChartOptions chart_options(const Globals& g, const FatouOpts& o, int K) {
  ChartOptions c;
  c.K = K;
  c.terms = o.terms;
  c.tol = o.tol;
  c.grid = o.grid;
  c.threads = g.threads;
  return c;
}

Output cmd_fatou(const Globals& g, FatouOpts o) {
  if (o.K.empty() || o.K.size() > 2) throw Error(ErrorKind::InvalidArgument, "--K takes one or two values");
  json prov;
  MapSpec spec = map_of(g, o.map, prov);
  PrecisionScope scope(spec.precision);
  std::vector<FatouChart> charts;
  for (int K : o.K) charts.push_back(fit_fatou(spec, chart_options(g, o, K)));
  const FatouChart& ch = charts[0];
  std::vector<double> diff;
  if (charts.size() == 2)
    for (const auto& v : ch.validation)
      diff.push_back(abs(fatou_value(ch, v.z) - fatou_value(charts[1], v.z)).to_double());
  Output out;
  bool all_valid = std::all_of(charts.begin(), charts.end(), [](const FatouChart& c) { return c.valid; });
  if (!all_valid) out.code = kGate;
  if (g.format == "csv") {
    std::ostringstream os;
    os.precision(17);
    os << "re_z,im_z,abel_residual" << (diff.empty() ? "" : ",richardson") << "\n";
    for (std::size_t i = 0; i < ch.validation.size(); ++i) {
      const auto& v = ch.validation[i];
      os << v.z.re.to_double() << "," << v.z.im.to_double() << "," << v.abel_residual;
      if (!diff.empty()) os << "," << diff[i];
      os << "\n";
    }
    out.text = os.str();
    return out;
  }
  json cj = json::array();
  for (const auto& c : charts) cj.push_back(to_json(c));
  out.result = {{"input", prov}, {"charts", cj}};
  if (!all_valid) out.result["status"] = "ResidualExceedsTol";
  if (!diff.empty()) out.result["richardson_error"] = *std::max_element(diff.begin(), diff.end());
  return out;
}

struct ChiOpts {
  FatouOpts chart;
  int eps = -1;
  long j = 0;
  std::vector<std::string> zeta;
  int band = 9;
};

Output cmd_chi(const Globals& g, const ChiOpts& o) {
  json prov;
  MapSpec spec = map_of(g, o.chart.map, prov);
  PrecisionScope scope(spec.precision);
  FatouChart ch = fit_fatou(spec, chart_options(g, o.chart, o.chart.K.at(0)));
  ChiLift lift{&ch, o.eps};
  std::vector<C> zs;
  for (const auto& s : o.zeta) zs.push_back(parse_complex(s));
  if (zs.empty())
    for (int i = 0; i < 10; ++i)
      for (int k = 0; k < 10; ++k) zs.push_back(C(Real(0.55 + 0.1 * i), Real(-1.0 + 1.0 * k)));
  json rows = json::array();
  double worst = 0;
  for (const C& z : zs) {
    C chi = chi_lift(lift, z, o.j);
    C target = fatou_inverse(ch, z);
    if (o.eps == 1) target = conj_s(target);
    double res = abs(exp_map(chi) - target).to_double();
    worst = std::max(worst, res);
    rows.push_back({{"zeta", complex_json(z)}, {"chi", complex_json(chi)}, {"exp_residual", res}});
  }
  const double alpha = spec.alpha.to_double();
  json band = json::array();
  double dev_max = 0;
  for (int k = 0; k < o.band; ++k) {
    double y = (10 + 40.0 * k / std::max(1, o.band - 1)) / alpha;
    C chi = chi_lift(lift, C(Real(1), Real(y)));
    double dev = std::abs(chi.im.to_double() - (alpha * y + std::log(1 / alpha) / (2 * M_PI)));
    dev_max = std::max(dev_max, dev);
    band.push_back({{"im_zeta", y}, {"im_chi", chi.im.str()}, {"deviation", dev}});
  }
  Output out;
  out.result = {{"input", prov},
                {"chart", to_json(ch)},
                {"eps", o.eps},
                {"j", o.j},
                {"chi_at_1", complex_json(chi_lift(lift, C(Real(1))))},
                {"points", rows},
                {"max_exp_residual", worst},
                {"est_imag_band", {{"samples", band}, {"max_deviation", dev_max}}}};
  if (!ch.valid || worst > ch.tol) out.code = kGate;
  return out;
}

struct RenormOpts {
  FatouOpts chart;
  std::vector<std::string> w;
  double radius = 1e-6;
  int directions = 8;
  long k_max = 0;
};

Output cmd_renorm(const Globals& g, const RenormOpts& o) {
  json prov;
  MapSpec spec = map_of(g, o.chart.map, prov);
  PrecisionScope scope(spec.precision);
  FatouChart ch = fit_fatou(spec, chart_options(g, o.chart, o.chart.K.at(0)));
  const double alpha = spec.alpha.to_double();
  long k_max = o.k_max > 0 ? o.k_max : static_cast<long>(std::ceil(10 / alpha)) + 10;
  std::vector<C> ws;
  for (const auto& s : o.w) ws.push_back(parse_complex(s));
  if (ws.empty())
    for (int d = 0; d < o.directions; ++d)
      ws.push_back(C(Real(o.radius)) * cis2pi(Real(d) / Real(o.directions) + Real(0.01)));
  json rows = json::array();
  double sum_err = 0, max_err = 0;
  long kmin = k_max, kmax = 0;
  for (const C& w : ws) {
    ReturnResult r = renormalized_return_map(ch, w, k_max);
    C q = r.w_prime / w;
    double err = std::remainder(arg(q).to_double() + 2 * M_PI / alpha, 2 * M_PI);
    sum_err += std::abs(err);
    max_err = std::max(max_err, std::abs(err));
    kmin = std::min(kmin, r.k_used), kmax = std::max(kmax, r.k_used);
    rows.push_back({{"w", complex_json(w)},
                    {"w_prime", complex_json(r.w_prime)},
                    {"k_used", r.k_used},
                    {"modulus_ratio", abs(q).to_double()},
                    {"arg_error", err}});
  }
  Output out;
  out.result = {{"input", prov},
                {"chart", to_json(ch)},
                {"k_max", k_max},
                {"expected_rotation", std::remainder(-2 * M_PI / alpha, 2 * M_PI)},
                {"points", rows},
                {"mean_abs_arg_error", sum_err / ws.size()},
                {"max_abs_arg_error", max_err},
                {"k_used_range", {kmin, kmax}}};
  if (!ch.valid) out.code = kGate;
  return out;
}

// ------------------------------------------------------------------ dimension commands

struct CloudOpts {
  MapOpts map;
  std::string points;
  std::string fixture;
  int fixture_depth = 8;
  std::size_t n = 1000000;
  int levels = 8;
  int factor = 2;
  std::string root;
};

struct Cloud {
  std::vector<Point> pts;
  Box root;
  std::vector<double> scales;
  json provenance;
};

Cloud load_cloud(const Globals& g, const CloudOpts& o) {
  Cloud c;
  if (!o.points.empty()) {
    c.pts = load_points(o.points);
    c.provenance = {{"source", "file"}, {"path", o.points}};
  } else if (o.fixture == "corner") {
    c.pts = corner_points(o.fixture_depth);
    c.provenance = {{"source", "fixture"}, {"fixture", "corner"}, {"depth", o.fixture_depth}};
  } else if (o.fixture == "square") {
    int m = 1 << std::min(o.fixture_depth, 10);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) c.pts.push_back({(i + 0.5) / m, (j + 0.5) / m});
    c.provenance = {{"source", "fixture"}, {"fixture", "square"}, {"depth", o.fixture_depth}};
  } else if (o.fixture == "segment") {
    int m = 1 << std::min(o.fixture_depth + 2, 20);
    for (int i = 0; i < m; ++i) c.pts.push_back({(i + 0.5) / m, 0.5});
    c.provenance = {{"source", "fixture"}, {"fixture", "segment"}, {"depth", o.fixture_depth}};
  } else if (!o.fixture.empty()) {
    throw Error(ErrorKind::Parse, "unknown fixture " + o.fixture);
  } else {
    json prov;
    MapSpec spec = map_of(g, o.map, prov);
    OrbitSample s = postcritical_orbit(spec, o.n, 10, false);
    c.pts.reserve(s.size());
    for (const auto& p : s.rounded) c.pts.push_back({p.re, p.im});
    c.provenance = {{"source", "orbit"}, {"input", prov}, {"orbit", orbit_summary(s, o.n)}};
  }
  if (c.pts.empty()) throw Error(ErrorKind::EmptyInput, "no points");
  if (!o.root.empty())
    c.root = parse_root(o.root);
  else if (!o.fixture.empty())
    c.root = Box{0, 0, 1, true};
  else
    c.root = dyadic_bounding_square(c.pts);
  if (o.factor < 2) throw Error(ErrorKind::InvalidArgument, "--factor must be an integer >= 2");
  double s = c.root.side;
  for (int k = 1; k <= o.levels; ++k) c.scales.push_back(s /= o.factor);
  return c;
}

json nest_stats(const NestedFamily& fam) {
  json gens = json::array();
  for (const auto& gen : fam.generations) gens.push_back({{"index", gen.index}, {"boxes", gen.count()}});
  return {{"generations", gens}, {"delta", fam.delta}, {"dia", fam.dia}};
}

json box_json(const Box& b) { return {{"x", b.x}, {"y", b.y}, {"side", b.side}}; }

struct NestOpts {
  CloudOpts cloud;
};

Output cmd_nest(const Globals& g, const NestOpts& o) {
  Cloud c = load_cloud(g, o.cloud);
  NestedFamily fam = extract_nest(c.pts, c.scales, c.root);
  Output out;
  if (g.format == "csv") {
    out.text = family_to_csv(fam);
    return out;
  }
  NestingReport rep = validate_nesting(fam);
  MartingaleMeasure mm = martingale_measure(fam);
  out.result = {{"input", c.provenance},
                {"points", c.pts.size()},
                {"root", box_json(c.root)},
                {"scales", c.scales},
                {"nest", nest_stats(fam)},
                {"nesting", {{"ok", rep.ok}, {"condition", rep.condition}, {"message", rep.message}}},
                {"martingale_max_conservation_error", mm.max_conservation_error}};
  if (!rep.ok) out.code = kGate;
  return out;
}

struct DimensionOpts {
  CloudOpts cloud;
  int window = 5;
  bool mcmullen_indexing = false;
};

Output cmd_dimension(const Globals& g, const DimensionOpts& o) {
  Cloud c = load_cloud(g, o.cloud);
  NestedFamily fam = extract_nest(c.pts, c.scales, c.root);
  DimensionBound b = mcmullen_bound(fam, o.window, o.mcmullen_indexing);
  BoxCountEstimate e = box_count_dimension(c.pts, c.scales, c.root);
  Output out;
  if (g.format == "csv") {
    std::ostringstream os;
    os.precision(17);
    os << "scale,count,log_inv_scale,log_count\n";
    for (std::size_t i = 0; i < e.scales.size(); ++i)
      os << e.scales[i] << "," << e.counts[i] << "," << std::log(1 / e.scales[i]) << ","
         << std::log(static_cast<double>(e.counts[i])) << "\n";
    out.text = os.str();
    return out;
  }
  out.result = {{"input", c.provenance},
                {"points", c.pts.size()},
                {"root", box_json(c.root)},
                {"scales", c.scales},
                {"window", o.window},
                {"mcmullen", to_json(b)},
                {"boxcount", to_json(e)},
                {"nest", nest_stats(fam)}};
  return out;
}

struct DemoOpts {
  int generations = 30;
  int materialize = 8;
  int window = 5;
  int samples = 1000;
  double s = 0.9;
  bool mcmullen_indexing = false;
};

Output cmd_mcmullen_demo(const Globals& g, const DemoOpts& o) {
  NestedFamily fam = corner_family(o.generations, o.materialize);
  DimensionBound b = mcmullen_bound(fam, o.window, o.mcmullen_indexing);
  MartingaleMeasure mm = martingale_measure(fam);
  FrostmanReport f1 = frostman_check(mm, fam, o.s, o.samples, g.seed);
  FrostmanReport f10 = frostman_check(mm, fam, o.s, 10 * o.samples, g.seed);
  auto fj = [](const FrostmanReport& f) {
    return json{{"samples", f.samples}, {"max_ratio", f.max_ratio}, {"at", {f.at_x, f.at_y, f.at_r}},
                {"r_min", f.r_min}, {"r_max", f.r_max}};
  };
  Output out;
  out.result = {{"family", {{"kind", "corner"}, {"generations", o.generations}, {"materialized", o.materialize}}},
                {"bound", to_json(b)},
                {"nesting_ok", validate_nesting(fam).ok},
                {"martingale_max_conservation_error", mm.max_conservation_error},
                {"frostman", {{"s", o.s}, {"base", fj(f1)}, {"tenfold", fj(f10)}}}};
  return out;
}

// ------------------------------------------------------------------ wiring

void add_number(CLI::App* sub, NumberOpts& n) {
  sub->add_option("--number", n.number,
                  "decimal literal, digits:<json>|digits:@file, constant:<a>, golden, sqrt2, jagged-example, "
                  "spiky-example")
      ->capture_default_str();
  sub->add_option("--a0", n.a0, "first digit of the jagged/spiky generators")->capture_default_str();
}

void add_map(CLI::App* sub, MapOpts& m) {
  sub->add_option("--family", m.family, "P or Q")->capture_default_str();
  sub->add_option("--alpha", m.alpha, "rotation number (same forms as --number)")->capture_default_str();
  sub->add_option("--a0", m.a0, "first digit of the jagged/spiky generators")->capture_default_str();
}

void add_chart(CLI::App* sub, FatouOpts& f) {
  add_map(sub, f.map);
  sub->add_option("--K", f.K, "iteration budget; two values give the comparison mode")->capture_default_str();
  sub->add_option("--terms", f.terms, "series length")->capture_default_str();
  sub->add_option("--tol", f.tol, "Abel residual tolerance")->capture_default_str();
  sub->add_option("--grid", f.grid, "validation grid side")->capture_default_str();
}

void add_cloud(CLI::App* sub, CloudOpts& c) {
  add_map(sub, c.map);
  sub->add_option("--points", c.points, "CSV (re,im) or HDOR file");
  sub->add_option("--fixture", c.fixture, "corner, square or segment");
  sub->add_option("--fixture-depth", c.fixture_depth)->capture_default_str();
  sub->add_option("--n", c.n, "orbit length when sampling an orbit")->capture_default_str();
  sub->add_option("--levels", c.levels, "number of scales")->capture_default_str();
  sub->add_option("--factor", c.factor, "integer ratio between consecutive scales")->capture_default_str();
  sub->add_option("--root", c.root, "root square as x,y,side (default: bounding square)");
}

void emit(const Globals& g, const CLI::App& app, const CLI::App* sub, const Output& out) {
  std::string payload;
  if (!out.text.empty() || (g.format != "json" && out.result.is_null())) {
    payload = out.text;
  } else {
    json env;
    env["tool"] = "hedgedim";
    env["version"] = kVersion;
    env["command"] = sub->get_name();
    json cfg = option_record(&app);
    cfg["subcommand"] = option_record(sub);
    int env_bits = env_precision();
    if (env_bits) cfg["HEDGEDIM_PRECISION"] = env_bits;
    env["config"] = cfg;
    if (!g.no_timestamp) env["timestamp"] = timestamp_utc();
    env["exit_code"] = out.code;
    env["result"] = out.result;
    payload = env.dump(2) + "\n";
  }
  if (g.out.empty() || g.out == "-") {
    std::cout << payload;
    std::cout.flush();
  } else {
    std::ofstream f(g.out, std::ios::binary);
    if (!f) throw Error(ErrorKind::Parse, "cannot write " + g.out);
    f << payload;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hedgedim: rotation-number arithmetic, nested-family dimension bounds and near-parabolic dynamics"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--precision", g.precision, "working precision in bits (default 256 arithmetic, 128 dynamics)");
  app.add_option("--depth", g.depth, "digit depth for number inputs");
  app.add_option("--seed", g.seed, "seed for randomized sampling")->capture_default_str();
  app.add_option("--format", g.format, "json, csv or hdor (orbit only)")
      ->check(CLI::IsMember({"json", "csv", "hdor"}))
      ->capture_default_str();
  app.add_option("--out", g.out, "output path (default stdout)");
  app.add_option("--threads", g.threads, "worker threads for grid evaluations")->capture_default_str();
  app.add_flag("--no-timestamp", g.no_timestamp, "omit the timestamp so output is byte-reproducible");

  ClassifyOpts classify;
  auto* s_classify = app.add_subcommand("classify", "digits, Brjuno, Herman, high-type, jagged and spiky evidence");
  add_number(s_classify, classify.num);
  s_classify->add_option("--N", classify.N, "high-type threshold")->capture_default_str();
  s_classify->add_option("--levels", classify.levels, "Herman levels")->capture_default_str();
  s_classify->add_option("--p-max", classify.p_max)->capture_default_str();
  s_classify->add_option("--brjuno-depth", classify.brjuno_depth)->capture_default_str();
  s_classify->add_option("--check-depth", classify.check_depth, "levels for the jagged/spiky checks")
      ->capture_default_str();
  s_classify->add_option("--tol", classify.tol)->capture_default_str();

  BrjunoOpts brjuno;
  auto* s_brjuno = app.add_subcommand("brjuno", "Brjuno partial sums with convergence verdict");
  add_number(s_brjuno, brjuno.num);
  s_brjuno->add_option("--n-max", brjuno.n_max)->capture_default_str();
  s_brjuno->add_option("--tol", brjuno.tol)->capture_default_str();
  s_brjuno->add_option("--bound", brjuno.bound, "divergence bound (decimal or E^k(m))")->capture_default_str();

  HermanOpts herman;
  auto* s_herman = app.add_subcommand("herman", "Herman-type test per level");
  add_number(s_herman, herman.num);
  s_herman->add_option("--levels", herman.levels)->capture_default_str();
  s_herman->add_option("--p-max", herman.p_max)->capture_default_str();
  s_herman->add_option("--brjuno-depth", herman.brjuno_depth)->capture_default_str();
  s_herman->add_flag("--chain", herman.chain, "add the spiky iteration chain");

  OrbitOpts orbit;
  auto* s_orbit = app.add_subcommand("orbit", "post-critical orbit sample");
  add_map(s_orbit, orbit.map);
  s_orbit->add_option("--n", orbit.n, "number of points")->capture_default_str();
  s_orbit->add_option("--radius", orbit.radius, "escape radius")->capture_default_str();
  s_orbit->add_flag("--full", orbit.full, "keep full-precision points (HDOR block)");
  s_orbit->add_flag("--points", orbit.points, "list rounded points in the JSON output");

  FatouOpts fatou;
  auto* s_fatou = app.add_subcommand("fatou", "fit a Fatou chart and report Abel residuals");
  add_chart(s_fatou, fatou);

  ChiOpts chi;
  auto* s_chi = app.add_subcommand("chi", "lift of the inverse Fatou coordinate through Exp");
  add_chart(s_chi, chi.chart);
  s_chi->add_option("--eps", chi.eps, "-1 holomorphic, +1 through conjugation")
      ->check(CLI::IsMember({-1, 1}))
      ->capture_default_str();
  s_chi->add_option("--j", chi.j, "integer translate chi_{n,j}")->capture_default_str();
  s_chi->add_option("--zeta", chi.zeta, "points re,im (default: 10x10 grid)");
  s_chi->add_option("--band", chi.band, "samples of the Im zeta in [10/alpha, 50/alpha] band")->capture_default_str();

  RenormOpts renorm;
  auto* s_renorm = app.add_subcommand("renorm", "near-parabolic return map near w = 0");
  add_chart(s_renorm, renorm.chart);
  s_renorm->add_option("--w", renorm.w, "points re,im (default: circle of --radius)");
  s_renorm->add_option("--radius", renorm.radius)->capture_default_str();
  s_renorm->add_option("--directions", renorm.directions)->capture_default_str();
  s_renorm->add_option("--k-max", renorm.k_max, "iteration cap (default 10/alpha + 10)");

  NestOpts nest;
  auto* s_nest = app.add_subcommand("nest", "extract a nested family from a point cloud");
  add_cloud(s_nest, nest.cloud);

  DimensionOpts dim;
  auto* s_dim = app.add_subcommand("dimension", "McMullen bound and box-counting slope of a point cloud");
  add_cloud(s_dim, dim.cloud);
  s_dim->add_option("--window", dim.window)->capture_default_str();
  s_dim->add_flag("--mcmullen-indexing", dim.mcmullen_indexing, "sum |log delta_k| up to k = n");

  DemoOpts demo;
  auto* s_demo = app.add_subcommand("mcmullen-demo", "bound, martingale and Frostman check on the corner family");
  s_demo->add_option("--generations", demo.generations)->capture_default_str();
  s_demo->add_option("--materialize", demo.materialize)->capture_default_str();
  s_demo->add_option("--window", demo.window)->capture_default_str();
  s_demo->add_option("--samples", demo.samples)->capture_default_str();
  s_demo->add_option("--s", demo.s)->capture_default_str();
  s_demo->add_flag("--mcmullen-indexing", demo.mcmullen_indexing);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    if (g.format == "hdor" && sub != s_orbit) throw Error(ErrorKind::InvalidArgument, "hdor output is orbit-only");
    bool csv_ok = sub == s_orbit || sub == s_fatou || sub == s_nest || sub == s_dim;
    if (g.format == "csv" && !csv_ok) throw Error(ErrorKind::InvalidArgument, "csv output is not available here");
    Output out;
    if (sub == s_classify) out = cmd_classify(g, classify);
    else if (sub == s_brjuno) out = cmd_brjuno(g, brjuno);
    else if (sub == s_herman) out = cmd_herman(g, herman);
    else if (sub == s_orbit) out = cmd_orbit(g, orbit);
    else if (sub == s_fatou) out = cmd_fatou(g, fatou);
    else if (sub == s_chi) out = cmd_chi(g, chi);
    else if (sub == s_renorm) out = cmd_renorm(g, renorm);
    else if (sub == s_nest) out = cmd_nest(g, nest);
    else if (sub == s_dim) out = cmd_dimension(g, dim);
    else out = cmd_mcmullen_demo(g, demo);
    emit(g, app, sub, out);
    return out.code;
  } catch (const Error& e) {
    json err{{"tool", "hedgedim"}, {"command", sub->get_name()}, {"error", error_json(e)}};
    err["exit_code"] = exit_for(e.kind());
    std::cerr << err.dump(2) << "\n";
    return exit_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << json{{"tool", "hedgedim"}, {"error", {{"kind", "Usage"}, {"message", e.what()}}}}.dump(2) << "\n";
    return kUsage;
  }
}
