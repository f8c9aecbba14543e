#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hedgedim/complex.hpp"
#include "hedgedim/real.hpp"

namespace hedgedim {

enum class Family { P, Q };

const char* family_name(Family f);
Family parse_family(const std::string& s);

struct MapSpec {
  Family family = Family::Q;
  Real alpha;
  int precision = 128;
};

// f(z) = lambda z + c2 z^2 with its distinguished points, all held at the
// spec's precision. Every method runs at that precision regardless of the
// caller's working precision.
class QuadraticMap {
 public:
  explicit QuadraticMap(const MapSpec& spec);

  const MapSpec& spec() const { return spec_; }
  mpfr_prec_t bits() const { return spec_.precision; }
  const Real& alpha() const { return spec_.alpha; }
  const Real& period() const { return period_; }  // 1/alpha
  const ComplexHP& lambda() const { return lambda_; }
  const ComplexHP& c2() const { return c2_; }
  const ComplexHP& sigma() const { return sigma_; }
  const ComplexHP& critical_point() const { return cp_; }
  const ComplexHP& critical_value() const { return cv_; }

  ComplexHP operator()(const ComplexHP& z) const;

  ComplexHP tau(const ComplexHP& w) const;
  ComplexHP tau_inverse(const ComplexHP& z, long strip) const;
  // preimage of z nearest to `near` (by real part)
  ComplexHP tau_inverse_near(const ComplexHP& z, const ComplexHP& near) const;
  ComplexHP lift(const ComplexHP& w) const;
  ComplexHP lift_inverse(const ComplexHP& w) const;

  // u = (1 + E) / (1 - E), E = exp(-2 pi i alpha w); |u| <= 1 exactly on
  // the middle half of each strip.
  ComplexHP u_of(const ComplexHP& w) const;
  bool in_core(const ComplexHP& w) const;

 private:
  void require_rotation() const;

  MapSpec spec_;
  Real period_, two_pi_alpha_;
  ComplexHP lambda_, c2_, sigma_, cp_, cv_;
};

ComplexHP apply_map(const MapSpec& map, const ComplexHP& z);
ComplexHP critical_point(const MapSpec& map);
ComplexHP critical_value(const MapSpec& map);
ComplexHP sigma_fixed_point(const MapSpec& map);
// -4/27 e^{2 pi i zeta}
ComplexHP exp_map(const ComplexHP& zeta);
ComplexHP conj_s(const ComplexHP& z);

ComplexHP tau(const Real& alpha, const ComplexHP& sigma, const ComplexHP& w);
ComplexHP tau_inverse(const Real& alpha, const ComplexHP& sigma, const ComplexHP& z, long strip_index);
ComplexHP lift_F(const MapSpec& map, const ComplexHP& w);
ComplexHP F_inverse(const MapSpec& map, const ComplexHP& w);

struct WRect {
  Real re_lo, re_hi, im_lo, im_hi;
};

struct ChartOptions {
  int K = 2000;       // collocation pairs taken from orbits of F
  int terms = 40;     // u-series length
  double tol = 1e-6;  // Abel residual gate
  int grid = 10;      // validation grid is grid x grid
  double translation_gate = 0.5;
  int threads = 1;
};

struct ValidationPoint {
  ComplexHP w, z;
  double abel_residual = 0;
  double translation_defect = 0;  // |F(w) - w - 1|
};

// Phi o tau(w) = (L(w) - L(tau^{-1} cv)) + 1 with
//   L(w) = w + beta log(1 - q) + sum_j c_j u^j,  q = e^{2 pi i alpha w},
// evaluated after transporting w by F or F^{-1} into the core strip.
struct FatouChart {
  explicit FatouChart(const QuadraticMap& map) : map(map.spec()), f(map) {}

  MapSpec map;
  QuadraticMap f;
  int K = 0;
  int terms = 0;
  double tol = 0;
  ComplexHP beta;
  std::vector<ComplexHP> coeffs;
  ComplexHP anchor;                // L at cv
  ComplexHP normalization_offset;  // 1 - anchor
  long transport_budget = 0;
  double abel_max = 0, abel_mean = 0;
  double richardson_error = 0;  // max |Phi_K - Phi_{K/2}| on the validation set
  double max_translation_defect = 0;
  int fit_rank = 0;
  WRect valid_region;
  std::vector<ValidationPoint> validation;
  bool valid = false;
};

FatouChart fit_fatou(const MapSpec& map, const ChartOptions& opt = {});
ComplexHP fatou_value(const FatouChart& chart, const ComplexHP& z);
ComplexHP fatou_inverse(const FatouChart& chart, const ComplexHP& zeta);
// L before normalization, at a point of the lifted plane
ComplexHP fatou_raw(const FatouChart& chart, const ComplexHP& w);

struct ChiLift {
  const FatouChart* chart = nullptr;
  int eps = -1;  // +1: anti-holomorphic lift through s
};

// chi(zeta) + j, continued along 1 -> path_from -> zeta. Adding j is done at
// a precision wide enough that chi_j - chi_0 == j holds exactly.
ComplexHP chi_lift(const ChiLift& lift, const ComplexHP& zeta, const ComplexHP& path_from, long j = 0);
ComplexHP chi_lift(const ChiLift& lift, const ComplexHP& zeta, long j = 0);

struct ReturnResult {
  ComplexHP w_prime;
  ComplexHP zeta, zeta_prime;
  long k_used = 0;
};
ReturnResult renormalized_return_map(const FatouChart& chart, const ComplexHP& w, long k_max);

struct OrbitSample {
  MapSpec map;
  Complex<double> start_rounded;
  ComplexHP start;
  std::vector<Complex<double>> rounded;
  std::vector<ComplexHP> points;  // empty unless requested
  std::optional<std::size_t> escaped_at;
  double escape_radius = 10;
  double max_modulus = 0;

  std::size_t size() const { return rounded.size(); }
};

OrbitSample postcritical_orbit(const MapSpec& map, std::size_t n_points, double escape_radius = 10,
                               bool keep_full = true);

void write_hdor(std::ostream& out, const OrbitSample& s, bool include_full);
std::string orbit_csv(const OrbitSample& s);

struct HdorData {
  std::uint32_t version = 0, precision = 0;
  std::string escape_radius;
  std::vector<Complex<double>> points;
  std::vector<std::string> full;  // "re im" per point when present
};
HdorData read_hdor(std::istream& in);

nlohmann::json to_json(const MapSpec& m);
nlohmann::json to_json(const FatouChart& c);
nlohmann::json complex_json(const ComplexHP& z);

}  // namespace hedgedim
