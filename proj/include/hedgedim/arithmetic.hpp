#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hedgedim/real.hpp"
#include "hedgedim/tower.hpp"

namespace hedgedim {

constexpr mpfr_prec_t kArithmeticBits = 256;
constexpr int kDefaultCfDepth = 64;

struct DigitEntry {
  Tower a;       // a_n >= 2, an integer
  int eps_next;  // eps_{n+1}
};

// x = a_minus1 + eps0 * alpha_0,  1/alpha_n = a_n + eps_{n+1} alpha_{n+1}
struct DigitSequence {
  long a_minus1 = 0;
  int eps0 = 1;
  std::vector<DigitEntry> entries;
  bool canonical = false;
  // alpha_depth when known (from modified_cf or a generator's closed form)
  std::optional<Real> remainder;
  std::optional<LogReal> remainder_log;

  int depth() const { return static_cast<int>(entries.size()); }
};

struct AlphaTail {
  int level = 0;
  Tower inv_alpha;                   // 1/alpha_n
  Tower log_inv_alpha;               // log(1/alpha_n)
  std::optional<Real> value_if_small;  // alpha_n when representable
};

DigitSequence modified_cf(const Real& x, int depth, bool x_exact = false);

struct Realization {
  Real value;  // truncation with alpha_depth = 0, or the stored remainder
  Real lower;  // bounds over alpha_depth in [0, 1/2]
  Real upper;
  bool used_remainder = false;
  bool overflowed = false;  // some digit was beyond the real range
};
Realization realize(const DigitSequence& seq, int depth, bool use_remainder = true);

struct CanonicalReport {
  bool ok = true;
  int first_violation = -1;
  std::string reason;
};
CanonicalReport validate_canonical(const DigitSequence& seq);

// alpha_0 .. alpha_upto computed backward from the remainder (or alpha_depth = 0)
std::vector<AlphaTail> tails(const DigitSequence& seq, int upto);

enum class BrjunoVerdict { ConvergedWithin, DivergesBeyond, Undetermined };
const char* verdict_name(BrjunoVerdict v);

struct BrjunoEvaluation {
  std::vector<Tower> partial_sums;
  std::vector<Tower> log_beta;  // log beta_n = -sum_{i<=n} log(1/alpha_i)
  std::vector<Tower> terms;
  BrjunoVerdict verdict = BrjunoVerdict::Undetermined;
  Real tol;
  Tower bound;
  Tower tail_estimate;  // meaningful when converged
  int depth_reached = 0;

  Tower upper() const { return partial_sums.back() + tail_estimate; }
};

// Sum over alpha_{start} .. alpha_{start+n_max} of the given tails.
BrjunoEvaluation brjuno_from_tails(const std::vector<AlphaTail>& t, int start, int n_max, const Real& tol,
                                   const Tower& divergence_bound);
BrjunoEvaluation brjuno_sum(const DigitSequence& seq, int n_max, const Real& tol,
                            const Tower& divergence_bound = Tower(1000));

Real h_alpha(const Real& alpha, const Real& y);
Tower h_alpha_log(const Tower& log_inv_alpha, const Tower& y);

struct HermanAttempt {
  int p = 0;
  Tower composition;
  Tower target_lower;
  Tower target_upper;  // zero sign with upper_infinite when the target diverges
  bool upper_infinite = false;
  Tri success = Tri::Unresolved;  // composition >= upper
  Tri failure = Tri::Unresolved;  // composition < lower
};

struct HermanLevel {
  int n = 0;
  std::optional<int> found_p;
  std::vector<HermanAttempt> attempts;
  bool indeterminate = false;
};

enum class HermanVerdict { HermanUpTo, FailsAt, Indeterminate };
const char* verdict_name(HermanVerdict v);

struct HermanReport {
  std::vector<HermanLevel> per_level;
  HermanVerdict verdict = HermanVerdict::HermanUpTo;
  int verdict_level = 0;  // depth for HermanUpTo, n otherwise
  int p_max = 0;
};

HermanReport herman_test(const DigitSequence& seq, int n_levels, int p_max, int brjuno_depth,
                         const Real& brjuno_tol = Real(1e-12));

bool is_high_type(const DigitSequence& seq, long N);

struct JaggedReport {
  std::vector<Tri> cond_ii;        // log(a_{n+1} - 1/2) >= u_n a_n log a_n
  std::vector<Tower> partial_sum;  // sum_{k<=n} u_0...u_k
  std::vector<Tower> digits;       // a_n (trend for (iii))
  std::vector<Tower> u_log_a;      // u_n log a_n (trend for (iv))
  bool all_ok() const;
};
JaggedReport jagged_check(const DigitSequence& seq, const std::vector<Tower>& u, int depth);

struct WitnessReport {
  Tower witness;      // log(1/alpha_0) (1 + sum_{n<depth} u_0...u_n)
  Tower partial_sum;  // Brjuno partial sum through index depth
  std::vector<Tri> chain;  // beta_n log(1/alpha_{n+1}) >= u_n beta_{n-1} log(1/alpha_n)
  Tri sum_exceeds = Tri::Unresolved;
};
WitnessReport jagged_divergence_witness(const DigitSequence& seq, const std::vector<Tower>& u, int depth);

struct SpikyLevel {
  int n = 0;
  Tower eta;  // a_{n+1} - e^{v_n a_n}
  bool precision_loss = false;
  Tower eta_radius;  // bracket half width when precision_loss
  Tri eta_ok = Tri::Unresolved;
};

struct SpikyReport {
  std::vector<SpikyLevel> levels;
  std::vector<Tower> v;
  std::vector<Tower> partial_sum;  // sum_{1<=k<=n} v_k/(a_0...a_{k-1})
  Tower tail_estimate;
  bool tail_converging = false;
  bool all_ok() const;
};
SpikyReport spiky_check(const DigitSequence& seq, const std::vector<Tower>& v, const Real& eta_bound, int depth);

struct SpikyChainEntry {
  int n = 0;
  int p = 0;
  Tower iterate;           // E^p(0)
  Tri direct;              // E^p(0) < log(1/alpha_{n+p})
  Tri first_link;          // E^p(0) < E2^(p-1)(2/alpha_n)
  Tri middle_link;         // E2^(p-1)(2/alpha_n) <= 2/alpha_{n+p-1}
  Tri last_link;           // 2/alpha_{n+p-1} <= log(1/alpha_{n+p})
};

struct SpikyChainReport {
  int n0 = -1;  // first n with log(1/alpha_{n+1}) >= 2/alpha_n certified
  std::vector<Tri> threshold;  // per n of that condition
  std::vector<SpikyChainEntry> entries;
};
SpikyChainReport spiky_herman_chain(const DigitSequence& seq, int n_span, int p_max);

// Named generators. Jagged and spiky use all eps = -1 and a_{-1} = 1.
DigitSequence golden_sequence(int depth);
DigitSequence sqrt2_sequence(int depth);
DigitSequence constant_sequence(long a, int eps, int depth);
DigitSequence jagged_example(int depth, long a0 = 3);
DigitSequence spiky_example(int depth, long a0 = 3);

// u_n = a_n, a valid (non-tight) choice for condition (ii) of the jagged rule
std::vector<Tower> jagged_default_u(const DigitSequence& seq, int depth);
// u_n = e^{a_n}/(a_n log a_n)
std::vector<Tower> jagged_tight_u(const DigitSequence& seq, int depth);
std::vector<Tower> spiky_default_v(int depth);

std::string integer_string(const Real& integral);

}  // namespace hedgedim
