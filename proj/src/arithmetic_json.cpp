#include "hedgedim/arithmetic_json.hpp"

#include <charconv>
#include <string>

#include "hedgedim/error.hpp"

namespace hedgedim {

Tower parse_tower(std::string_view s) {
  int sign = 1;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    sign = s[0] == '-' ? -1 : 1;
    s.remove_prefix(1);
  }
  if (s.size() > 2 && s.substr(0, 2) == "E^") {
    size_t open = s.find('(');
    if (open == std::string_view::npos || s.back() != ')') throw Error(ErrorKind::Parse, "bad tower literal");
    int level = 0;
    auto lv = s.substr(2, open - 2);
    auto [p, ec] = std::from_chars(lv.data(), lv.data() + lv.size(), level);
    if (ec != std::errc() || p != lv.data() + lv.size() || level < 0) throw Error(ErrorKind::Parse, "bad tower level");
    Real m = Real::parse(s.substr(open + 1, s.size() - open - 2));
    return Tower::from_level(sign, level, m);
  }
  bool exact = false;
  Real v = Real::parse(s, &exact);
  return Tower(sign < 0 ? -v : v, exact);
}

namespace {

json tower_json(const Tower& t) { return t.str(); }

json tri_list(const std::vector<Tri>& v) {
  json a = json::array();
  for (Tri t : v) a.push_back(tri_name(t));
  return a;
}

json tower_list(const std::vector<Tower>& v) {
  json a = json::array();
  for (const Tower& t : v) a.push_back(t.str());
  return a;
}

json digit_json(const Tower& a) {
  if (a.exact() && a.fits_real()) return integer_string(a.to_real());
  return json{{"log", log(a).str()}};
}

Tower digit_from(const json& j) {
  if (j.is_string()) {
    Tower t = parse_tower(j.get<std::string>());
    if (t.fits_real() && !t.to_real().is_integer()) throw Error(ErrorKind::Parse, "digit is not an integer");
    return t;
  }
  if (j.is_number_integer()) return Tower(Real(j.get<long>()), true);
  if (j.is_object() && j.contains("log")) return exp(parse_tower(j.at("log").get<std::string>()));
  throw Error(ErrorKind::Parse, "digit must be a decimal string or {\"log\": ...}");
}

}  // namespace

json digits_to_json(const DigitSequence& seq) {
  json entries = json::array();
  for (const DigitEntry& e : seq.entries) entries.push_back({{"a", digit_json(e.a)}, {"eps", e.eps_next}});
  json j{{"a_minus1", seq.a_minus1}, {"eps0", seq.eps0}, {"entries", entries}, {"canonical", seq.canonical}};
  if (seq.remainder)
    j["remainder"] = seq.remainder->str();
  else if (seq.remainder_log)
    j["remainder"] = json{{"log", seq.remainder_log->log_mag().str()}};
  return j;
}

DigitSequence digits_from_json(const json& j) {
  try {
    DigitSequence s;
    s.a_minus1 = j.at("a_minus1").get<long>();
    s.eps0 = j.value("eps0", 1);
    for (const json& e : j.at("entries")) {
      int eps = e.at("eps").get<int>();
      if (eps != 1 && eps != -1) throw Error(ErrorKind::Parse, "eps must be +-1");
      s.entries.push_back({digit_from(e.at("a")), eps});
    }
    if (j.contains("remainder")) {
      const json& r = j.at("remainder");
      if (r.is_string()) {
        s.remainder = Real::parse(r.get<std::string>());
        s.remainder_log = LogReal::from_real(*s.remainder);
      } else {
        s.remainder_log = LogReal(1, parse_tower(r.at("log").get<std::string>()));
        if (s.remainder_log->fits_real()) s.remainder = s.remainder_log->to_real();
      }
    }
    s.canonical = j.value("canonical", false);
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
}

json to_json(const BrjunoEvaluation& ev) {
  json v{{"tag", verdict_name(ev.verdict)}};
  switch (ev.verdict) {
    case BrjunoVerdict::ConvergedWithin: v["tol"] = ev.tol.str(6); break;
    case BrjunoVerdict::DivergesBeyond: v["bound"] = ev.bound.str(6); break;
    case BrjunoVerdict::Undetermined: v["depth"] = ev.depth_reached; break;
  }
  json j{{"verdict", v},
         {"depth_reached", ev.depth_reached},
         {"partial_sums", tower_list(ev.partial_sums)},
         {"log_beta", tower_list(ev.log_beta)},
         {"terms", tower_list(ev.terms)}};
  if (ev.verdict == BrjunoVerdict::ConvergedWithin) {
    j["tail_estimate"] = tower_json(ev.tail_estimate);
    j["value"] = tower_json(ev.partial_sums.back());
  }
  return j;
}

json to_json(const HermanReport& r) {
  json levels = json::array();
  for (const HermanLevel& lv : r.per_level) {
    json at = json::array();
    for (const HermanAttempt& a : lv.attempts) {
      json x{{"p", a.p},
             {"composition", tower_json(a.composition)},
             {"brjuno_lower", tower_json(a.target_lower)},
             {"success", tri_name(a.success)},
             {"failure", tri_name(a.failure)}};
      x["brjuno_upper"] = a.upper_infinite ? json("inf") : tower_json(a.target_upper);
      at.push_back(x);
    }
    json l{{"n", lv.n}, {"attempts", at}, {"indeterminate", lv.indeterminate}};
    l["found_p"] = lv.found_p ? json(*lv.found_p) : json(nullptr);
    levels.push_back(l);
  }
  json v{{"tag", verdict_name(r.verdict)}};
  if (r.verdict == HermanVerdict::HermanUpTo)
    v["depth"] = r.verdict_level;
  else
    v["n"] = r.verdict_level, v["p_max"] = r.p_max;
  return json{{"verdict", v}, {"per_level", levels}};
}

json to_json(const JaggedReport& r) {
  return json{{"all_ok", r.all_ok()},
              {"cond_ii", tri_list(r.cond_ii)},
              {"partial_sum", tower_list(r.partial_sum)},
              {"digits", tower_list(r.digits)},
              {"u_log_a", tower_list(r.u_log_a)}};
}

json to_json(const WitnessReport& r) {
  return json{{"witness", tower_json(r.witness)},
              {"partial_sum", tower_json(r.partial_sum)},
              {"chain", tri_list(r.chain)},
              {"sum_exceeds_witness", tri_name(r.sum_exceeds)}};
}

json to_json(const SpikyReport& r) {
  json levels = json::array();
  for (const SpikyLevel& lv : r.levels) {
    json l{{"n", lv.n}, {"eta", tower_json(lv.eta)}, {"eta_ok", tri_name(lv.eta_ok)}, {"precision_loss", lv.precision_loss}};
    if (lv.precision_loss) l["eta_radius"] = tower_json(lv.eta_radius);
    levels.push_back(l);
  }
  return json{{"all_ok", r.all_ok()},
              {"levels", levels},
              {"v", tower_list(r.v)},
              {"partial_sum", tower_list(r.partial_sum)},
              {"tail_estimate", tower_json(r.tail_estimate)},
              {"tail_converging", r.tail_converging}};
}

json to_json(const SpikyChainReport& r) {
  json e = json::array();
  for (const SpikyChainEntry& c : r.entries)
    e.push_back({{"n", c.n},
                 {"p", c.p},
                 {"iterate", tower_json(c.iterate)},
                 {"direct", tri_name(c.direct)},
                 {"first_link", tri_name(c.first_link)},
                 {"middle_link", tri_name(c.middle_link)},
                 {"last_link", tri_name(c.last_link)}});
  json j{{"threshold", tri_list(r.threshold)}, {"entries", e}};
  j["n0"] = r.n0 >= 0 ? json(r.n0) : json(nullptr);
  return j;
}

json to_json(const std::vector<AlphaTail>& t) {
  json a = json::array();
  for (const AlphaTail& x : t) {
    json e{{"n", x.level}, {"log_inv_alpha", tower_json(x.log_inv_alpha)}};
    if (x.value_if_small) e["alpha"] = x.value_if_small->str();
    a.push_back(e);
  }
  return a;
}

}  // namespace hedgedim
