#include "lll/risk.hpp"

#include <algorithm>
#include <cmath>

namespace lll::oracle {

namespace {

constexpr int kMaxUniverse = 16;
constexpr int kMaxEventVars = 14;

std::vector<int> mask_bits(uint32_t m) {
  std::vector<int> out;
  for (int i = 0; i < 32; ++i)
    if (m & (1u << i)) out.push_back(i);
  return out;
}

void require_universe(const Universe& u) {
  if (u.n > kMaxUniverse)
    throw Error("size-bound", "oracle universe limited to " + std::to_string(kMaxUniverse) +
                                  " variables, got " + std::to_string(u.n));
}

// Exact conditional probabilities of an event for every partial assignment of
// its variables, as a base-3 table (digit per event variable: 0 black,
// 1 white, 2 unset). Entries with unset digits are the weighted average of
// their two children, so a single ascending pass fills the table.
struct CondTable {
  std::vector<int> coords;        // universe positions of the event variables
  std::vector<int> coord_of;      // universe position -> local index or -1
  std::vector<uint32_t> pow3;
  std::vector<Dyadic> val;

  CondTable(const Universe& u, const TableEvent& e) {
    coords = mask_bits(e.vbl);
    const int k = static_cast<int>(coords.size());
    if (k > kMaxEventVars)
      throw Error("size-bound", "event reads " + std::to_string(k) +
                                    " variables; oracle risk ops are limited to " +
                                    std::to_string(kMaxEventVars));
    coord_of.assign(u.n, -1);
    for (int i = 0; i < k; ++i) coord_of[coords[i]] = i;
    pow3.resize(k + 1);
    pow3[0] = 1;
    for (int i = 0; i < k; ++i) pow3[i + 1] = pow3[i] * 3;
    val.assign(pow3[k], Dyadic());
    for (uint32_t code = 0; code < pow3[k]; ++code) {
      uint32_t c = code;
      int low_bot = -1;
      uint32_t white_mask = 0;
      for (int i = 0; i < k; ++i) {
        const int d = static_cast<int>(c % 3);
        c /= 3;
        if (d == 2) {
          low_bot = i;
          break;
        }
        if (d == 1) white_mask |= (1u << coords[i]);
      }
      if (low_bot < 0) {
        val[code] = e.holds(white_mask) ? Dyadic::one() : Dyadic::zero();
      } else {
        const int x = coords[low_bot];
        val[code] = u.pb[x] * val[code - 2 * pow3[low_bot]] + u.pw[x] * val[code - pow3[low_bot]];
      }
    }
  }

  uint32_t code_of(Pattern psi) const {
    uint32_t code = 0;
    for (size_t i = 0; i < coords.size(); ++i) {
      const uint32_t b = 1u << coords[i];
      if (psi.bot & b)
        code += 2 * pow3[i];
      else if (psi.white & b)
        code += pow3[i];
    }
    return code;
  }

  const Dyadic& at(Pattern psi) const { return val[code_of(psi)]; }
};

// avoid[w] (whites = w inside vbl(assoc), rest black avoids assoc) and its
// submask-OR closure g[U] = "some assignment of U avoids assoc".
struct AssocTables {
  std::vector<int> coords;
  std::vector<uint8_t> avoid;
  std::vector<uint8_t> any_avoid;

  AssocTables(const Universe& u, const TableEvent& assoc) {
    (void)u;
    coords = mask_bits(assoc.vbl);
    const int k = static_cast<int>(coords.size());
    if (k > kMaxUniverse) throw Error("size-bound", "assoc too large");
    avoid.assign(1u << k, 0);
    for (uint32_t w = 0; w < (1u << k); ++w) {
      uint32_t full = 0;
      for (int i = 0; i < k; ++i)
        if (w & (1u << i)) full |= (1u << coords[i]);
      avoid[w] = assoc.holds(full) ? 0 : 1;
    }
    any_avoid = avoid;
    for (int i = 0; i < k; ++i)
      for (uint32_t m = 0; m < (1u << k); ++m)
        if (m & (1u << i)) any_avoid[m] = any_avoid[m] | any_avoid[m ^ (1u << i)];
  }
};

// Membership in Respect(assoc) for a pattern, using the two routes:
//  - keep-blacks: turning every unset assoc variable white yields an
//    assoc-avoiding assignment (no black of the source assignment retracted);
//  - drop-whites: the pattern has no white assoc variable and some completion
//    of its unset assoc variables avoids assoc (all whites were retracted).
bool respect_member(const AssocTables& at, uint32_t white_a, uint32_t bot_a) {
  if (at.avoid[white_a | bot_a]) return true;
  return white_a == 0 && at.any_avoid[bot_a] != 0;
}

}  // namespace

Universe Universe::fair(int n) {
  Universe u;
  u.n = n;
  u.pb.assign(n, Dyadic(1, 1));
  u.pw.assign(n, Dyadic(1, 1));
  return u;
}

Universe Universe::dyadic(const std::vector<uint64_t>& num, int exp) {
  Universe u;
  u.n = static_cast<int>(num.size());
  for (uint64_t v : num) {
    if (v > (uint64_t{1} << exp)) throw Error("invalid-distribution", "p_black > 1");
    u.pb.emplace_back(v, exp);
    u.pw.emplace_back((uint64_t{1} << exp) - v, exp);
  }
  return u;
}

Dyadic Universe::weight(uint32_t white_mask) const {
  Dyadic w = Dyadic::one();
  for (int i = 0; i < n; ++i) w = w * ((white_mask & (1u << i)) ? pw[i] : pb[i]);
  return w;
}

TableEvent tabulate(const Universe& u, uint32_t vbl_mask,
                    const std::function<bool(uint32_t)>& holds_on_white_mask,
                    std::string name, Monotonicity declared) {
  require_universe(u);
  TableEvent e;
  e.name = std::move(name);
  e.vbl = vbl_mask;
  e.declared = declared;
  e.table.assign(1u << u.n, 0);
  for (uint32_t m = 0; m < (1u << u.n); ++m) e.table[m] = holds_on_white_mask(m) ? 1 : 0;
  return e;
}

TableEvent black_count_gt(const Universe& u, long long t, uint32_t vars_mask, std::string name) {
  const int n = u.n;
  return tabulate(
      u, vars_mask,
      [vars_mask, t, n](uint32_t white) {
        const long long blacks = __builtin_popcount(vars_mask & ~white & ((1u << n) - 1));
        return blacks > t;
      },
      name.empty() ? ("#black>" + std::to_string(t)) : std::move(name), Monotonicity::decreasing);
}

TableEvent black_count_lt(const Universe& u, long long t, uint32_t vars_mask, std::string name) {
  const int n = u.n;
  return tabulate(
      u, vars_mask,
      [vars_mask, t, n](uint32_t white) {
        const long long blacks = __builtin_popcount(vars_mask & ~white & ((1u << n) - 1));
        return blacks < t;
      },
      name.empty() ? ("#black<" + std::to_string(t)) : std::move(name), Monotonicity::increasing);
}

TableEvent event_or(const Universe& u, const TableEvent& a, const TableEvent& b, std::string name) {
  require_universe(u);
  TableEvent e;
  e.name = name.empty() ? (a.name + "|" + b.name) : std::move(name);
  e.vbl = a.vbl | b.vbl;
  e.table.resize(a.table.size());
  for (size_t m = 0; m < a.table.size(); ++m) e.table[m] = a.table[m] | b.table[m];
  return e;
}

Dyadic probability(const Universe& u, const TableEvent& e) {
  require_universe(u);
  Dyadic sum;
  for (uint32_t m = 0; m < (1u << u.n); ++m)
    if (e.holds(m)) sum = sum + u.weight(m);
  return sum;
}

Dyadic conditional(const Universe& u, const TableEvent& e, Pattern psi) {
  CondTable t(u, e);
  return t.at(psi);
}

std::optional<uint32_t> containment_counterexample(const Universe& u, const TableEvent& e,
                                                   const TableEvent& sup) {
  require_universe(u);
  for (uint32_t m = 0; m < (1u << u.n); ++m)
    if (e.holds(m) && !sup.holds(m)) return m;
  return std::nullopt;
}

std::optional<MonotonicityWitness> check_monotone(const Universe& u, const TableEvent& e,
                                                  Monotonicity declared) {
  if (declared == Monotonicity::none) return std::nullopt;
  CondTable t(u, e);
  const int k = static_cast<int>(t.coords.size());
  // local lattice condition: along black -> unset -> white every step moves
  // the conditional probability the declared way
  for (uint32_t code = 0; code < t.pow3[k]; ++code) {
    uint32_t c = code;
    for (int i = 0; i < k && c; ++i, c /= 3) {
      if (c % 3 != 2) continue;
      const Dyadic& with_black = t.val[code - 2 * t.pow3[i]];
      const Dyadic& with_bot = t.val[code];
      const Dyadic& with_white = t.val[code - t.pow3[i]];
      const bool ok = declared == Monotonicity::increasing
                          ? (with_black <= with_bot && with_bot <= with_white)
                          : (with_black >= with_bot && with_bot >= with_white);
      if (!ok) {
        // decode the violating pair (black side vs white side at coordinate i)
        Pattern lower, upper;
        uint32_t cc = code;
        for (int j = 0; j < k; ++j, cc /= 3) {
          const uint32_t b = 1u << t.coords[j];
          const int d = static_cast<int>(cc % 3);
          if (j == i) {
            upper.white |= b;
          } else if (d == 1) {
            lower.white |= b;
            upper.white |= b;
          } else if (d == 2) {
            lower.bot |= b;
            upper.bot |= b;
          }
        }
        return MonotonicityWitness{lower, upper};
      }
    }
  }
  return std::nullopt;
}

std::vector<Pattern> enumerate_respect(const Universe& u, const TableEvent& assoc) {
  require_universe(u);
  AssocTables at(u, assoc);
  const int k = static_cast<int>(at.coords.size());
  std::vector<Pattern> out;
  // patterns over the full universe; variables outside vbl(assoc) are
  // unconstrained by the definition
  std::vector<int> digit(u.n, 0);
  while (true) {
    Pattern psi;
    uint32_t wa = 0, ba = 0;
    for (int i = 0; i < u.n; ++i) {
      const uint32_t b = 1u << i;
      if (digit[i] == 1) psi.white |= b;
      if (digit[i] == 2) psi.bot |= b;
    }
    for (int i = 0; i < k; ++i) {
      const uint32_t b = 1u << i;
      if (psi.white & (1u << at.coords[i])) wa |= b;
      if (psi.bot & (1u << at.coords[i])) ba |= b;
    }
    if (respect_member(at, wa, ba)) out.push_back(psi);
    int j = 0;
    while (j < u.n && ++digit[j] == 3) digit[j++] = 0;
    if (j == u.n) break;
  }
  return out;
}

RiskReport testified_risk(const Universe& u, const TableEvent& e, const TableEvent& assoc) {
  require_universe(u);
  if (auto cx = containment_counterexample(u, e, assoc))
    throw Error("containment-violation",
                "assoc does not contain the event; counterexample white-mask " +
                    std::to_string(*cx));
  CondTable cond(u, e);
  AssocTables at(u, assoc);

  RiskReport rep;
  rep.pr_assoc = probability(u, assoc);

  // scan all patterns over the variables either event reads; everything else
  // can stay black without changing membership or the conditional
  const auto rcoords = mask_bits(e.vbl | assoc.vbl);
  std::vector<int> a_index(u.n, -1);
  for (size_t i = 0; i < at.coords.size(); ++i) a_index[at.coords[i]] = static_cast<int>(i);

  struct Scan {
    const std::vector<int>& rcoords;
    const std::vector<int>& a_index;
    const CondTable& cond;
    const AssocTables& at;
    RiskReport& rep;
    bool found = false;

    void run(size_t i, uint32_t white, uint32_t bot, uint32_t wa, uint32_t ba, uint32_t code) {
      if (i == rcoords.size()) {
        if (!respect_member(at, wa, ba)) return;
        const Dyadic& c = cond.val[code];
        if (!found || rep.max_respect < c) {
          found = true;
          rep.max_respect = c;
          rep.witness = Pattern{white, bot};
        }
        return;
      }
      const int x = rcoords[i];
      const uint32_t b = 1u << x;
      const int ai = a_index[x];
      const int ei = cond.coord_of[x];
      run(i + 1, white, bot, wa, ba, code);  // black
      run(i + 1, white | b, bot, ai >= 0 ? wa | (1u << ai) : wa, ba,
          ei >= 0 ? code + cond.pow3[ei] : code);  // white
      run(i + 1, white, bot | b, wa, ai >= 0 ? ba | (1u << ai) : ba,
          ei >= 0 ? code + 2 * cond.pow3[ei] : code);  // unset
    }
  };
  Scan scan{rcoords, a_index, cond, at, rep};
  scan.run(0, 0, 0, 0, 0, 0);
  rep.risk = rep.pr_assoc < rep.max_respect ? rep.max_respect : rep.pr_assoc;
  return rep;
}

Check verify_no_risk_lemma(const Universe& u, const TableEvent& e) {
  if (e.declared != Monotonicity::increasing)
    return {false, "event not declared monotone increasing"};
  if (auto w = check_monotone(u, e, Monotonicity::increasing)) {
    return {false, "declared monotonicity is false (witness whites " +
                       std::to_string(w->lower.white) + "/" + std::to_string(w->upper.white) +
                       ", bots " + std::to_string(w->lower.bot) + ")"};
  }
  const RiskReport r = testified_risk(u, e, e);
  const Dyadic pr = probability(u, e);
  if (r.risk == pr) return {true, ""};
  return {false, "risk " + r.risk.to_fraction_string() + " != Pr " + pr.to_fraction_string()};
}

Check verify_sum_threshold(const Universe& u, long long x) {
  const uint32_t all = (1u << u.n) - 1;
  TableEvent ex = black_count_gt(u, x, all, "#black>" + std::to_string(x));
  // X > x/2 evaluated exactly as 2X > x
  const int n = u.n;
  TableEvent ehalf = tabulate(
      u, all,
      [all, x, n](uint32_t white) {
        const long long blacks = __builtin_popcount(all & ~white & ((1u << n) - 1));
        return 2 * blacks > x;
      },
      "#black>" + std::to_string(x) + "/2", Monotonicity::decreasing);
  const RiskReport r = testified_risk(u, ex, ehalf);
  const Dyadic bound = probability(u, ehalf);
  if (r.risk <= bound) return {true, ""};
  return {false, "risk " + r.risk.to_fraction_string() + " > Pr(assoc) " +
                     bound.to_fraction_string()};
}

Check verify_union_risk(const Universe& u, const TableEvent& e1, const TableEvent& a1,
                        const TableEvent& e2, const TableEvent& a2) {
  const RiskReport r1 = testified_risk(u, e1, a1);
  const RiskReport r2 = testified_risk(u, e2, a2);
  const RiskReport ru = testified_risk(u, event_or(u, e1, e2), event_or(u, a1, a2));
  if (ru.risk <= r1.risk + r2.risk) return {true, ""};
  return {false, "union risk " + ru.risk.to_fraction_string() + " > " +
                     (r1.risk + r2.risk).to_fraction_string()};
}

TableEvent danger_event(const Universe& u, const TableEvent& e, const Dyadic& q) {
  require_universe(u);
  CondTable t(u, e);
  const int k = static_cast<int>(t.coords.size());
  // reachable[code]: some retraction of the pattern has conditional > q; a
  // retraction only moves digits toward unset, i.e. to larger codes
  std::vector<uint8_t> reach(t.val.size(), 0);
  for (uint32_t code = static_cast<uint32_t>(t.val.size()); code-- > 0;) {
    if (q < t.val[code]) {
      reach[code] = 1;
      continue;
    }
    uint32_t c = code;
    for (int i = 0; i < k; ++i, c /= 3) {
      if (c % 3 == 2) continue;
      const uint32_t up = code + (2 - c % 3) * t.pow3[i];
      if (reach[up]) {
        reach[code] = 1;
        break;
      }
    }
  }
  TableEvent d;
  d.name = e.name + "_danger";
  d.vbl = e.vbl;
  d.table.assign(1u << u.n, 0);
  for (uint32_t m = 0; m < (1u << u.n); ++m)
    d.table[m] = reach[t.code_of(Pattern{m, 0})];
  return d;
}

Dyadic danger_prob(const Universe& u, const TableEvent& e, const Dyadic& q) {
  return probability(u, danger_event(u, e, q));
}

Check verify_danger_lemma(const Universe& u, const TableEvent& e, const Dyadic& q) {
  if (!(q < Dyadic::one()))
    return {true, "q >= 1: danger event empty, lemma vacuous"};
  const TableEvent d = danger_event(u, e, q);
  const Dyadic pd = probability(u, d);
  const RiskReport r = testified_risk(u, e, d);
  const Dyadic bound = q < pd ? pd : q;
  if (r.risk <= bound) return {true, ""};
  return {false, "risk " + r.risk.to_fraction_string() + " > max(q, Pr(danger)) " +
                     bound.to_fraction_string()};
}

Dyadic fragility(const Universe& u, const TableEvent& e) {
  require_universe(u);
  CondTable t(u, e);  // reuse coords/pow3 layout
  const int k = static_cast<int>(t.coords.size());
  // subcube OR: does e hold on some completion of the pattern
  std::vector<uint8_t> any(t.val.size(), 0);
  for (uint32_t code = 0; code < any.size(); ++code) {
    uint32_t c = code;
    int low_bot = -1;
    uint32_t white_mask = 0;
    for (int i = 0; i < k; ++i) {
      const int d = static_cast<int>(c % 3);
      c /= 3;
      if (d == 2) {
        low_bot = i;
        break;
      }
      if (d == 1) white_mask |= (1u << t.coords[i]);
    }
    if (low_bot < 0)
      any[code] = e.holds(white_mask) ? 1 : 0;
    else
      any[code] = any[code - 2 * t.pow3[low_bot]] | any[code - t.pow3[low_bot]];
  }
  // agreement-pattern weights over two independent draws: equal-black pb^2,
  // equal-white pw^2, disagreeing coordinates 2 pb pw (either order)
  Dyadic f;
  for (uint32_t code = 0; code < any.size(); ++code) {
    if (!any[code]) continue;
    Dyadic w = Dyadic::one();
    uint32_t c = code;
    for (int i = 0; i < k; ++i, c /= 3) {
      const int x = t.coords[i];
      switch (c % 3) {
        case 0: w = w * u.pb[x] * u.pb[x]; break;
        case 1: w = w * u.pw[x] * u.pw[x]; break;
        default: w = w * u.pb[x] * u.pw[x].times(2); break;
      }
    }
    f = f + w;
  }
  return f;
}

Check verify_fragility_risk(const Universe& u, const TableEvent& e, const Dyadic& q) {
  if (!(q < Dyadic::one())) return {true, "q >= 1: vacuous"};
  const Dyadic f = fragility(u, e);
  const TableEvent d = danger_event(u, e, q);
  const RiskReport r = testified_risk(u, e, d);
  // q is a (negative) power of two, so f/q stays dyadic
  if (q.num != 1) throw Error("precondition", "fragility check expects q = 2^-j");
  Dyadic f_over_q = f;
  f_over_q.exp -= q.exp;
  f_over_q.normalize();
  const Dyadic bound = q < f_over_q ? f_over_q : q;
  if (r.risk <= bound) return {true, ""};
  return {false, "risk " + r.risk.to_fraction_string() + " > max(f/q, q) " +
                     bound.to_fraction_string()};
}

TailCheck verify_nonedge_tail(const Graph& g_on_x, double p, long trials, Rng& rng) {
  const int x = g_on_x.n;
  if (p * x < 8.0)
    throw Error("precondition",
                "non-edge tail bound assumes p|X| >= 8, got " + std::to_string(p * x));
  if (trials < 10000) throw Error("precondition", "need at least 10^4 trials");
  TailCheck out;
  const long long pairs = static_cast<long long>(x) * (x - 1) / 2;
  out.non_edges = pairs - g_on_x.edge_count();
  const double threshold = p * p * static_cast<double>(out.non_edges) / 2.0;
  long hits = 0;
  std::vector<int> sample;
  for (long t = 0; t < trials; ++t) {
    sample.clear();
    for (int v = 0; v < x; ++v)
      if (rng.bernoulli(p)) sample.push_back(v);
    long long f = 0;
    for (size_t i = 0; i < sample.size(); ++i)
      for (size_t j = i + 1; j < sample.size(); ++j)
        if (!g_on_x.has_edge(sample[i], sample[j])) ++f;
    if (static_cast<double>(f) <= threshold) ++hits;
  }
  out.empirical = static_cast<double>(hits) / static_cast<double>(trials);
  out.bound = std::exp(-p * static_cast<double>(out.non_edges) / (5.0 * x));
  out.stderr_3 = 3.0 * std::sqrt(std::max(out.empirical * (1 - out.empirical),
                                          1.0 / static_cast<double>(trials)) /
                                 static_cast<double>(trials));
  out.pass = out.empirical <= out.bound + out.stderr_3;
  return out;
}

Universe universe_from_instance(const LLLInstance& inst) {
  Universe u;
  u.n = inst.num_vars();
  require_universe(u);
  for (const auto& v : inst.variables) {
    if (v.domain() != 2 || !v.dist.has_exact())
      throw Error("precondition", "oracle bridge needs binary dyadic variables");
    u.pb.emplace_back(v.dist.dyadic_num[kBlack], v.dist.dyadic_exp);
    u.pw.emplace_back(v.dist.dyadic_num[kWhite], v.dist.dyadic_exp);
  }
  return u;
}

Universe random_universe(int n, Rng& rng, int exp) {
  std::vector<uint64_t> num(n);
  for (int i = 0; i < n; ++i) num[i] = 1 + rng.below((uint64_t{1} << exp) - 1);
  return Universe::dyadic(num, exp);
}

TableEvent random_increasing_event(const Universe& u, Rng& rng) {
  const int n = u.n;
  std::vector<long long> w(n);
  long long total = 0;
  for (int i = 0; i < n; ++i) {
    w[i] = 1 + static_cast<long long>(rng.below(3));
    total += w[i];
  }
  const long long tau = 1 + static_cast<long long>(rng.below(static_cast<uint64_t>(total)));
  return tabulate(
      u, (1u << n) - 1,
      [w, tau, n](uint32_t white) {
        long long s = 0;
        for (int i = 0; i < n; ++i)
          if (!(white & (1u << i))) s += w[i];
        return s < tau;
      },
      "wsum<" + std::to_string(tau), Monotonicity::increasing);
}

TableEvent tabulate_event(const Universe& u, const EventSpec& event, std::string name) {
  uint32_t vbl_mask = 0;
  for (int x : event.vbl) vbl_mask |= (1u << x);
  std::vector<Value> vals(event.vbl.size());
  return tabulate(
      u, vbl_mask,
      [&event, &vals](uint32_t white) {
        for (size_t i = 0; i < event.vbl.size(); ++i)
          vals[i] = (white >> event.vbl[i]) & 1 ? kWhite : kBlack;
        return event.holds(std::span<const Value>(vals));
      },
      name.empty() ? event.name : std::move(name), event.mono);
}

}  // namespace lll::oracle
