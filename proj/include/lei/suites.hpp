#pragma once

// Randomized property suites behind `lei validate`. Every instance draws from
// its own generator seeded by (seed, group, index), so results do not depend
// on the number of worker threads.

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lei/error.hpp"
#include "lei/extmodel.hpp"
#include "lei/formula.hpp"
#include "lei/model.hpp"
#include "lei/model_io.hpp"
#include "lei/proofkit.hpp"
#include "lei/random.hpp"
#include "lei/semantics.hpp"
#include "lei/syntax.hpp"
#include "lei/update.hpp"

namespace lei {

struct SuiteConfig {
  std::uint64_t seed = 1;
  int trials = 0;  // 0 picks the suite default
  int workers = 1;
  UpdateOptions update;
};

struct SuiteCount {
  std::string name;
  int required = 0;
  int attempts = 0;
  int decisive = 0;
  int unknown = 0;
  int violations = 0;
  int flagged = 0;  // decisive instances carrying a note, e.g. drift

  bool ok() const { return violations == 0 && decisive >= required; }
};

struct SuiteResult {
  std::string suite;
  std::vector<SuiteCount> counts;
  std::vector<std::string> lines;  // failures and summary notes
  std::uint64_t digest = 0;
  double seconds = 0;

  bool passed() const {
    return !counts.empty() && std::all_of(counts.begin(), counts.end(), [](const SuiteCount& c) { return c.ok(); });
  }
  int attempts() const {
    int n = 0;
    for (const auto& c : counts) n += c.attempts;
    return n;
  }
  int unknowns() const {
    int n = 0;
    for (const auto& c : counts) n += c.unknown;
    return n;
  }
  double unknown_rate() const { return attempts() ? static_cast<double>(unknowns()) / attempts() : 0.0; }
  std::string report() const;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> n = {"soundness", "equivalence", "update", "extmodel"};
  return n;
}

namespace detail {

// FNV-1a, 64 bit.
class Digest {
 public:
  void add(std::string_view s) {
    for (unsigned char c : s) {
      h_ ^= c;
      h_ *= 0x100000001b3ULL;
    }
    h_ ^= 0xff;
    h_ *= 0x100000001b3ULL;
  }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

inline std::uint64_t instance_seed(std::uint64_t seed, std::uint64_t group, std::uint64_t index) {
  std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                   static_cast<std::uint32_t>(group), static_cast<std::uint32_t>(index),
                   static_cast<std::uint32_t>(index >> 32)};
  std::array<std::uint32_t, 2> out{};
  ss.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

inline void parallel_for(int n, int workers, const std::function<void(int)>& body) {
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t)
    pool.emplace_back([&, t] {
      try {
        for (int i = next++; i < n; i = next++) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

enum class Verdict { Holds, Violated, Unknown, Skipped };

struct Instance {
  Verdict verdict = Verdict::Skipped;
  std::string record;  // feeds the digest
  std::string detail;  // shown for violations
  bool flagged = false;
};

// Runs `make` on indices [0, n) in parallel and folds the outcomes into c
// and the digest in index order.
inline void run_group(SuiteCount& c, int n, int workers, Digest& dg, std::vector<std::string>& lines,
                      const std::function<Instance(int)>& make) {
  std::vector<Instance> res(static_cast<std::size_t>(n));
  parallel_for(n, workers, [&](int i) { res[static_cast<std::size_t>(i)] = make(i); });
  int shown = 0;
  for (const auto& r : res) {
    ++c.attempts;
    dg.add(r.record);
    if (r.flagged) ++c.flagged;
    switch (r.verdict) {
      case Verdict::Holds: ++c.decisive; break;
      case Verdict::Violated:
        ++c.decisive;
        ++c.violations;
        if (shown++ < 3) lines.push_back("VIOLATION " + c.name + ": " + r.detail);
        break;
      case Verdict::Unknown: ++c.unknown; break;
      case Verdict::Skipped: break;
    }
  }
}

// Keeps running batches of `batch` instances until `c.required` decisive
// ones have been seen or `max_batches` is reached.
inline void run_until(SuiteCount& c, int batch, int max_batches, int workers, Digest& dg,
                      std::vector<std::string>& lines, const std::function<Instance(int)>& make) {
  for (int b = 0; b < max_batches && c.decisive < c.required; ++b)
    run_group(c, batch, workers, dg, lines, [&](int i) { return make(b * batch + i); });
}

inline std::string one_line(const KripkeModel& m) {
  std::string s = save_model(m);
  std::string out;
  for (char ch : s) {
    if (ch == '\n') {
      if (!out.empty() && out.back() != ' ') out += "; ";
    } else {
      out += ch;
    }
  }
  return out;
}

inline Substitution random_substitution(Random& r, const Formula& pattern, const std::vector<std::string>& atoms,
                                        int max_depth, int content_depth) {
  Substitution s;
  const std::set<std::string> names = atoms_of(pattern);
  for (const auto& slot : names) {
    if (!is_metavariable(slot)) continue;
    const int d = slot == "phi" ? content_depth : max_depth;
    s[slot] = r.static_formula(atoms, r.between(0, d));
  }
  if (names.count("p") || names.count("q")) {
    std::vector<std::string> shuffled = atoms;
    std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937_64(r.bits()));
    if (names.count("p")) s["p"] = atom(shuffled.at(0));
    if (names.count("q")) s["q"] = atom(shuffled.at(1));
  }
  return s;
}

// --- soundness --------------------------------------------------------------------

inline ModelShape soundness_models() {
  ModelShape s;
  s.max_worlds = 5;
  s.max_atoms = 4;
  return s;
}

inline Instance axiom_instance(const AxiomScheme& sc, std::uint64_t seed) {
  Random r(seed);
  KripkeModel m = r.model(soundness_models());
  const Substitution s = random_substitution(r, sc.pattern, m.atoms(), 3, 3);
  const Formula f = instantiate(sc, s);
  const bool ok = valid_in_model(m, f);
  Instance out;
  out.verdict = ok ? Verdict::Holds : Verdict::Violated;
  out.record = sc.id + "|" + render(f) + "|" + one_line(m) + (ok ? "|1" : "|0");
  if (!ok) out.detail = render(f) + " in " + one_line(m);
  return out;
}

// Draws formulas until `accept` holds; nullopt after `tries` failures.
inline std::optional<Formula> draw_until(Random& r, const std::vector<std::string>& atoms, int depth,
                                         const std::function<bool(const Formula&)>& accept, int tries = 400) {
  for (int t = 0; t < tries; ++t) {
    Formula f = r.static_formula(atoms, r.between(0, depth));
    if (accept(f)) return f;
  }
  return std::nullopt;
}

struct RuleDraw {
  std::vector<Formula> premises;
  Formula conclusion;
};

// One instance of the rule whose premises are all valid in m, or nullopt.
inline std::optional<RuleDraw> draw_rule(const std::string& rule, Random& r, const KripkeModel& m) {
  const auto& at = m.atoms();
  auto valid = [&](const Formula& f) { return valid_in_model(m, f); };
  auto any = [&] { return r.static_formula(at, r.between(0, 2)); };
  RuleDraw d;
  if (rule == "Adj") {
    auto a = draw_until(r, at, 2, valid), b = draw_until(r, at, 2, valid);
    if (!a || !b) return std::nullopt;
    d.premises = {*a, *b};
    d.conclusion = conj(*a, *b);
  } else if (rule == "MP") {
    auto a = draw_until(r, at, 2, valid);
    if (!a) return std::nullopt;
    auto b = draw_until(r, at, 2, [&](const Formula& x) { return valid(imp(*a, x)); });
    if (!b) return std::nullopt;
    d.premises = {imp(*a, *b), *a};
    d.conclusion = *b;
  } else if (rule == "dMP") {
    const Formula x = any();
    auto a = draw_until(r, at, 2, [&](const Formula& y) { return valid(disj(x, y)); });
    if (!a) return std::nullopt;
    auto b = draw_until(r, at, 2, [&](const Formula& y) { return valid(disj(x, imp(*a, y))); });
    if (!b) return std::nullopt;
    d.premises = {disj(x, imp(*a, *b)), disj(x, *a)};
    d.conclusion = disj(x, *b);
  } else if (rule == "dTrans") {
    const Formula x = any(), a = any();
    auto b = draw_until(r, at, 2, [&](const Formula& y) { return valid(disj(x, imp(a, y))); });
    if (!b) return std::nullopt;
    auto c = draw_until(r, at, 2, [&](const Formula& y) { return valid(disj(x, imp(*b, y))); });
    if (!c) return std::nullopt;
    d.premises = {disj(x, imp(a, *b)), disj(x, imp(*b, *c))};
    d.conclusion = disj(x, imp(a, *c));
  } else if (rule == "dECQ") {
    const Formula a = any();
    auto x = draw_until(r, at, 2, [&](const Formula& y) { return valid(disj(y, conj(a, neg(a)))); });
    if (!x) return std::nullopt;
    d.premises = {disj(*x, conj(a, neg(a)))};
    d.conclusion = disj(*x, any());
  } else if (rule == "IR") {
    const Formula a = any();
    auto b = draw_until(r, at, 2, [&](const Formula& y) { return valid(imp(a, y)); });
    if (!b) return std::nullopt;
    d.premises = {imp(a, *b)};
    d.conclusion = imp(a, imp(ign(*b), ign(a)));
  } else {
    throw Error("no generator for rule " + rule);
  }
  return d;
}

// Rules are sampled on small models so that valid premises are common.
inline Instance rule_instance(const std::string& rule, std::uint64_t seed) {
  Random r(seed);
  ModelShape shape = soundness_models();
  shape.max_worlds = 3;
  shape.max_atoms = 2;
  for (int attempt = 0; attempt < 20; ++attempt) {
    const KripkeModel m = r.model(shape);
    const auto d = draw_rule(rule, r, m);
    if (!d) continue;
    std::vector<Line> prem;
    for (std::size_t i = 0; i < d->premises.size(); ++i) prem.push_back(Line{static_cast<int>(i + 1), {}, d->premises[i], {}});
    std::vector<const Line*> ptrs;
    for (const auto& l : prem) ptrs.push_back(&l);
    const Line concl{static_cast<int>(prem.size() + 1), {}, d->conclusion, {}};
    Instance out;
    std::string shape_error = check_rule_shape(rule, ptrs, concl);
    std::string prem_text;
    for (const auto& p : d->premises) prem_text += render(p) + " ; ";
    out.record = rule + "|" + prem_text + render(d->conclusion) + "|" + one_line(m);
    if (!shape_error.empty()) {
      out.verdict = Verdict::Violated;
      out.detail = "generated instance rejected by the checker: " + shape_error;
      return out;
    }
    const bool ok = valid_in_model(m, d->conclusion);
    out.verdict = ok ? Verdict::Holds : Verdict::Violated;
    out.record += ok ? "|1" : "|0";
    if (!ok) out.detail = prem_text + "=> " + render(d->conclusion) + " in " + one_line(m);
    return out;
  }
  return Instance{Verdict::Skipped, rule + "|skipped", {}};
}

inline const std::vector<std::string>& sound_rules() {
  static const std::vector<std::string> r = {"Adj", "MP", "dMP", "dTrans", "dECQ", "IR"};
  return r;
}

// --- equivalence ------------------------------------------------------------------

inline Instance equivalence_instance(std::uint64_t seed) {
  Random r(seed);
  const KripkeModel m = r.model(soundness_models());
  const int w = r.below(m.num_worlds());
  FormulaShape fs;
  fs.atoms = m.atoms();
  fs.max_depth = 3;
  const Formula f = r.formula(fs);
  const TruthValue v = eval3(m, w, f);
  const bool s = sat(m, w, f), n = sat_neg(m, w, f);
  std::string why;
  if ((v == TruthValue::True) != s) why = "eval3 and sat disagree";
  else if ((v == TruthValue::False) != n) why = "eval3 and sat_neg disagree";
  else if (s && n) why = "sat and sat_neg both hold";
  Instance out;
  out.verdict = why.empty() ? Verdict::Holds : Verdict::Violated;
  out.record = render(f) + "|" + m.id(w) + "|" + to_string(v) + "|" + std::to_string(s) + std::to_string(n);
  if (!why.empty()) out.detail = why + ": " + render(f) + " at " + m.id(w) + " in " + one_line(m);
  return out;
}

// --- update axioms ----------------------------------------------------------------

inline const std::vector<std::string>& update_axioms() {
  static const std::vector<std::string> a = {"nI",  "emA", "INV",  "dAimp", "dAor", "dAand",
                                             "uA",  "nA1", "nA2", "nAp1",  "nAp2", "AI"};
  return a;
}

inline Formula update_pattern(const std::string& id) {
  if (id == "dAand") return parse("[phi] (psi & chi) <-> ([phi] psi & [phi] chi)");
  const AxiomScheme* s = find_scheme(id);
  if (!s) throw Error("unknown axiom " + id);
  return s->pattern;
}

inline ModelShape update_models() {
  ModelShape s;
  s.max_worlds = 3;
  s.max_atoms = 2;
  return s;
}

inline Instance update_instance(const std::string& id, std::uint64_t seed, const UpdateOptions& opt) {
  Random r(seed);
  KripkeModel m = r.model(update_models());
  m.add_atom("p");
  m.add_atom("q");
  const int w = r.below(m.num_worlds());
  const Formula pattern = update_pattern(id);
  const Substitution s = random_substitution(r, pattern, m.atoms(), 2, 1);
  const Formula f = uniform_substitute(pattern, s).formula;
  Instance out;
  out.record = id + "|" + render(f) + "|" + m.id(w) + "|" + one_line(m);
  try {
    const TruthValue v = eval_dynamic(PointedModel(m, w), f, opt);
    out.verdict = v == TruthValue::True ? Verdict::Holds : Verdict::Violated;
    out.record += std::string("|") + to_string(v);
    if (v != TruthValue::True)
      out.detail = render(f) + " is " + to_string(v) + " at " + m.id(w) + " in " + one_line(m);
  } catch (const OracleInconclusive&) {
    out.verdict = Verdict::Unknown;
    out.record += "|unknown";
  }
  return out;
}

// --- extended models --------------------------------------------------------------

inline Instance extmodel_instance(std::uint64_t seed, const UpdateOptions& opt, int slice_depth) {
  Random r(seed);
  KripkeModel core = r.model(update_models());
  FormulaShape fs;
  fs.atoms = core.atoms();
  fs.max_depth = 2;
  fs.announcements = true;
  fs.content_depth = 1;
  std::vector<Formula> formulas;
  formulas.push_back(ann(r.static_formula(fs.atoms, r.between(0, 1)), r.formula(fs, 1)));
  for (int k = 0; k < 2; ++k) formulas.push_back(r.formula(fs));
  std::vector<int> points;
  for (int w = 0; w < core.num_worlds(); ++w) points.push_back(w);

  Instance out;
  out.record = one_line(core);
  for (const auto& f : formulas) out.record += "|" + render(f);
  try {
    const ExtendedModel em = induce_for(core, formulas, points, opt);
    std::string why;
    for (const auto& f : formulas)
      for (int w : points) {
        const TruthValue v = eval_dynamic(PointedModel(core, w), f, opt);
        const bool pos = sat_plus(em, w, f), ng = sat_plus_neg(em, w, f);
        out.record += std::string("|") + to_string(v)[0] + (pos ? "+" : "") + (ng ? "-" : "");
        if ((v == TruthValue::True) != pos && why.empty())
          why = render(f) + " at " + core.id(w) + ": " + to_string(v) + " on the core, sat_plus " + (pos ? "true" : "false");
        if ((v == TruthValue::False) != ng && why.empty())
          why = render(f) + " at " + core.id(w) + ": " + to_string(v) + " on the core, sat_plus_neg " +
                (ng ? "true" : "false");
      }
    const PropertyReport rep = check_extension_properties(em, opt.bounds, slice_depth, opt);
    bool unknown = false;
    if (!rep.drift.empty()) {
      out.flagged = true;
      out.record += "|drift" + std::to_string(rep.drift.size());
    }
    for (const auto& p : rep.properties) {
      out.record += "|" + p.name + "=" + to_string(p.status);
      if (p.status == PropertyStatus::Fail && why.empty())
        why = p.name + " fails: " + (p.notes.empty() ? std::string() : p.notes.front());
      if (p.status == PropertyStatus::Unknown) unknown = true;
    }
    if (!why.empty()) {
      out.verdict = Verdict::Violated;
      out.detail = why + " (core " + one_line(core) + ")";
    } else {
      out.verdict = unknown ? Verdict::Unknown : Verdict::Holds;
    }
  } catch (const OracleInconclusive&) {
    out.verdict = Verdict::Unknown;
    out.record += "|unknown";
  }
  return out;
}

}  // namespace detail

inline std::string SuiteResult::report() const {
  std::ostringstream os;
  os << "suite " << suite << ": " << (passed() ? "PASS" : "FAIL") << "\n";
  for (const auto& c : counts) {
    os << "  " << c.name << ": " << c.decisive << " decisive";
    if (c.decisive < c.required) os << " (need " << c.required << ")";
    os << ", " << c.violations << " violations";
    if (c.unknown) os << ", " << c.unknown << " unknown";
    if (c.flagged) os << ", " << c.flagged << " with drift";
    os << ", " << c.attempts << " drawn\n";
  }
  char rate[32];
  std::snprintf(rate, sizeof rate, "%.2f%%", 100.0 * unknown_rate());
  os << "  unknown rate " << rate << "\n";
  for (const auto& l : lines) os << "  " << l << "\n";
  char dig[32];
  std::snprintf(dig, sizeof dig, "%016llx", static_cast<unsigned long long>(digest));
  os << "  digest " << dig << "\n";
  return os.str();
}

inline SuiteResult run_suite(const std::string& name, const SuiteConfig& cfg) {
  using detail::Instance;
  using detail::instance_seed;
  SuiteResult res;
  res.suite = name;
  detail::Digest dg;
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t seed = cfg.seed;
  const int workers = cfg.workers;

  if (name == "soundness") {
    const int n = cfg.trials > 0 ? cfg.trials : 1000;
    std::uint64_t group = 0;
    for (const auto& sc : axiom_schemes()) {
      ++group;
      if (sc.system == System::LEIup) continue;
      SuiteCount c{sc.id, n};
      detail::run_group(c, n, workers, dg, res.lines,
                        [&](int i) { return detail::axiom_instance(sc, instance_seed(seed, group, i)); });
      res.counts.push_back(c);
    }
    const int nr = std::max(1, n / 2);
    for (const auto& rule : detail::sound_rules()) {
      ++group;
      SuiteCount c{"rule " + rule, nr};
      detail::run_until(c, nr, 4, workers, dg, res.lines,
                        [&](int i) { return detail::rule_instance(rule, instance_seed(seed, 100 + group, i)); });
      res.counts.push_back(c);
    }
  } else if (name == "equivalence") {
    const int n = cfg.trials > 0 ? cfg.trials : 10000;
    SuiteCount c{"eval3 vs sat/sat_neg", n};
    detail::run_group(c, n, workers, dg, res.lines,
                      [&](int i) { return detail::equivalence_instance(instance_seed(seed, 200, i)); });
    res.counts.push_back(c);
  } else if (name == "update") {
    const int n = cfg.trials > 0 ? cfg.trials : 300;
    std::uint64_t group = 300;
    for (const auto& id : detail::update_axioms()) {
      ++group;
      SuiteCount c{id, n};
      detail::run_until(c, n, 4, workers, dg, res.lines,
                        [&](int i) { return detail::update_instance(id, instance_seed(seed, group, i), cfg.update); });
      res.counts.push_back(c);
    }
  } else if (name == "extmodel") {
    const int n = cfg.trials > 0 ? cfg.trials : 200;
    SuiteCount c{"induced cores", n};
    // Cores that hit an inconclusive oracle call are counted but not required.
    detail::run_group(c, n, workers, dg, res.lines,
                      [&](int i) { return detail::extmodel_instance(instance_seed(seed, 400, i), cfg.update, 1); });
    c.required = std::min(c.required, c.attempts - c.unknown);
    res.counts.push_back(c);
  } else {
    throw Error("unknown suite '" + name + "'");
  }
  res.digest = dg.value();
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace lei
