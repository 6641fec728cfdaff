// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lei/lei.hpp"

using namespace lei;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string slurp(const std::string& rel) {
  std::ifstream in(std::filesystem::path(LEI_DATA_DIR) / rel);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Outcome {
  bool ok = false;
  std::string summary;
  std::uint64_t digest = 0;
  std::vector<std::string> notes;
};

std::string hex(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// --- an evaluator and consequence check written independently of the library ---

namespace naive {

enum V { F = 0, G = 1, T = 2 };

struct Model {
  int n = 0;
  std::vector<std::map<std::string, V>> val;
  std::vector<std::vector<bool>> edge;
};

V eval(const Model& m, int w, const Formula& f) {
  switch (f.op()) {
    case Op::Atom: {
      auto it = m.val[w].find(f.name());
      return it == m.val[w].end() ? G : it->second;
    }
    case Op::Not: {
      const V a = eval(m, w, f.operand());
      return a == T ? F : a == F ? T : G;
    }
    case Op::And: return std::min(eval(m, w, f.lhs()), eval(m, w, f.rhs()));
    case Op::Imp: return (eval(m, w, f.lhs()) != T || eval(m, w, f.rhs()) == T) ? T : F;
    case Op::Ign: {
      if (eval(m, w, f.operand()) != T) return F;
      for (int v = 0; v < m.n; ++v)
        if (v != w && m.edge[w][v] && eval(m, v, f.operand()) == T) return F;
      return T;
    }
    default: throw Error("naive evaluator: static formulas only");
  }
}

Model from(const KripkeModel& k) {
  Model m;
  m.n = k.num_worlds();
  m.val.resize(m.n);
  m.edge.assign(m.n, std::vector<bool>(m.n, false));
  for (int w = 0; w < m.n; ++w) {
    for (const auto& a : k.atoms()) {
      const TruthValue t = k.value(w, a);
      m.val[w][a] = t == TruthValue::True ? T : t == TruthValue::False ? F : G;
    }
    for (int v : k.successors(w)) m.edge[w][v] = true;
  }
  return m;
}

// All models over {p, q} with one or two worlds.
std::vector<Model> grid() {
  std::vector<Model> out;
  for (int n = 1; n <= 2; ++n) {
    const int cells = 2 * n;
    int vals = 1;
    for (int i = 0; i < cells; ++i) vals *= 3;
    for (int code = 0; code < vals; ++code) {
      for (int e = 0; e < (1 << (n * n)); ++e) {
        Model m;
        m.n = n;
        m.val.resize(n);
        m.edge.assign(n, std::vector<bool>(n, false));
        int c = code;
        for (int w = 0; w < n; ++w) {
          m.val[w]["p"] = static_cast<V>(c % 3);
          c /= 3;
          m.val[w]["q"] = static_cast<V>(c % 3);
          c /= 3;
        }
        for (int i = 0; i < n * n; ++i) m.edge[i / n][i % n] = (e >> i) & 1;
        out.push_back(std::move(m));
      }
    }
  }
  return out;
}

bool follows(const std::vector<Model>& ms, const std::vector<Formula>& base, const Formula& f) {
  for (const auto& m : ms)
    for (int w = 0; w < m.n; ++w) {
      bool all = true;
      for (const auto& g : base) all = all && eval(m, w, g) == T;
      if (all && eval(m, w, f) != T) return false;
    }
  return true;
}

}  // namespace naive

std::vector<Formula> formulas_up_to(int depth) {
  std::set<Formula> layer{atom("p"), atom("q")};
  for (int d = 0; d < depth; ++d) {
    std::set<Formula> next = layer;
    for (const auto& a : layer) {
      next.insert(neg(a));
      next.insert(ign(a));
      for (const auto& b : layer) {
        next.insert(conj(a, b));
        next.insert(imp(a, b));
      }
    }
    layer = std::move(next);
  }
  return {layer.begin(), layer.end()};
}

// --- criteria ---------------------------------------------------------------------

Outcome c1() {
  Outcome o;
  const auto t = Clock::now();
  const std::vector<FigureClaim> claims = run_figures();
  const double s = since(t);
  int good = 0;
  detail::Digest dg;
  for (const auto& c : claims) {
    dg.add(c.figure + "|" + c.claim + "|" + c.actual);
    if (c.ok()) ++good;
    else o.notes.push_back(c.figure + ": " + c.claim + " expected " + c.expected + " got " + c.actual);
  }
  o.ok = !claims.empty() && good == static_cast<int>(claims.size()) && s < 5.0;
  o.summary = std::to_string(good) + "/" + std::to_string(claims.size()) + " claims, " + fmt("%.2f s", s);
  o.digest = dg.value();
  return o;
}

Outcome from_suite(const std::string& name, int workers, double limit, bool report_unknown = false) {
  Outcome o;
  SuiteConfig cfg;
  cfg.seed = 1;
  cfg.workers = workers;
  const SuiteResult r = run_suite(name, cfg);
  int required = 0, decisive = 0, violations = 0, flagged = 0;
  for (const auto& c : r.counts) {
    required += c.required;
    decisive += c.decisive;
    violations += c.violations;
    flagged += c.flagged;
  }
  o.ok = r.passed() && r.seconds < limit;
  o.summary = std::to_string(r.counts.size()) + " groups, " + std::to_string(decisive) + " decisive of " +
              std::to_string(r.attempts()) + " (" + std::to_string(required) + " required), " +
              std::to_string(violations) + " violations";
  if (report_unknown) {
    o.summary += ", unknown " + fmt("%.1f%%", 100.0 * r.unknown_rate());
    if (r.unknown_rate() >= 0.20) o.ok = false;
  }
  if (flagged) o.summary += ", " + std::to_string(flagged) + " with drift";
  o.summary += ", " + fmt("%.2f s", r.seconds);
  o.digest = r.digest;
  for (const auto& l : r.lines)
    if (l.rfind("VIOLATION", 0) == 0) o.notes.push_back(l);
  for (const auto& c : r.counts)
    if (!c.ok()) o.notes.push_back(c.name + ": " + std::to_string(c.decisive) + "/" + std::to_string(c.required));
  return o;
}

Outcome c5(int workers) {
  Outcome o;
  detail::Digest dg;
  const auto t = Clock::now();
  int witnesses = 0, bad_witness = 0;
  {
    Random r(5);
    FormulaShape fs;
    fs.atoms = {"p", "q", "r"};
    fs.max_depth = 3;
    SearchBounds b;
    b.workers = workers;
    for (int i = 0; i < 1000; ++i) {
      std::vector<Formula> gamma;
      const int k = r.between(1, 3);
      for (int j = 0; j < k; ++j) gamma.push_back(r.static_formula(fs.atoms, r.between(0, 3)));
      const SearchVerdict v = satisfiable(gamma, b);
      std::string rec = std::to_string(static_cast<int>(v.kind));
      if (v.sat()) {
        ++witnesses;
        const naive::Model nm = naive::from(v.witness->model);
        for (const auto& g : gamma) {
          if (!sat(*v.witness, g) || naive::eval(nm, v.witness->point, g) != naive::T) {
            ++bad_witness;
            o.notes.push_back("witness fails " + render(g));
          }
        }
        rec += save_model(v.witness->model) + v.witness->point_id();
      }
      dg.add(rec);
    }
  }
  const std::vector<naive::Model> grid = naive::grid();
  const std::vector<Formula> d1 = formulas_up_to(1), d2 = formulas_up_to(2);
  SearchBounds b;
  b.max_worlds = 2;
  b.atoms = {"p", "q"};
  b.workers = workers;
  int pairs = 0, disagree = 0, unknown = 0;
  auto one = [&](const std::vector<Formula>& base, const Formula& f) {
    ++pairs;
    const ConsequenceVerdict v = consequence(base, f, b);
    const bool want = naive::follows(grid, base, f);
    std::string rec = std::to_string(static_cast<int>(v.kind));
    if (v.kind == ConsequenceVerdict::Kind::Unknown) {
      ++unknown;
    } else if (v.follows() != want) {
      ++disagree;
      if (disagree <= 3) o.notes.push_back("disagreement on " + (base.empty() ? "" : render(base[0])) + " => " + render(f));
    } else if (v.kind == ConsequenceVerdict::Kind::Countermodel) {
      const naive::Model nm = naive::from(v.countermodel->model);
      const int w = v.countermodel->point;
      bool ok = naive::eval(nm, w, f) != naive::T;
      for (const auto& g : base) ok = ok && naive::eval(nm, w, g) == naive::T;
      if (!ok) {
        ++disagree;
        o.notes.push_back("countermodel does not refute " + render(f));
      }
      rec += save_model(v.countermodel->model);
    }
    dg.add(rec);
  };
  for (const auto& f : d2) one({}, f);
  for (const auto& g : d2)
    for (const auto& f : d1) one({g}, f);
  for (const auto& g : d1)
    for (const auto& f : d2) one({g}, f);
  o.ok = bad_witness == 0 && disagree == 0 && unknown == 0 && witnesses > 0;
  o.summary = std::to_string(witnesses) + " witnesses re-verified, " + std::to_string(pairs) +
              " consequence pairs on " + std::to_string(grid.size()) + " grid models, " + std::to_string(disagree) +
              " disagreements, " + std::to_string(unknown) + " unknown, " + fmt("%.2f s", since(t));
  o.digest = dg.value();
  return o;
}

Outcome c6() {
  Outcome o;
  detail::Digest dg;
  const std::vector<std::string> corpus = {"t1.proof",        "t2.proof",        "r1.proof",
                                           "dand.proof",      "dt_ir.proof",     "dt_ir_discharge.proof",
                                           "iand_gen2.proof", "iand_gen3.proof", "inta2_gen2.proof"};
  int checked = 0, mutations = 0, caught = 0, skipped = 0;
  bool all_ok = true;
  for (const auto& name : corpus) {
    const Derivation d = parse_script(slurp("proofs/" + name));
    const CheckReport r = check_derivation(d);
    const bool ok = r.ok() && check_derivation(flatten(d)).ok();
    if (!ok) {
      all_ok = false;
      o.notes.push_back(name + " does not check" + (r.first_error() ? ": " + r.first_error()->reason : ""));
    }
    ++checked;
    dg.add(name + (ok ? "|1" : "|0"));
    for (std::size_t i = 0; i < d.lines.size(); ++i) {
      // ECQ accepts any conclusion, so a changed conclusion is still correct.
      if (d.lines[i].just.name == "ECQ") {
        ++skipped;
        continue;
      }
      std::vector<Formula> variants{conj(d.lines[i].formula, atom("zz"))};
      if (d.lines[i].just.kind != Justification::Kind::Assume) variants.push_back(neg(d.lines[i].formula));
      for (const auto& v : variants) {
        Derivation m = d;
        m.lines[i].formula = v;
        const auto e = check_derivation(m).first_error();
        ++mutations;
        const bool hit = e && e->number == d.lines[i].number;
        if (hit) ++caught;
        else o.notes.push_back(name + " line " + std::to_string(d.lines[i].number) + " mutation not caught there");
        dg.add(name + "|" + std::to_string(i) + "|" + (e ? std::to_string(e->number) + e->reason : "ok"));
      }
    }
  }
  o.ok = all_ok && caught == mutations && checked == static_cast<int>(corpus.size());
  o.summary = std::to_string(checked) + " scripts check, " + std::to_string(caught) + "/" + std::to_string(mutations) +
              " mutations fail at the mutated line (" + std::to_string(skipped) + " ECQ lines skipped)";
  o.digest = dg.value();
  return o;
}

void line(int n, const char* what, const Outcome& o) {
  std::printf("%s %d %s: %s\n", o.ok ? "PASS" : "FAIL", n, what, o.summary.c_str());
  for (const auto& note : o.notes) std::printf("    %s\n", note.c_str());
}

}  // namespace

int main() {
  bool all = true;
  auto run = [&](int n, const char* what, const Outcome& o) {
    line(n, what, o);
    all = all && o.ok;
    std::fflush(stdout);
  };

  run(1, "figures", c1());
  const Outcome s2 = from_suite("soundness", 1, 60.0);
  run(2, "soundness", s2);
  const Outcome s3 = from_suite("update", 1, 120.0, true);
  run(3, "update axioms", s3);
  const Outcome s4 = from_suite("equivalence", 1, 1e9);
  run(4, "semantics equivalence", s4);
  const Outcome s5 = c5(1);
  run(5, "oracle self-check", s5);
  const Outcome s6 = c6();
  run(6, "proof corpus", s6);
  const Outcome s7 = from_suite("extmodel", 1, 1e9, true);
  run(7, "extended models", s7);

  Outcome d;
  d.ok = true;
  struct Rerun {
    std::string name;
    std::uint64_t digest;
    double limit;
  };
  const std::vector<Rerun> reruns = {
      {"soundness", s2.digest, 60.0}, {"update", s3.digest, 120.0}, {"equivalence", s4.digest, 1e9}, {"extmodel", s7.digest, 1e9}};
  for (const auto& r : reruns) {
    const std::uint64_t again = from_suite(r.name, 1, r.limit).digest;
    const std::uint64_t four = from_suite(r.name, 4, r.limit).digest;
    const bool same = again == r.digest && four == r.digest;
    d.ok = d.ok && same;
    d.notes.push_back(r.name + " " + hex(r.digest) + (same ? "" : " differs: rerun " + hex(again) + ", 4 workers " + hex(four)));
  }
  {
    const std::uint64_t again = c5(1).digest, four = c5(4).digest;
    const bool same = again == s5.digest && four == s5.digest;
    d.ok = d.ok && same;
    d.notes.push_back("oracle " + hex(s5.digest) + (same ? "" : " differs"));
  }
  {
    const bool same = c6().digest == s6.digest;
    d.ok = d.ok && same;
    d.notes.push_back("proofs " + hex(s6.digest) + (same ? "" : " differs"));
  }
  d.summary = d.ok ? "criteria 2-7 reproduce across runs and for 1 and 4 workers" : "digest mismatch";
  run(8, "determinism", d);

  std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  return all ? 0 : 1;
}
