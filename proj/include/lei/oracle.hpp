#pragma once

// Bounded model search for the static fragment.
//
// Search space for a constraint set of modal depth K and at most N worlds:
// pointed models whose point is world 0, with every world reachable from the
// point in at most K steps, no self-loops and no edges leaving worlds at
// distance K. Any model of the constraints can be cut down to such a model
// (with no more worlds), so these restrictions lose nothing.
//
// Relations are enumerated first (ascending world count, canonical under
// permutations of the non-point worlds), then valuations cell by cell with
// three-valued partial evaluation pruning each branch.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "lei/error.hpp"
#include "lei/formula.hpp"
#include "lei/model.hpp"
#include "lei/semantics.hpp"
#include "lei/syntax.hpp"

namespace lei {

struct SearchBounds {
  int max_worlds = 4;
  std::vector<std::string> atoms;
  std::uint64_t max_candidates = 5'000'000;
  std::optional<std::chrono::milliseconds> time_budget;
  int workers = 1;
};

struct SearchVerdict {
  enum class Kind { Sat, UnsatWithin, Unknown };
  Kind kind = Kind::Unknown;
  std::optional<PointedModel> witness;
  std::string reason;
  std::uint64_t nodes = 0;

  bool sat() const { return kind == Kind::Sat; }
  bool unsat() const { return kind == Kind::UnsatWithin; }
  bool unknown() const { return kind == Kind::Unknown; }
};

inline const char* to_string(SearchVerdict::Kind k) {
  switch (k) {
    case SearchVerdict::Kind::Sat: return "Sat";
    case SearchVerdict::Kind::UnsatWithin: return "UnsatWithin";
    default: return "Unknown";
  }
}

// A formula that must be satisfied (want_sat) or must fail to be satisfied.
struct Constraint {
  Formula formula;
  bool want_sat = true;
};

namespace detail {

constexpr std::uint8_t kT = 1, kF = 2, kG = 4, kAny = 7;

inline std::uint8_t tv_bit(TruthValue v) {
  return v == TruthValue::True ? kT : (v == TruthValue::False ? kF : kG);
}

inline TruthValue bit_tv(int bit) {
  return bit == kT ? TruthValue::True : (bit == kF ? TruthValue::False : TruthValue::Gap);
}

struct Frame {
  int n = 1;
  std::vector<std::vector<int>> succ;
  std::uint64_t mask = 0;
};

// Compiled constraint: atoms replaced by their column in the search signature.
struct CNode {
  Op op;
  int atom = -1;
  int a = -1, b = -1;
};

class Compiled {
 public:
  Compiled(const std::vector<Constraint>& cs, const std::vector<std::string>& atoms) {
    for (const auto& c : cs) {
      roots_.push_back(add(c.formula, atoms));
      want_.push_back(c.want_sat);
    }
  }

  std::size_t size() const { return roots_.size(); }
  int root(std::size_t i) const { return roots_[i]; }
  bool want_sat(std::size_t i) const { return want_[i]; }

  // Possible values of node `k` at world `w` under a partial valuation
  // (cell masks, row-major by world).
  std::uint8_t poss(int k, int w, const Frame& fr, const std::uint8_t* cells, int natoms) const {
    const CNode& n = nodes_[k];
    switch (n.op) {
      case Op::Atom: return cells[w * natoms + n.atom];
      case Op::Not: {
        const std::uint8_t x = poss(n.a, w, fr, cells, natoms);
        return static_cast<std::uint8_t>(((x & kT) ? kF : 0) | ((x & kF) ? kT : 0) | (x & kG));
      }
      case Op::And: {
        const std::uint8_t x = poss(n.a, w, fr, cells, natoms);
        if (x == kF) return kF;
        const std::uint8_t y = poss(n.b, w, fr, cells, natoms);
        std::uint8_t r = 0;
        if ((x & kF) || (y & kF)) r |= kF;
        if ((x & kT) && (y & kT)) r |= kT;
        if (((x & kG) && (y & (kT | kG))) || ((y & kG) && (x & (kT | kG)))) r |= kG;
        return r;
      }
      case Op::Imp: {
        const std::uint8_t x = poss(n.a, w, fr, cells, natoms);
        if (!(x & kT)) return kT;
        const std::uint8_t y = poss(n.b, w, fr, cells, natoms);
        std::uint8_t r = 0;
        if ((x & (kF | kG)) || (y & kT)) r |= kT;
        if (y & (kF | kG)) r |= kF;
        return r;
      }
      case Op::Ign: {
        const std::uint8_t here = poss(n.a, w, fr, cells, natoms);
        bool can_t = (here & kT) != 0;
        bool can_f = (here & (kF | kG)) != 0;
        for (int v : fr.succ[w]) {
          if (can_f && !can_t) break;
          const std::uint8_t there = poss(n.a, v, fr, cells, natoms);
          if (there & kT) can_f = true;
          if (there == kT) can_t = false;
        }
        return static_cast<std::uint8_t>((can_t ? kT : 0) | (can_f ? kF : 0));
      }
      default: throw DynamicFormulaError();
    }
  }

 private:
  int add(const Formula& f, const std::vector<std::string>& atoms) {
    CNode n{f.op()};
    switch (f.op()) {
      case Op::Atom:
        n.atom = static_cast<int>(std::find(atoms.begin(), atoms.end(), f.name()) - atoms.begin());
        break;
      case Op::Not:
      case Op::Ign: n.a = add(f.operand(), atoms); break;
      case Op::And:
      case Op::Imp:
        n.a = add(f.lhs(), atoms);
        n.b = add(f.rhs(), atoms);
        break;
      case Op::Ann: throw DynamicFormulaError();
    }
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size()) - 1;
  }

  std::vector<CNode> nodes_;
  std::vector<int> roots_;
  std::vector<bool> want_;
};

// All canonical frames with n worlds for modal depth k, in mask order.
inline std::vector<Frame> canonical_frames(int n, int k) {
  std::vector<Frame> out;
  if (n == 1) {
    Frame f;
    f.succ.assign(1, {});
    out.push_back(f);
    return out;
  }
  if (k == 0) return out;
  std::vector<std::pair<int, int>> slots;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) slots.emplace_back(i, j);
  std::vector<int> slot_of(n * n, -1);
  for (std::size_t s = 0; s < slots.size(); ++s) slot_of[slots[s].first * n + slots[s].second] = static_cast<int>(s);

  std::vector<std::vector<int>> perms;
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  do perms.push_back(p);
  while (std::next_permutation(p.begin() + 1, p.end()));

  const std::uint64_t total = std::uint64_t{1} << slots.size();
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    std::vector<int> dist(n, -1);
    dist[0] = 0;
    std::vector<int> queue{0};
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const int u = queue[qi];
      for (int v = 0; v < n; ++v)
        if (v != u && (mask >> slot_of[u * n + v] & 1) && dist[v] < 0) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
    }
    bool ok = true;
    for (int u = 0; u < n && ok; ++u) {
      if (dist[u] < 0 || dist[u] > k) ok = false;
      else if (dist[u] == k)
        for (int v = 0; v < n; ++v)
          if (v != u && (mask >> slot_of[u * n + v] & 1)) ok = false;
    }
    if (!ok) continue;
    bool canonical = true;
    for (std::size_t pi = 1; pi < perms.size() && canonical; ++pi) {
      std::uint64_t image = 0;
      for (std::size_t s = 0; s < slots.size(); ++s)
        if (mask >> s & 1) image |= std::uint64_t{1} << slot_of[perms[pi][slots[s].first] * n + perms[pi][slots[s].second]];
      if (image < mask) canonical = false;
    }
    if (!canonical) continue;
    Frame f;
    f.n = n;
    f.mask = mask;
    f.succ.assign(n, {});
    for (std::size_t s = 0; s < slots.size(); ++s)
      if (mask >> s & 1) f.succ[slots[s].first].push_back(slots[s].second);
    out.push_back(std::move(f));
  }
  return out;
}

struct FrameResult {
  bool found = false;
  bool exhausted_budget = false;
  bool timed_out = false;
  std::uint64_t nodes = 0;
  std::vector<std::uint8_t> cells;
};

class ValuationSearch {
 public:
  using Clock = std::chrono::steady_clock;

  ValuationSearch(const Compiled& c, const Frame& fr, int natoms, std::uint64_t budget,
                  std::optional<Clock::time_point> deadline, const std::atomic<bool>* cancel)
      : c_(c), fr_(fr), natoms_(natoms), budget_(budget), deadline_(deadline), cancel_(cancel) {
    cells_.assign(static_cast<std::size_t>(fr.n) * natoms, kAny);
  }

  FrameResult run() {
    std::vector<std::size_t> pending(c_.size());
    std::iota(pending.begin(), pending.end(), 0);
    FrameResult r;
    r.found = dfs(0, pending);
    r.nodes = nodes_;
    r.exhausted_budget = over_budget_;
    r.timed_out = timed_out_;
    if (r.found) r.cells = cells_;
    return r;
  }

 private:
  // Returns false if some constraint is already violated; removes decided ones.
  bool filter(std::vector<std::size_t>& pending) const {
    std::size_t keep = 0;
    for (std::size_t i = 0; i < pending.size(); ++i) {
      const std::size_t k = pending[i];
      const std::uint8_t p = c_.poss(c_.root(k), 0, fr_, cells_.data(), natoms_);
      if (c_.want_sat(k)) {
        if (!(p & kT)) return false;
        if (p == kT) continue;
      } else {
        if (p == kT) return false;
        if (!(p & kT)) continue;
      }
      pending[keep++] = k;
    }
    pending.resize(keep);
    return true;
  }

  bool dfs(std::size_t cell, std::vector<std::size_t> pending) {
    if (stop_) return false;
    if (++nodes_ > budget_) {
      over_budget_ = stop_ = true;
      return false;
    }
    if ((nodes_ & 0x3ff) == 0) {
      if (cancel_ && cancel_->load(std::memory_order_relaxed)) {
        timed_out_ = stop_ = true;
        return false;
      }
      if (deadline_ && Clock::now() > *deadline_) {
        timed_out_ = stop_ = true;
        return false;
      }
    }
    if (!filter(pending)) return false;
    if (pending.empty()) {
      for (std::size_t i = cell; i < cells_.size(); ++i) cells_[i] = kG;
      return true;
    }
    if (cell == cells_.size()) return false;
    for (std::uint8_t v : {kT, kF, kG}) {
      cells_[cell] = v;
      if (dfs(cell + 1, pending)) return true;
      if (stop_) break;
    }
    cells_[cell] = kAny;
    return false;
  }

  const Compiled& c_;
  const Frame& fr_;
  int natoms_;
  std::uint64_t budget_;
  std::optional<Clock::time_point> deadline_;
  const std::atomic<bool>* cancel_;
  std::vector<std::uint8_t> cells_;
  std::uint64_t nodes_ = 0;
  bool over_budget_ = false;
  bool timed_out_ = false;
  bool stop_ = false;
};

inline bool check_constraints(const PointedModel& pm, const std::vector<Constraint>& cs) {
  for (const auto& c : cs)
    if (sat(pm, c.formula) != c.want_sat) return false;
  return true;
}

}  // namespace detail

// Finds the first pointed model (in enumeration order) meeting every
// constraint. Node counting is per frame and summed in frame order, so the
// verdict does not depend on the number of workers; only time_budget can make
// results vary between runs.
inline SearchVerdict search(const std::vector<Constraint>& cs, const SearchBounds& b) {
  if (b.max_worlds < 1) throw Error("max_worlds must be at least 1");
  for (const auto& c : cs)
    if (c.formula.has_announcement()) throw DynamicFormulaError();

  std::vector<std::string> atoms;
  for (const auto& a : atoms_of_all([&] {
         std::vector<Formula> fs;
         for (const auto& c : cs) fs.push_back(c.formula);
         return fs;
       }()))
    atoms.push_back(a);
  std::set<std::string> signature(b.atoms.begin(), b.atoms.end());
  signature.insert(atoms.begin(), atoms.end());

  int depth = 0;
  for (const auto& c : cs) depth = std::max(depth, c.formula.modal_depth());

  const detail::Compiled compiled(cs, atoms);
  const int natoms = static_cast<int>(atoms.size());
  std::optional<detail::ValuationSearch::Clock::time_point> deadline;
  if (b.time_budget) deadline = detail::ValuationSearch::Clock::now() + *b.time_budget;

  SearchVerdict out;
  std::uint64_t used = 0;
  for (int n = 1; n <= b.max_worlds; ++n) {
    const auto frames = detail::canonical_frames(n, depth);
    std::vector<detail::FrameResult> results(frames.size());
    std::vector<char> done(frames.size(), 0);
    const std::uint64_t remaining = b.max_candidates - used;
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> first_hit{std::numeric_limits<std::size_t>::max()};
    std::atomic<bool> cancel{false};

    auto work = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= frames.size() || i > first_hit.load()) return;
        detail::ValuationSearch vs(compiled, frames[i], natoms, remaining, deadline, &cancel);
        results[i] = vs.run();
        done[i] = 1;
        if (results[i].found || results[i].exhausted_budget || results[i].timed_out) {
          std::size_t cur = first_hit.load();
          while (i < cur && !first_hit.compare_exchange_weak(cur, i)) {
          }
          if (results[i].timed_out) cancel = true;
        }
      }
    };
    const int workers = std::max(1, std::min<int>(b.workers, static_cast<int>(frames.size())));
    if (workers == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < workers; ++t) pool.emplace_back(work);
      for (auto& t : pool) t.join();
    }

    for (std::size_t i = 0; i < frames.size(); ++i) {
      if (!done[i]) {
        out.kind = SearchVerdict::Kind::Unknown;
        out.reason = "time budget exhausted";
        out.nodes = used;
        return out;
      }
      const auto& r = results[i];
      if (r.timed_out) {
        out.kind = SearchVerdict::Kind::Unknown;
        out.reason = "time budget exhausted";
        out.nodes = used + r.nodes;
        return out;
      }
      if (used + r.nodes > b.max_candidates || r.exhausted_budget) {
        out.kind = SearchVerdict::Kind::Unknown;
        out.reason = "candidate budget of " + std::to_string(b.max_candidates) + " exhausted at " +
                     std::to_string(n) + " worlds";
        out.nodes = b.max_candidates;
        return out;
      }
      used += r.nodes;
      if (r.found) {
        KripkeModel m("witness");
        for (int w = 0; w < n; ++w) m.add_world("w" + std::to_string(w));
        for (const auto& a : signature) m.add_atom(a);
        for (int w = 0; w < n; ++w)
          for (int a = 0; a < natoms; ++a)
            m.set_value(w, atoms[a], detail::bit_tv(r.cells[static_cast<std::size_t>(w) * natoms + a]));
        for (int w = 0; w < n; ++w)
          for (int v : frames[i].succ[w]) m.add_edge(w, v);
        PointedModel pm(std::move(m), 0);
        if (!detail::check_constraints(pm, cs)) throw std::logic_error("oracle witness failed re-verification");
        out.kind = SearchVerdict::Kind::Sat;
        out.witness = std::move(pm);
        out.nodes = used;
        return out;
      }
    }
  }
  out.kind = SearchVerdict::Kind::UnsatWithin;
  out.reason = "no model with at most " + std::to_string(b.max_worlds) + " worlds";
  out.nodes = used;
  return out;
}

inline SearchVerdict satisfiable(const std::vector<Formula>& gamma, const SearchBounds& b) {
  std::vector<Constraint> cs;
  for (const auto& f : gamma) cs.push_back({f, true});
  return search(cs, b);
}

struct ConsequenceVerdict {
  enum class Kind { Follows, Countermodel, Unknown };
  Kind kind = Kind::Unknown;
  std::optional<PointedModel> countermodel;
  std::string reason;

  bool follows() const { return kind == Kind::Follows; }
};

inline const char* to_string(ConsequenceVerdict::Kind k) {
  switch (k) {
    case ConsequenceVerdict::Kind::Follows: return "Follows";
    case ConsequenceVerdict::Kind::Countermodel: return "CountermodelFound";
    default: return "Unknown";
  }
}

// Truth preservation: every pointed model making all of `base` true makes `f` true.
inline ConsequenceVerdict consequence(const std::vector<Formula>& base, const Formula& f, const SearchBounds& b) {
  std::vector<Constraint> cs;
  for (const auto& g : base) cs.push_back({g, true});
  cs.push_back({f, false});
  SearchVerdict v = search(cs, b);
  ConsequenceVerdict out;
  if (v.unsat()) out.kind = ConsequenceVerdict::Kind::Follows;
  else if (v.sat()) {
    out.kind = ConsequenceVerdict::Kind::Countermodel;
    out.countermodel = std::move(v.witness);
  } else {
    out.kind = ConsequenceVerdict::Kind::Unknown;
  }
  out.reason = v.reason;
  return out;
}

enum class Consistency { Consistent, Inconsistent, Unknown };

inline const char* to_string(Consistency c) {
  switch (c) {
    case Consistency::Consistent: return "Consistent";
    case Consistency::Inconsistent: return "Inconsistent";
    default: return "Unknown";
  }
}

struct ConsistencyVerdict {
  Consistency value = Consistency::Unknown;
  // "point", "negation" or "search".
  std::string via;
  std::string reason;
};

inline ConsistencyVerdict consistent_with_point(const PointedModel& pm, const Formula& f, int depth,
                                                const SearchBounds& b) {
  if (f.has_announcement()) throw DynamicFormulaError();
  if (sat(pm, f)) return {Consistency::Consistent, "point", ""};
  if (sat_neg(pm, f)) return {Consistency::Inconsistent, "negation", ""};
  std::vector<Formula> gamma = prune_entailed(theory_slice(pm, depth).formulas);
  gamma.push_back(f);
  const SearchVerdict v = satisfiable(gamma, b);
  if (v.sat()) return {Consistency::Consistent, "search", ""};
  if (v.unsat()) return {Consistency::Inconsistent, "search", v.reason};
  return {Consistency::Unknown, "search", v.reason};
}

}  // namespace lei
