#pragma once

// Golden claims about the worked figures and examples. The models are built
// here so that the check does not depend on the working directory.

#include <string>
#include <vector>

#include "lei/formula.hpp"
#include "lei/model.hpp"
#include "lei/model_io.hpp"
#include "lei/semantics.hpp"
#include "lei/syntax.hpp"
#include "lei/update.hpp"

namespace lei {

struct FigureClaim {
  std::string figure;
  std::string claim;
  std::string expected;
  std::string actual;
  bool ok() const { return expected == actual; }
};

namespace figures {

inline KripkeModel fig1() {
  return load_model(
      "model fig1\n"
      "world w0 { p=T q=T r=T }\nworld w1 { p=F }\nworld w2 { p=F q=F }\nworld w3 { p=F }\n"
      "edge w0 w1\nedge w0 w2\nedge w0 w3\n");
}

inline KripkeModel fig2() {
  return load_model("model fig2\nworld w0 { p=T }\nworld w1 { p=F }\nworld w2 { }\nedge w0 w1\nedge w0 w2\n");
}

inline KripkeModel fig5() {
  return load_model(
      "model fig5\n"
      "world w0 { p=T q=T }\nworld w1 { }\nworld w2 { p=F q=T }\nworld w3 { p=F }\n"
      "edge w0 w1\nedge w0 w2\nedge w0 w3\n");
}

// One successor world with p neither true nor false.
inline KripkeModel fig8(TruthValue p_at_w0 = TruthValue::True) {
  KripkeModel m("fig8");
  m.add_world("w0");
  m.add_world("w1");
  m.add_atom("p");
  m.set_value(0, "p", p_at_w0);
  m.add_edge(0, 1);
  return m;
}

}  // namespace figures

namespace detail {

inline std::string show_atoms(const std::map<std::string, TruthValue>& atoms) {
  std::string s = "{";
  bool first = true;
  for (const auto& [a, v] : atoms) {
    if (v == TruthValue::Gap) continue;
    s += (first ? "" : ", ") + a + ":" + (v == TruthValue::True ? "T" : "F");
    first = false;
  }
  return s + "}";
}

inline std::string show_bool(bool b) { return b ? "true" : "false"; }

}  // namespace detail

inline std::vector<FigureClaim> run_figures(const UpdateOptions& opt = {}) {
  std::vector<FigureClaim> out;
  auto add = [&](std::string fig, std::string claim, std::string expected, std::string actual) {
    out.push_back({std::move(fig), std::move(claim), std::move(expected), std::move(actual)});
  };
  auto tv = [](TruthValue v) { return std::string(to_string(v)); };

  {
    const KripkeModel m = figures::fig1();
    add("Fig 1", "w0: I p & I q & I r", "True", tv(eval3(m, "w0", parse("I p & I q & I r"))));
    add("Fig 1", "w1: I p", "False", tv(eval3(m, "w1", parse("I p"))));
  }
  {
    const KripkeModel m = figures::fig2();
    const PointedModel pm(m, "w0");
    const auto keep = eliminative_announce(pm, parse("p"));
    add("Fig 3", "eliminating ~p-or-gap worlds of M1 leaves", "1 worlds",
        std::to_string(keep.model.num_worlds()) + " worlds");
    const auto drop = eliminative_announce(pm, parse("p"), EliminationMode::DropAntiSatisfying);
    add("Fig 4", "eliminating ~p worlds of M1 leaves", "2 worlds", std::to_string(drop.model.num_worlds()) + " worlds");
    const Formula a = parse("I p -> [p] I p");
    const Formula b = parse("~I (p -> p) -> [p] I (p -> p)");
    add("Fig 2-3", "eliminative, w0: " + render(a), "True", tv(eval_eliminative(pm, a)));
    add("Fig 2-3", "eliminative, w0: " + render(b), "True", tv(eval_eliminative(pm, b)));
    add("Fig 4", "eliminative variant, w0: " + render(a), "True",
        tv(eval_eliminative(pm, a, EliminationMode::DropAntiSatisfying)));
    add("Fig 2", "update, w0: " + render(a), "False", tv(eval_dynamic(pm, a, opt)));
    add("Fig 2", "update, w0: " + render(b), "False", tv(eval_dynamic(pm, b, opt)));
    add("Fig 2", "update, w0: [p] ~I p", "True", tv(eval_dynamic(pm, parse("[p] ~I p"), opt)));
  }
  {
    const PointedModel pm(figures::fig5(), "w0");
    const UpdateOutcome u = announce(pm, parse("p"), opt);
    add("Fig 5", "announce p at w0", "Updated", to_string(u.kind));
    if (u.updated()) {
      const int n = u.model.require_world(u.new_world);
      add("Fig 6", "new world atoms", "{p:T, q:T}", detail::show_atoms(u.atoms));
      add("Fig 6", "w0 after: ~I p & ~I q", "true", detail::show_bool(sat(u.model, 0, parse("~I p & ~I q"))));
      add("Fig 6", "new world: p & q", "true", detail::show_bool(sat(u.model, n, parse("p & q"))));
      add("Fig 6", "worlds and edges", "5 worlds, 7 edges",
          std::to_string(u.model.num_worlds()) + " worlds, " + std::to_string(u.model.num_edges()) + " edges");
    }
    add("Fig 5", "w0: [p] ~I q", "True", tv(eval_dynamic(pm, parse("[p] ~I q"), opt)));
    add("Fig 5", "w0 before: q & ~I q", "true", detail::show_bool(sat(pm, parse("q & ~I q"))));

    const UpdateOutcome v = announce(pm, parse("I p"), opt);
    add("Fig 5, I p", "announce I p at w0", "Updated", to_string(v.kind));
    if (v.updated()) {
      const int n = v.model.require_world(v.new_world);
      add("Fig 5, I p", "new world atoms", "{p:T, q:T}", detail::show_atoms(v.atoms));
      add("Fig 5, I p", "new world: I p", "true", detail::show_bool(sat(v.model, n, parse("I p"))));
      add("Fig 5, I p", "w0 after: ~I p", "true", detail::show_bool(sat(v.model, 0, parse("~I p"))));
    }

    const UpdateOutcome w = announce(pm, parse("~I q"), opt);
    add("Fig 7", "announce ~I q at w0", "Updated", to_string(w.kind));
    if (w.updated()) {
      const int n = w.model.require_world(w.new_world);
      add("Fig 7", "new world atoms", "{q:T}", detail::show_atoms(w.atoms));
      add("Fig 7", "w0 after: ~I q", "true", detail::show_bool(sat(w.model, 0, parse("~I q"))));
      add("Fig 7", "new world: ~I q", "true", detail::show_bool(sat(w.model, n, parse("~I q"))));
    }
  }
  {
    const PointedModel pm(figures::fig8(), "w0");
    add("Fig 8", "w0 before: I p", "true", detail::show_bool(sat(pm, parse("I p"))));
    const UpdateOutcome u = announce(pm, parse("p"), opt);
    add("Fig 9", "announce p at w0", "Updated", to_string(u.kind));
    if (u.updated()) add("Fig 9", "w0 after: ~I p", "true", detail::show_bool(sat(u.model, 0, parse("~I p"))));
    add("Fig 9", "w0: [p] I p", "False", tv(eval_dynamic(pm, parse("[p] I p"), opt)));
    const PointedModel pf(figures::fig8(TruthValue::False), "w0");
    add("Fig 8 variant", "p false at w0: [p] I p", "True", tv(eval_dynamic(pf, parse("[p] I p"), opt)));
  }
  return out;
}

}  // namespace lei
