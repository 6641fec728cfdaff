// lei: command line front end.
//
// Exit codes: 0 ok, 1 property or claim failure, 2 usage or input error,
// 3 inconclusive oracle under --on-unknown=error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "lei/lei.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;
constexpr int kUnknown = 3;

struct Bounds {
  std::string on_unknown = "error";
  int depth = -1;
  int max_worlds = 4;
  int workers = 1;

  lei::UpdateOptions options() const {
    lei::UpdateOptions o;
    o.bounds.max_worlds = max_worlds;
    o.bounds.workers = workers;
    if (depth >= 0) o.depth = depth;
    if (on_unknown == "assume-consistent") o.on_unknown = lei::OnUnknown::AssumeConsistent;
    else if (on_unknown == "assume-inconsistent") o.on_unknown = lei::OnUnknown::AssumeInconsistent;
    return o;
  }
};

void add_bounds(CLI::App* cmd, Bounds& b) {
  cmd->add_option("--on-unknown", b.on_unknown, "error | assume-consistent | assume-inconsistent")
      ->check(CLI::IsMember({"error", "assume-consistent", "assume-inconsistent"}));
  cmd->add_option("--depth", b.depth, "theory-slice depth (default: modal depth of the announcement + 1)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--max-worlds", b.max_worlds, "world bound for the countermodel search")->check(CLI::Range(1, 8));
  cmd->add_option("--workers", b.workers, "search threads")->check(CLI::Range(1, 256));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw lei::Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_out(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw lei::Error("cannot write " + path);
  out << text;
}

bool has_trans_lines(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto p = line.find_first_not_of(" \t");
    if (p != std::string::npos && line.compare(p, 5, "trans") == 0) return true;
  }
  return false;
}

int cmd_eval(const std::string& file, const std::string& world, const std::string& text, const Bounds& b) {
  const std::string src = read_file(file);
  const lei::Formula f = lei::parse(text);
  if (has_trans_lines(src)) {
    const lei::ExtendedModel em = lei::load_extended_model(src);
    const bool pos = lei::sat_plus(em, world, f), neg = lei::sat_plus_neg(em, world, f);
    std::cout << (pos ? "True" : neg ? "False" : "Gap") << "\n";
    std::cout << "sat_plus: " << (pos ? "true" : "false") << "\nsat_plus_neg: " << (neg ? "true" : "false") << "\n";
    return kOk;
  }
  const lei::KripkeModel m = lei::load_model(src);
  const lei::PointedModel pm(m, world);
  const lei::TruthValue v = f.is_static() ? lei::eval3(m, pm.point, f) : lei::eval_dynamic(pm, f, b.options());
  std::cout << lei::to_string(v) << "\n";
  std::cout << "sat: " << (v == lei::TruthValue::True ? "true" : "false")
            << "\nsat_neg: " << (v == lei::TruthValue::False ? "true" : "false") << "\n";
  return kOk;
}

int cmd_announce(const std::string& file, const std::string& world, const std::string& text, const std::string& out,
                 const Bounds& b) {
  const lei::PointedModel pm(lei::load_model(read_file(file)), world);
  const lei::UpdateOutcome u = lei::announce(pm, lei::parse(text), b.options());
  switch (u.kind) {
    case lei::UpdateOutcome::Kind::Inconsistent:
      std::cout << "INCONSISTENT\n";
      if (!u.reason.empty()) std::cerr << u.reason << "\n";
      return kOk;
    case lei::UpdateOutcome::Kind::Unknown:
      std::cout << "UNKNOWN\n";
      std::cerr << u.reason << "\n";
      return kUnknown;
    case lei::UpdateOutcome::Kind::Updated: break;
  }
  if (!u.reason.empty()) std::cerr << u.reason << "\n";
  if (!u.realized) std::cerr << "warning: the announcement does not hold at " << u.new_world << "\n";
  std::cerr << "new world " << u.new_world << "\n";
  write_out(out, lei::save_model(u.model));
  return kOk;
}

int cmd_solve(const std::vector<std::string>& texts, const std::string& out, const Bounds& b) {
  std::vector<lei::Formula> gamma;
  for (const auto& t : texts) gamma.push_back(lei::parse(t));
  lei::SearchBounds sb = b.options().bounds;
  const lei::SearchVerdict v = lei::satisfiable(gamma, sb);
  if (v.sat()) {
    std::cout << "SAT at " << v.witness->point_id() << "\n";
    write_out(out, lei::save_model(v.witness->model));
    return kOk;
  }
  if (v.unsat()) {
    std::cout << "UNSAT<=" << sb.max_worlds << "\n";
    return kOk;
  }
  std::cout << "UNKNOWN\n";
  if (!v.reason.empty()) std::cerr << v.reason << "\n";
  return b.on_unknown == "error" ? kUnknown : kOk;
}

int cmd_check_proof(const std::string& file, const std::string& system, bool flat) {
  const lei::Derivation d = lei::parse_script(read_file(file));
  lei::CheckOptions opt;
  if (auto s = lei::parse_system(system)) opt.system = *s;
  else throw CLI::ValidationError("--system", "unknown system " + system);
  const lei::CheckReport rep = lei::check_derivation(d, opt);
  for (const auto& l : rep.lines)
    std::cout << l.number << ". " << (l.ok ? "ok" : "error: " + l.reason) << "\n";
  if (flat && rep.ok()) std::cout << lei::print_script(lei::flatten(d));
  std::cout << (rep.ok() ? "proof ok" : "proof rejected") << "\n";
  return rep.ok() ? kOk : kFail;
}

int cmd_validate(const std::string& suite, lei::SuiteConfig cfg) {
  if (const char* env = std::getenv("LEI_SEED")) {
    try {
      cfg.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw CLI::ValidationError("LEI_SEED", std::string("not a number: ") + env);
    }
  }
  std::vector<std::string> names = suite == "all" ? lei::suite_names() : std::vector<std::string>{suite};
  bool ok = true;
  for (const auto& n : names) {
    const lei::SuiteResult r = lei::run_suite(n, cfg);
    std::cout << r.report();
    ok = ok && r.passed();
  }
  return ok ? kOk : kFail;
}

int cmd_dot(const std::string& file) {
  const std::string src = read_file(file);
  if (has_trans_lines(src)) std::cout << lei::to_dot(lei::load_extended_model(src));
  else std::cout << lei::to_dot(lei::load_model(src));
  return kOk;
}

int cmd_figures(const Bounds& b) {
  int bad = 0;
  for (const auto& c : lei::run_figures(b.options())) {
    std::cout << (c.ok() ? "PASS " : "FAIL ") << c.figure << ": " << c.claim << " -> " << c.actual;
    if (!c.ok()) std::cout << " (expected " << c.expected << ")";
    std::cout << "\n";
    bad += c.ok() ? 0 : 1;
  }
  std::cout << (bad ? std::to_string(bad) + " claim(s) failed" : std::string("all claims hold")) << "\n";
  return bad ? kFail : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Excusable ignorance: models, updates, proofs"};
  app.require_subcommand(1);

  Bounds bounds;
  std::string model, world, formula, out, system = "LEIup";
  std::vector<std::string> formulas;
  bool flat = false;

  auto* eval = app.add_subcommand("eval", "evaluate a formula at a world");
  eval->add_option("-m,--model", model, "model or extended-model file")->required();
  eval->add_option("-w,--world", world, "world id")->required();
  eval->add_option("-f,--formula", formula, "formula")->required();
  add_bounds(eval, bounds);

  auto* announce = app.add_subcommand("announce", "apply the additive update");
  announce->add_option("-m,--model", model, "model file")->required();
  announce->add_option("-w,--world", world, "world id")->required();
  announce->add_option("-f,--formula", formula, "static formula to announce")->required();
  announce->add_option("-o,--out", out, "output model file (default stdout)");
  add_bounds(announce, bounds);

  auto* solve = app.add_subcommand("solve", "bounded satisfiability of a formula set");
  solve->add_option("-f,--formula", formulas, "formula (repeatable)")->required();
  solve->add_option("-o,--out", out, "witness model file (default stdout)");
  add_bounds(solve, bounds);

  auto* check = app.add_subcommand("check-proof", "check a proof script");
  check->add_option("file", model, "proof script")->required();
  check->add_option("--system", system, "Lt2 | LEI | LEIup");
  check->add_flag("--flatten", flat, "print the macro-free derivation");

  lei::SuiteConfig cfg;
  cfg.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string suite;
  auto* validate = app.add_subcommand("validate", "randomized property suites");
  validate->add_option("--suite", suite, "soundness | equivalence | update | extmodel | all")
      ->required()
      ->check(CLI::IsMember({"soundness", "equivalence", "update", "extmodel", "all"}));
  validate->add_option("--trials", cfg.trials, "instances per group (0: suite default)")->check(CLI::NonNegativeNumber);
  validate->add_option("--seed", cfg.seed, "seed (LEI_SEED overrides)");
  validate->add_option("--workers", cfg.workers, "worker threads")->check(CLI::Range(1, 256));
  validate->add_option("--on-unknown", bounds.on_unknown, "error | assume-consistent | assume-inconsistent")
      ->check(CLI::IsMember({"error", "assume-consistent", "assume-inconsistent"}));
  validate->add_option("--depth", bounds.depth, "theory-slice depth")->check(CLI::NonNegativeNumber);
  validate->add_option("--max-worlds", bounds.max_worlds, "world bound for the countermodel search")
      ->check(CLI::Range(1, 8));

  auto* dot = app.add_subcommand("dot", "Graphviz text for a model");
  dot->add_option("-m,--model", model, "model or extended-model file")->required();

  auto* figures = app.add_subcommand("figures", "rebuild the worked figures and check every claim");
  add_bounds(figures, bounds);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*eval) return cmd_eval(model, world, formula, bounds);
    if (*announce) return cmd_announce(model, world, formula, out, bounds);
    if (*solve) return cmd_solve(formulas, out, bounds);
    if (*check) return cmd_check_proof(model, system, flat);
    if (*validate) {
      cfg.update = bounds.options();
      return cmd_validate(suite, cfg);
    }
    if (*dot) return cmd_dot(model);
    if (*figures) return cmd_figures(bounds);
  } catch (const lei::OracleInconclusive& e) {
    std::cout << "UNKNOWN\n";
    std::cerr << e.what() << "\n";
    return kUnknown;
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const lei::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
