#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace lei;

namespace {

SuiteConfig small(int workers, std::uint64_t seed = 7) {
  SuiteConfig c;
  c.seed = seed;
  c.workers = workers;
  c.trials = 20;
  return c;
}

}  // namespace

TEST_CASE("small runs of every suite pass") {
  for (const auto& name : suite_names()) {
    CAPTURE(name);
    const SuiteResult r = run_suite(name, small(1));
    CHECK(r.passed());
    CHECK(r.attempts() > 0);
    CHECK_FALSE(r.report().empty());
  }
}

TEST_CASE("digests do not depend on the worker count") {
  for (const auto& name : suite_names()) {
    CAPTURE(name);
    const SuiteResult a = run_suite(name, small(1));
    const SuiteResult b = run_suite(name, small(4));
    const SuiteResult c = run_suite(name, small(1));
    CHECK(a.digest == b.digest);
    CHECK(a.digest == c.digest);
    CHECK(a.digest != run_suite(name, small(1, 8)).digest);
  }
}

TEST_CASE("instance seeds differ by group and index") {
  using detail::instance_seed;
  CHECK(instance_seed(1, 0, 0) == instance_seed(1, 0, 0));
  CHECK(instance_seed(1, 0, 0) != instance_seed(1, 0, 1));
  CHECK(instance_seed(1, 0, 0) != instance_seed(1, 1, 0));
  CHECK(instance_seed(1, 0, 0) != instance_seed(2, 0, 0));
}

TEST_CASE("an unsound scheme is caught") {
  const AxiomScheme fake{"FAKE", parse("phi -> I phi"), System::LEI};
  int violated = 0;
  for (int i = 0; i < 200; ++i)
    if (detail::axiom_instance(fake, detail::instance_seed(3, 0, i)).verdict == detail::Verdict::Violated) ++violated;
  CHECK(violated > 0);
  const AxiomScheme fake2{"FAKE2", parse("I phi -> I (phi & psi)"), System::LEI};
  violated = 0;
  for (int i = 0; i < 400; ++i)
    if (detail::axiom_instance(fake2, detail::instance_seed(3, 1, i)).verdict == detail::Verdict::Violated) ++violated;
  CHECK(violated > 0);
}

TEST_CASE("unknown suites are rejected") { CHECK_THROWS_AS(run_suite("nope", small(1)), Error); }
