#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>

#include "support.hpp"

using namespace lei;

TEST_CASE("every figure claim reproduces") {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<FigureClaim> claims = run_figures();
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(claims.size() >= 25);
  for (const auto& c : claims) {
    CAPTURE(c.figure);
    CAPTURE(c.claim);
    CAPTURE(c.actual);
    CHECK(c.ok());
  }
  CHECK(s < 5.0);
}

TEST_CASE("built figures match the fixtures") {
  CHECK(figures::fig1() == lei::test::fixture("fig1.model"));
  CHECK(figures::fig2() == lei::test::fixture("fig2.model"));
  CHECK(figures::fig5() == lei::test::fixture("fig5.model"));
  CHECK(figures::fig8() == lei::test::fixture("fig8.model"));
  CHECK(figures::fig8(TruthValue::False) == lei::test::fixture("fig8_false.model"));
}
