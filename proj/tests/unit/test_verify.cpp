#include "doctest.h"
#include "sparsebonus/error.hpp"
#include "sparsebonus/verify.hpp"

using namespace sparsebonus;

TEST_CASE("verify_statistics passes at default tolerances") {
  const auto rep = verify_statistics(VerifyOptions{100'000, 12345, 0.8});
  CHECK(rep.passed());
  CHECK(rep.checks.size() > 20);
  for (const auto& c : rep.checks)
    if (!c.passed) MESSAGE(c.name << " measured " << c.measured << " expected " << c.expected);
}

TEST_CASE("mis-set mix oracle (0.5 instead of 0.8) is caught") {
  const auto rep = verify_statistics(VerifyOptions{100'000, 12345, 0.5});
  CHECK_FALSE(rep.passed());
  bool mix_failed = false;
  for (const auto& c : rep.checks)
    if (!c.passed) {
      CHECK(c.name.find("mix") != std::string::npos);
      mix_failed = true;
    }
  CHECK(mix_failed);
}

TEST_CASE("same seed gives identical measurements") {
  const auto a = verify_statistics(VerifyOptions{100'000, 7, 0.8});
  const auto b = verify_statistics(VerifyOptions{100'000, 7, 0.8});
  REQUIRE(a.checks.size() == b.checks.size());
  for (std::size_t i = 0; i < a.checks.size(); ++i) CHECK(a.checks[i].measured == b.checks[i].measured);
  CHECK(a.format() == b.format());
}

TEST_CASE("too few iterations is a precondition failure") {
  CHECK_THROWS_AS(verify_statistics(VerifyOptions{99'999, 1, 0.8}), ContractViolation);
}

TEST_CASE("chi-square and KS helpers") {
  CHECK(chi_square_uniform_pvalue({1000, 1000, 1000, 1000}) == doctest::Approx(1.0));
  CHECK(chi_square_uniform_pvalue({4000, 0, 0, 0}) < 1e-10);
  CHECK(ks_uniform_statistic({0.5}) == doctest::Approx(0.5));
  Rng r = Rng::seed_root(3);
  std::vector<double> u(100'000);
  for (double& v : u) v = r.next_uniform();
  CHECK(ks_uniform_statistic(u) < 0.006);
}
