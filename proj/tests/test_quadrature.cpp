// Quadrature tests: rule exactness, adaptivity on endpoint singularities,
// half-line integrals with heavy tails, and oscillatory cosine transforms
// against closed forms and frozen high-precision reference values.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <dephase/errors.hpp>
#include <dephase/quadrature.hpp>

using dephase::cosine_transform;
using dephase::integrate_adaptive;
using dephase::integrate_halfline;

TEST_CASE("polynomials are integrated to near machine precision") {
  for (const int k : {2, 7, 13, 20}) {
    auto f = [k](double x) { return std::pow(x, k); };
    const double got = integrate_adaptive(f, 0.0, 1.0, 1e-12);
    CHECK(std::abs(got - 1.0 / (k + 1)) < 1e-13);
  }
}

TEST_CASE("smooth transcendental integrals") {
  const double pi = 3.14159265358979323846;
  CHECK(std::abs(integrate_adaptive([](double x) { return std::sin(x); }, 0.0,
                                    pi, 1e-12) -
                 2.0) < 1e-12);
  CHECK(std::abs(integrate_adaptive([](double x) { return std::exp(-x * x); },
                                    -8.0, 8.0, 1e-12) -
                 std::sqrt(pi)) < 1e-11);
}

TEST_CASE("adaptive bisection resolves an endpoint singularity") {
  auto f = [](double x) { return 1.0 / std::sqrt(x); };
  const double got = integrate_adaptive(f, 0.0, 1.0, 1e-8, 2000);
  CHECK(std::abs(got - 2.0) < 1e-8);
}

TEST_CASE("unreachable tolerance raises with the achieved tolerance attached") {
  auto f = [](double x) { return std::pow(x, -0.9); };
  try {
    integrate_adaptive(f, 0.0, 1.0, 1e-13, 10);
    FAIL("expected IntegrationError");
  } catch (const dephase::IntegrationError& e) {
    CHECK(e.achieved_tolerance > 1e-13);
  }
}

TEST_CASE("half-line integrals: exponential, power tail, finite support") {
  CHECK(std::abs(integrate_halfline([](double x) { return std::exp(-x); },
                                    1e-10) -
                 1.0) < 1e-10);
  // int_0^inf (1+x)^(-5/2) dx = 2/3
  CHECK(std::abs(integrate_halfline(
                     [](double x) { return std::pow(1.0 + x, -2.5); }, 1e-9) -
                 2.0 / 3.0) < 1e-9);
  CHECK(std::abs(integrate_halfline([](double x) { return x * x; }, 1e-12, 1.0,
                                    3.0) -
                 9.0) < 1e-11);
}

TEST_CASE("cosine transform reproduces closed forms") {
  // 2 int_0^inf e^(-d) cos(3d) dd = 2/(1+9)
  CHECK(std::abs(cosine_transform([](double d) { return std::exp(-d); }, 3.0,
                                  1e-10) -
                 0.2) < 1e-9);
  // Cauchy density -> e^(-t)
  const double inv_pi = 0.31830988618379067;
  auto cauchy = [inv_pi](double d) { return inv_pi / (1.0 + d * d); };
  CHECK(std::abs(cosine_transform(cauchy, 1.0, 1e-8) - std::exp(-1.0)) < 1e-8);
  CHECK(std::abs(cosine_transform(cauchy, 0.0, 1e-8) - 1.0) < 1e-8);
  // Standard normal density -> e^(-t^2/2)
  const double inv_sqrt2pi = 0.39894228040143268;
  auto normal = [inv_sqrt2pi](double d) {
    return inv_sqrt2pi * std::exp(-0.5 * d * d);
  };
  CHECK(std::abs(cosine_transform(normal, 2.0, 1e-10) - std::exp(-2.0)) <
        1e-9);
}

TEST_CASE("cosine transform with finite support hits the box closed form") {
  // even box density of half-width 1 (value 1 on [0,1]):
  // 2 int_0^1 cos(dt) dd = 2 sin(t)/t, signed (not a magnitude).
  auto box = [](double) { return 1.0; };
  for (const double t : {0.5, 2.0, 5.0, 11.0}) {
    const double expect = 2.0 * std::sin(t) / t;
    CHECK(std::abs(cosine_transform(box, t, 1e-12, 1.0, 1.0) - expect) <
          1e-11);
  }
}

TEST_CASE("cosine transform handles a heavy-tailed density") {
  // Unnormalized Student-like density with r = 1/2, delta0 = 1:
  // g(d) = C * (1 + d^2/r)^(-(1+r)/2) with C = 0.26967630059418968, for which
  // the transform at t = 0.5 and t = 1 has frozen 25-digit reference values.
  const double C = 0.26967630059418968;
  auto heavy = [C](double d) { return C * std::pow(1.0 + 2.0 * d * d, -0.75); };
  CHECK(std::abs(cosine_transform(heavy, 0.5, 1e-8) - 0.45930272952102811) <
        1e-8);
  CHECK(std::abs(cosine_transform(heavy, 1.0, 1e-8) - 0.28618221034154811) <
        1e-8);
  CHECK(std::abs(cosine_transform(heavy, 0.0, 1e-8) - 1.0) < 1e-7);
}
