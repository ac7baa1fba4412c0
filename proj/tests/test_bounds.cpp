#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <string>

#include "core/bounds.hpp"

using namespace minplan;

namespace {

template <typename F>
int error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return static_cast<int>(e.code());
  } catch (...) {
    return -2;
  }
  return -1;
}

LinearBoundParams reference_params() {
  // a_w = 1, a_v_bar = 14, a_w_bar = 0: contraction ratio 1/14, the setting
  // all frozen constants below were derived for with 60-digit arithmetic.
  LinearBoundParams p;
  p.a_w = 1.0;
  p.a_v_bar = 14.0;
  p.a_w_bar = 0.0;
  return p;
}

}  // namespace

TEST_CASE("comparison functions: linear, zero, and bisection inversion") {
  auto lin = linear_comparison(3.0);
  CHECK(lin.fn(2.0) == 6.0);
  CHECK(invert(lin, 6.0) == 2.0);
  CHECK_NOTHROW(validate_comparison_function(lin));
  CHECK(error_code_of([] { linear_comparison(0.0); }) ==
        static_cast<int>(errc::invalid_argument));
  CHECK(error_code_of([] { linear_comparison(-2.0); }) ==
        static_cast<int>(errc::invalid_argument));

  auto zero = zero_comparison();
  CHECK(zero.is_zero);
  CHECK_NOTHROW(validate_comparison_function(zero, /*allow_zero=*/true));
  CHECK(error_code_of([&] { validate_comparison_function(zero, false); }) ==
        static_cast<int>(errc::domain));
  CHECK(error_code_of([&] { invert(zero, 1.0); }) ==
        static_cast<int>(errc::inversion_range));

  SUBCASE("no inverse provided: bisection solves a cubic") {
    ComparisonFunction cubic;
    cubic.fn = [](double s) { return s * s * s; };
    CHECK_NOTHROW(validate_comparison_function(cubic));
    CHECK(invert(cubic, 8.0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(invert(cubic, 0.0) == 0.0);
    CHECK(error_code_of([&] { invert(cubic, -1.0); }) ==
          static_cast<int>(errc::invalid_argument));
  }

  SUBCASE("bounded function cannot be inverted past its range") {
    ComparisonFunction sat;
    sat.fn = [](double s) { return s / (1.0 + s); };  // saturates at 1
    sat.unbounded = false;
    CHECK_NOTHROW(validate_comparison_function(sat));
    CHECK(error_code_of([&] { invert(sat, 2.0); }) ==
          static_cast<int>(errc::inversion_range));
  }
}

TEST_CASE("comparison function validation catches shape violations") {
  ComparisonFunction f;
  f.fn = [](double s) { return s + 1.0; };  // f(0) != 0
  CHECK(error_code_of([&] { validate_comparison_function(f); }) ==
        static_cast<int>(errc::domain));

  f.fn = [](double) { return 0.0; };  // constant, not flagged zero
  CHECK(error_code_of([&] { validate_comparison_function(f); }) ==
        static_cast<int>(errc::domain));

  f.fn = [](double s) { return -s; };  // decreasing
  CHECK(error_code_of([&] { validate_comparison_function(f); }) ==
        static_cast<int>(errc::domain));

  f.fn = [](double s) { return s / (1.0 + s); };  // saturating but claims K-infinity
  f.unbounded = true;
  CHECK(error_code_of([&] { validate_comparison_function(f); }) ==
        static_cast<int>(errc::domain));

  ComparisonFunction unset;
  CHECK(error_code_of([&] { validate_comparison_function(unset); }) ==
        static_cast<int>(errc::invalid_argument));
}

TEST_CASE("linear parameter validation") {
  CHECK_NOTHROW(validate_params(reference_params()));
  LinearBoundParams p = reference_params();
  p.a_w = 0.0;
  CHECK(error_code_of([&] { validate_params(p); }) == static_cast<int>(errc::domain));
  p = reference_params();
  p.a_v_bar = -1.0;
  CHECK(error_code_of([&] { validate_params(p); }) == static_cast<int>(errc::domain));
  p = reference_params();
  p.a_w_bar = -0.5;
  CHECK(error_code_of([&] { validate_params(p); }) == static_cast<int>(errc::domain));
  p = reference_params();
  p.a_w = 20.0;  // lower bound above the upper bound
  CHECK(error_code_of([&] { validate_params(p); }) == static_cast<int>(errc::domain));
}

TEST_CASE("assumption data from linear parameters carries exact inverses") {
  LinearBoundParams p;
  p.a_w = 2.0;
  p.a_v_bar = 5.0;
  p.a_w_bar = 3.0;
  auto d = AssumptionOneData::from_linear(p);
  CHECK_NOTHROW(validate_assumption_data(d));
  CHECK(alpha_y(d, 3.0) == 6.0);
  CHECK(alpha_y_bar(d, 3.0) == 24.0);
  CHECK(alpha_y_inv(d, 6.0) == 3.0);
  CHECK(alpha_y_bar_inv(d, 24.0) == 3.0);

  SUBCASE("the zero W bound is accepted, a missing alpha_w is not") {
    auto dz = AssumptionOneData::from_linear(reference_params());
    CHECK(dz.alpha_w_bar.is_zero);
    CHECK_NOTHROW(validate_assumption_data(dz));
    AssumptionOneData bad = dz;
    bad.alpha_w.unbounded = false;
    CHECK(error_code_of([&] { validate_assumption_data(bad); }) ==
          static_cast<int>(errc::domain));
  }
}

TEST_CASE("contraction iteration matches its closed form in the linear case") {
  auto d = AssumptionOneData::from_linear(reference_params());
  // Map: s <- (s - s/14) / gamma = s * (13/14) / gamma.
  for (double gamma : {1.0, 0.95}) {
    for (int k : {0, 1, 5, 40}) {
      const double expected = 2.0 * std::pow((13.0 / 14.0) / gamma, k);
      CHECK(contraction_iterate(d, 2.0, gamma, k) ==
            doctest::Approx(expected).epsilon(1e-12));
    }
  }

  CHECK(contraction_iterate(d, 0.0, 1.0, 100) == 0.0);
  CHECK(error_code_of([&] { contraction_iterate(d, -1.0, 1.0, 5); }) ==
        static_cast<int>(errc::invalid_argument));
  CHECK(error_code_of([&] { contraction_iterate(d, 1.0, 0.0, 5); }) ==
        static_cast<int>(errc::invalid_argument));
  CHECK(error_code_of([&] { contraction_iterate(d, 1.0, 1.0, -1); }) ==
        static_cast<int>(errc::invalid_argument));

  SUBCASE("an expansive map at small gamma trips the divergence guard") {
    // ratio 13/14 over gamma = 0.2 grows by ~4.6x per step.
    CHECK(error_code_of([&] { contraction_iterate(d, 1.0, 0.2, 10000); }) ==
          static_cast<int>(errc::divergence));
  }
}

TEST_CASE("general error bound collapses to the linear closed form") {
  auto p = reference_params();
  auto d = AssumptionOneData::from_linear(p);
  for (double gamma : {0.7, 0.9, 1.0}) {
    for (std::int64_t horizon : {0, 1, 3, 10, 30, 60}) {
      for (double s : {0.5, 2.0, 100.0}) {
        const double general = error_bound_general(d, s, gamma, horizon);
        const double closed = error_bound_linear(p, s, horizon);
        // The linear closed form is gamma-independent; the general route must
        // land on it for every discount.
        CHECK(general == doctest::Approx(closed).epsilon(1e-10));
      }
    }
  }
  CHECK(error_bound_linear(p, 0.0, 5) == 0.0);
  CHECK(error_code_of([&] { error_bound_linear(p, -1.0, 5); }) ==
        static_cast<int>(errc::invalid_argument));
  CHECK(error_code_of([&] { error_bound_general(d, 1.0, 1.0, -2); }) ==
        static_cast<int>(errc::invalid_argument));
}

TEST_CASE("one-step relaxation bound at gamma = 1 is the pure tail term") {
  auto d = AssumptionOneData::from_linear(reference_params());
  // (1-gamma) s vanishes, leaving alpha_v_bar(iterate^d(s)) = 14 s (13/14)^d.
  CHECK(upsilon(d, 2.0, 1.0, 5) == doctest::Approx(19.33012286547272).epsilon(1e-12));
  CHECK(upsilon(d, 0.0, 1.0, 5) == 0.0);
  // At gamma < 1 the (1-gamma) s term is added on top.
  const double g = 0.9;
  const double tail = 14.0 * 2.0 * std::pow((13.0 / 14.0) / g, 5) * std::pow(g, 5);
  CHECK(upsilon(d, 2.0, g, 5) ==
        doctest::Approx((1.0 - g) * 2.0 + tail).epsilon(1e-12));
  CHECK(error_code_of([&] { upsilon(d, 1.0, 1.0, -1); }) ==
        static_cast<int>(errc::invalid_argument));
}

TEST_CASE("decay threshold and feasibility frontier") {
  auto p = reference_params();
  CHECK(gamma_bar(p) == 13.0 / 14.0);
  CHECK(gamma_bar(p) == doctest::Approx(0.9285714285714286).epsilon(1e-15));

  SUBCASE("frozen margins around the minimal horizon at gamma_star = 1") {
    CHECK(ges_margin(p, 1.0, 71) == doctest::Approx(-0.0011846185651484843).epsilon(1e-10));
    CHECK(ges_margin(p, 1.0, 72) == doctest::Approx(0.004002037862974366).epsilon(1e-10));
    CHECK_FALSE(ges_condition(p, 1.0, 71));
    CHECK(ges_condition(p, 1.0, 72));
    CHECK(min_d_bar(p, 1.0) == 72);
  }

  SUBCASE("discounts at or below the threshold are infeasible at any horizon") {
    CHECK(error_code_of([&] { min_d_bar(p, 13.0 / 14.0); }) ==
          static_cast<int>(errc::infeasible));
    CHECK(error_code_of([&] { min_d_bar(p, 0.9); }) ==
          static_cast<int>(errc::infeasible));
  }

  SUBCASE("minimal horizon is self-consistent across parameter sets") {
    for (double a_v_bar : {2.0, 5.0, 14.0}) {
      for (double gamma_star : {0.97, 1.0}) {
        LinearBoundParams q;
        q.a_w = 1.0;
        q.a_v_bar = a_v_bar;
        q.a_w_bar = 0.0;
        if (1.0 - gamma_star >= q.a_w / (q.a_v_bar + q.a_w_bar)) continue;
        const std::int64_t d = min_d_bar(q, gamma_star);
        CHECK(ges_condition(q, gamma_star, d));
        if (d > 0) CHECK_FALSE(ges_condition(q, gamma_star, d - 1));
      }
    }
  }

  CHECK(error_code_of([&] { ges_margin(p, 0.0, 5); }) ==
        static_cast<int>(errc::invalid_argument));
  CHECK(error_code_of([&] { ges_margin(p, 1.0, -1); }) ==
        static_cast<int>(errc::invalid_argument));
}

TEST_CASE("horizon threshold d_tilde with the guarded floor") {
  CHECK(d_tilde(reference_params()) == 71);

  LinearBoundParams p;
  p.a_w = 1.0;
  p.a_v_bar = 1.0;
  p.a_w_bar = 0.0;
  CHECK(d_tilde(p) == 0);  // log argument is exactly 1

  p.a_w = 2.0;
  p.a_v_bar = 2.0;
  CHECK(d_tilde(p) == 0);  // ratio 1: one-step contraction

  // Knife edge: log(4)/(-log(1/2)) evaluates to exactly 2.0 in floats; the
  // guard floors it to 1 rather than over-claiming the threshold.
  p.a_w = 1.0;
  p.a_v_bar = 2.0;
  p.a_w_bar = 0.0;
  CHECK(d_tilde(p) == 1);
}

TEST_CASE("certificate validation and the decay check") {
  StabilityCertificate c;
  c.k_overshoot = 2.0;
  c.lambda_decay = 0.1;
  c.gamma_star = 1.0;
  c.d_bar = 72;
  c.provenance = StabilityCertificate::Provenance::fitted;
  CHECK_NOTHROW(validate_certificate(c));

  SUBCASE("fitted certificates must not claim K below 1") {
    StabilityCertificate low = c;
    low.k_overshoot = 0.5;
    CHECK(error_code_of([&] { validate_certificate(low); }) ==
          static_cast<int>(errc::domain));
    low.provenance = StabilityCertificate::Provenance::user_supplied;
    CHECK_NOTHROW(validate_certificate(low));
  }

  SUBCASE("shape violations") {
    StabilityCertificate bad = c;
    bad.lambda_decay = 0.0;
    CHECK(error_code_of([&] { validate_certificate(bad); }) ==
          static_cast<int>(errc::domain));
    bad = c;
    bad.gamma_star = 1.5;
    CHECK(error_code_of([&] { validate_certificate(bad); }) ==
          static_cast<int>(errc::domain));
    bad = c;
    bad.d_bar = -3;
    CHECK(error_code_of([&] { validate_certificate(bad); }) ==
          static_cast<int>(errc::domain));
  }

  SUBCASE("check_certificate reports the margin without throwing") {
    auto p = reference_params();
    auto ok = check_certificate(c, p);
    CHECK(ok.ges_holds);
    CHECK(ok.margin == doctest::Approx(0.004002037862974366).epsilon(1e-10));
    CHECK(ok.k_at_least_one);
    StabilityCertificate shallow = c;
    shallow.d_bar = 10;
    auto no = check_certificate(shallow, p);
    CHECK_FALSE(no.ges_holds);
    CHECK(no.margin < 0.0);
  }
}

TEST_CASE("receding-horizon running-cost gap: frozen value and domain") {
  auto p = reference_params();
  StabilityCertificate c;
  c.k_overshoot = 2.0;
  c.lambda_decay = 0.1;
  c.gamma_star = 13.0 / 14.0;  // gap is defined for gamma strictly above this
  c.d_bar = 72;

  CHECK(running_cost_gap(p, c, 1.0, 72) ==
        doctest::Approx(17.951188164761984).epsilon(1e-9));
  CHECK(relative_performance_bound(p, c, 1.0, 72) ==
        doctest::Approx(17.951188164761984 / p.a_w).epsilon(1e-9));

  // gamma must exceed the certificate's gamma_star.
  CHECK(error_code_of([&] { running_cost_gap(p, c, 13.0 / 14.0, 72); }) ==
        static_cast<int>(errc::invalid_argument));
  CHECK(error_code_of([&] { running_cost_gap(p, c, 0.5, 72); }) ==
        static_cast<int>(errc::invalid_argument));
  CHECK(error_code_of([&] { running_cost_gap(p, c, 1.0, -1); }) ==
        static_cast<int>(errc::invalid_argument));

  SUBCASE("gap shrinks geometrically in the horizon") {
    const double g0 = running_cost_gap(p, c, 1.0, 10);
    const double g1 = running_cost_gap(p, c, 1.0, 11);
    CHECK(g1 == doctest::Approx(g0 * 13.0 / 14.0).epsilon(1e-12));
  }
}
