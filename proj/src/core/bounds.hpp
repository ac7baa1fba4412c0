#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "core/errors.hpp"

namespace minplan {

// Strictly increasing continuous function with f(0) = 0 (class K); `unbounded`
// additionally claims class K-infinity. `inverse` is optional: when absent,
// invert() bisects after growing the initial bracket [0, domain_hint]
// geometrically. `is_zero` marks the identically-zero function, which is only
// legal for the W upper bound (the W == 0 case).
struct ComparisonFunction {
  std::function<double(double)> fn;
  std::function<double(double)> inverse;
  double domain_hint = 1.0;
  bool unbounded = true;
  bool is_zero = false;
};

ComparisonFunction linear_comparison(double gain);
ComparisonFunction zero_comparison();

// Probes f(0) == 0, strict monotonicity on a geometric sample grid, and (when
// `unbounded`) that doubling the argument keeps growing the value past any
// fixed target. Throws errc::domain on violation.
void validate_comparison_function(const ComparisonFunction& f, bool allow_zero = false);

// Solves f(s) = y for s >= 0. Uses the exact inverse when present; otherwise
// expands [0, domain_hint] by doubling until f brackets y (at most 60
// doublings, errc::inversion_range beyond that) and bisects until
// |f(s) - y| <= max(1e-12, 1e-10 * y).
double invert(const ComparisonFunction& f, double y);

// Linear decay data: alpha_W(s) = a_w s, value upper bound a_v_bar s, W upper
// bound a_w_bar s (a_w_bar = 0 encodes W == 0).
struct LinearBoundParams {
  double a_w = 1.0;
  double a_v_bar = 1.0;
  double a_w_bar = 0.0;
};

// a_w > 0, a_v_bar > 0, a_w_bar >= 0, and a_w <= a_v_bar + a_w_bar (the
// sandwich the two sides of the Lyapunov bound must respect).
void validate_params(const LinearBoundParams& p);

// General decay data: the three comparison functions of the stabilizability /
// detectability assumption. The derived pair is alpha_Y = alpha_w and
// alpha_Y_bar = alpha_v_bar + alpha_w_bar; `alpha_y_bar_inverse` may carry an
// exact inverse of that sum (installed by from_linear), otherwise the sum is
// inverted by bisection.
struct AssumptionOneData {
  ComparisonFunction alpha_w;      // lower bound on the one-step cost decrease (K-infinity)
  ComparisonFunction alpha_v_bar;  // upper bound on the infinite-horizon value
  ComparisonFunction alpha_w_bar;  // upper bound on W (zero function allowed)
  std::function<double(double)> alpha_y_bar_inverse;

  static AssumptionOneData from_linear(const LinearBoundParams& p);
};

void validate_assumption_data(const AssumptionOneData& d);

double alpha_y(const AssumptionOneData& d, double s);
double alpha_y_bar(const AssumptionOneData& d, double s);
double alpha_y_inv(const AssumptionOneData& d, double y);
double alpha_y_bar_inv(const AssumptionOneData& d, double y);

// Applies s <- (s - alpha_Y(alpha_Y_bar^{-1}(s))) / gamma for `steps`
// iterations. Round-off can push an analytically nonnegative iterate slightly
// negative: magnitudes within the documented clamp window snap to 0; growth
// past 1e300 raises errc::divergence naming the offending step (possible when
// a small gamma makes the map expansive).
double contraction_iterate(const AssumptionOneData& d, double s0, double gamma,
                           std::int64_t steps);

// Gap between the horizon-d value and the infinite-horizon value:
// gamma^d * alpha_v_bar(alpha_Y^{-1}(iterate^d(alpha_Y_bar(sigma_x)))).
double error_bound_general(const AssumptionOneData& d, double sigma_x, double gamma,
                           std::int64_t horizon);

// Linear specialization, independent of gamma:
// (a_v_bar (a_v_bar + a_w_bar) / a_w) * (1 - a_w/(a_v_bar+a_w_bar))^horizon * sigma_x.
double error_bound_linear(const LinearBoundParams& p, double sigma_x, std::int64_t horizon);

// One-step Lyapunov relaxation bound:
// (1 - gamma) s + gamma^d_bar * alpha_v_bar(alpha_Y^{-1}(iterate^d_bar(s))).
double upsilon(const AssumptionOneData& d, double s, double gamma, std::int64_t d_bar);

// Decay-feasibility threshold: discounts above gamma_bar = 1 - a_w/(a_v_bar+a_w_bar)
// admit a horizon satisfying the decay condition.
double gamma_bar(const LinearBoundParams& p);

// Strict decay condition for exponential closed-loop contraction:
// 1 - gamma_star + (a_v_bar/a_w)(1 - a_w/(a_v_bar+a_w_bar))^d_bar < a_w/(a_v_bar+a_w_bar).
// No epsilon: the margin must be strictly positive.
bool ges_condition(const LinearBoundParams& p, double gamma_star, std::int64_t d_bar);
double ges_margin(const LinearBoundParams& p, double gamma_star, std::int64_t d_bar);

// Smallest d_bar satisfying the decay condition at gamma_star;
// errc::infeasible when no horizon can (gamma_star <= gamma_bar).
std::int64_t min_d_bar(const LinearBoundParams& p, double gamma_star);

// Closed-form horizon threshold
// floor( ln(a_v_bar (a_v_bar+a_w_bar) / a_w^2) / -ln(1 - a_w/(a_v_bar+a_w_bar)) ),
// with a guarded floor: a value within 1e-12 above an integer is floored one
// lower, so float noise never over-claims the threshold. Never negative.
std::int64_t d_tilde(const LinearBoundParams& p);

// Exponential-contraction certificate: sigma(phi(k)) <= K sigma(x) e^{-lambda k}.
struct StabilityCertificate {
  double k_overshoot = 1.0;  // K >= 1
  double lambda_decay = 0.0; // lambda > 0
  double gamma_star = 1.0;   // in (0, 1]
  std::int64_t d_bar = 0;
  enum class Provenance { fitted, user_supplied } provenance = Provenance::user_supplied;
};

// Shape checks only: K >= 1 (for fitted certificates), lambda > 0,
// gamma_star in (0, 1], d_bar >= 0.
void validate_certificate(const StabilityCertificate& c);

struct CertificateCheck {
  bool ges_holds = false;
  double margin = 0.0;
  bool k_at_least_one = false;
};

// Whether the decay condition backs (gamma_star, d_bar); surfaced as a report
// because certificates fitted from finite runs rarely reach the horizon the
// strict condition demands.
CertificateCheck check_certificate(const StabilityCertificate& c, const LinearBoundParams& p);

// Receding-horizon running-cost gap
// (1 - a_w/(a_v_bar+a_w_bar))^d_bar * K a_v_bar (a_v_bar+a_w_bar) gamma / (a_w (e^lambda - gamma)).
// Requires gamma in (gamma_star, 1] and e^lambda > gamma.
double running_cost_gap(const LinearBoundParams& p, const StabilityCertificate& cert,
                        double gamma, std::int64_t d_bar);

// Same gap relative to the value scale: running_cost_gap / a_w.
double relative_performance_bound(const LinearBoundParams& p, const StabilityCertificate& cert,
                                  double gamma, std::int64_t d_bar);

}  // namespace minplan
