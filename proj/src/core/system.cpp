#include "core/system.hpp"

#include <cmath>
#include <cstdio>

#include "core/rng.hpp"

namespace minplan {

namespace {

void check_state_dim(const SwitchedSystem& sys, const State& x, const char* who) {
  if (static_cast<int>(x.size()) != sys.state_dim) {
    fail(errc::invalid_argument, std::string(who) + ": state has dimension " +
                                     std::to_string(x.size()) + ", system expects " +
                                     std::to_string(sys.state_dim));
  }
}

void check_mode(const SwitchedSystem& sys, int mode, const char* who) {
  if (mode < 1 || mode > sys.num_modes) {
    fail(errc::invalid_argument, std::string(who) + ": mode " + std::to_string(mode) +
                                     " outside 1.." + std::to_string(sys.num_modes));
  }
}

bool all_finite(const State& x) {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace

State step(const SwitchedSystem& sys, const State& x, int mode) {
  check_state_dim(sys, x, "step");
  check_mode(sys, mode, "step");
  State next = sys.next(x, mode);
  if (static_cast<int>(next.size()) != sys.state_dim) {
    fail(errc::internal, "step: dynamics returned a state of wrong dimension");
  }
  if (!all_finite(next)) {
    fail(errc::numeric_overflow, "step: non-finite state produced under mode " +
                                     std::to_string(mode));
  }
  return next;
}

double stage_cost(const SwitchedSystem& sys, const State& x, int mode) {
  check_state_dim(sys, x, "stage_cost");
  check_mode(sys, mode, "stage_cost");
  double ell = sys.stage_cost(x, mode);
  if (!std::isfinite(ell)) {
    fail(errc::numeric_overflow, "stage_cost: non-finite cost under mode " +
                                     std::to_string(mode));
  }
  if (ell < 0.0) {
    fail(errc::domain, "stage_cost: negative cost " + std::to_string(ell) + " under mode " +
                           std::to_string(mode));
  }
  return ell;
}

double sigma(const SwitchedSystem& sys, const State& x) {
  check_state_dim(sys, x, "sigma");
  double s = sys.sigma(x);
  if (!std::isfinite(s) || s < 0.0) {
    fail(errc::domain, "sigma: indicator must be finite and nonnegative");
  }
  return s;
}

RolloutResult rollout(const SwitchedSystem& sys, const State& x0, const InputSequence& seq,
                      double gamma) {
  if (seq.empty()) {
    fail(errc::invalid_argument, "rollout: input sequence must be nonempty");
  }
  if (!(gamma > 0.0) || gamma > 1.0) {
    fail(errc::invalid_argument, "rollout: gamma must lie in (0, 1]");
  }
  check_state_dim(sys, x0, "rollout");
  if (!all_finite(x0)) {
    fail(errc::invalid_argument, "rollout: initial state is not finite");
  }

  RolloutResult out;
  out.states.reserve(seq.size() + 1);
  out.states.push_back(x0);
  double w = 1.0;  // gamma^k, accumulated multiplicatively
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const State& xk = out.states.back();
    double ell;
    State next;
    try {
      ell = stage_cost(sys, xk, seq[k]);
      next = step(sys, xk, seq[k]);
    } catch (const Error& e) {
      if (e.code() == errc::numeric_overflow) {
        fail(errc::numeric_overflow,
             "rollout: " + std::string(e.what()) + " (at step " + std::to_string(k) + ")");
      }
      throw;
    }
    out.cost += w * ell;
    w *= gamma;
    out.states.push_back(std::move(next));
  }
  return out;
}

void validate_system(const SwitchedSystem& sys, std::uint64_t seed, int samples, double box) {
  if (sys.state_dim < 1 || sys.num_modes < 1) {
    fail(errc::invalid_argument, "validate_system: state_dim and num_modes must be >= 1");
  }
  if (!sys.next || !sys.stage_cost || !sys.sigma) {
    fail(errc::invalid_argument, "validate_system: next/stage_cost/sigma must all be set");
  }
  SplitMix64 rng(seed);
  State x(static_cast<std::size_t>(sys.state_dim));
  for (int i = 0; i < samples; ++i) {
    for (auto& v : x) v = rng.uniform(-box, box);
    (void)sigma(sys, x);  // throws errc::domain on violation
    for (int u = 1; u <= sys.num_modes; ++u) {
      (void)stage_cost(sys, x, u);
    }
  }
}

SwitchedSystem make_cubic_integrator() {
  // Third mode gain: the positive root of 3t^2 + 3t - 1 = 0.
  static const double kThirdGain = -0.5 + std::sqrt(7.0 / 12.0);

  auto gain = [](const State& x, int mode) -> double {
    switch (mode) {
      case 1: return -x[0];
      case 2: return std::cbrt(x[1]);
      default: return kThirdGain * std::cbrt(x[1]);
    }
  };

  SwitchedSystem sys;
  sys.name = "cubic_integrator";
  sys.state_dim = 2;
  sys.num_modes = 3;
  sys.next = [gain](const State& x, int mode) -> State {
    const double u = gain(x, mode);
    return {x[0] + u, x[1] + u * u * u};
  };
  sys.stage_cost = [gain](const State& x, int mode) -> double {
    const double u = gain(x, mode);
    return std::abs(x[0] * x[0] * x[0]) + std::abs(x[1]) + std::abs(u * u * u);
  };
  sys.sigma = [](const State& x) -> double {
    return std::abs(x[0] * x[0] * x[0]) + std::abs(x[1]);
  };
  validate_system(sys);
  return sys;
}

SwitchedSystem make_zero_cost_fixture(int state_dim, int num_modes) {
  if (state_dim < 1 || num_modes < 1) {
    fail(errc::invalid_argument, "zero_cost_fixture: state_dim and num_modes must be >= 1");
  }
  SwitchedSystem sys;
  sys.name = "zero_cost_fixture";
  sys.state_dim = state_dim;
  sys.num_modes = num_modes;
  sys.next = [](const State& x, int) -> State { return x; };
  sys.stage_cost = [](const State&, int) -> double { return 0.0; };
  sys.sigma = [](const State&) -> double { return 0.0; };
  validate_system(sys);
  return sys;
}

RandomAffineSystem make_random_affine(const RandomAffineParams& params) {
  if (params.state_dim < 1 || params.num_modes < 1) {
    fail(errc::invalid_argument, "random_affine: state_dim and num_modes must be >= 1");
  }
  if (params.cost_kind != "weighted" && params.cost_kind != "sigma") {
    fail(errc::invalid_argument,
         "random_affine: cost kind must be \"weighted\" or \"sigma\", got \"" +
             params.cost_kind + "\"");
  }
  const int n = params.state_dim;
  const int m = params.num_modes;
  const bool sigma_cost = params.cost_kind == "sigma";

  SplitMix64 rng(params.seed);
  // One matrix per mode, flattened row-major; plus per-mode offset and cost gains.
  std::vector<std::vector<double>> mats(static_cast<std::size_t>(m));
  std::vector<std::vector<double>> offsets(static_cast<std::size_t>(m));
  std::vector<double> cost_gain(static_cast<std::size_t>(m));
  std::vector<double> cost_floor(static_cast<std::size_t>(m));
  double contraction = 0.0;

  for (int u = 0; u < m; ++u) {
    auto& a = mats[static_cast<std::size_t>(u)];
    a.resize(static_cast<std::size_t>(n) * n);
    double frob2 = 0.0;
    for (auto& v : a) {
      v = rng.uniform(-1.0, 1.0);
      frob2 += v * v;
    }
    const double frob = std::sqrt(frob2);
    // Scale to a target Frobenius norm: |A x| <= ||A||_F |x| bounds every mode,
    // and makes mode 1 a guaranteed contraction when requested.
    double target;
    if (u == 0 && params.contractive) {
      target = rng.uniform(0.3, 0.7);
      contraction = target;
    } else {
      target = rng.uniform(0.5, 1.3);
    }
    const double scale = frob > 0.0 ? target / frob : 0.0;
    for (auto& v : a) v *= scale;

    auto& b = offsets[static_cast<std::size_t>(u)];
    b.resize(static_cast<std::size_t>(n), 0.0);
    if (!sigma_cost) {
      // Small offsets keep the instance genuinely affine without destroying
      // boundedness over the handful of steps the search explores.
      for (auto& v : b) v = rng.uniform(-0.2, 0.2);
    }
    cost_gain[static_cast<std::size_t>(u)] = rng.uniform(0.5, 1.5);
    cost_floor[static_cast<std::size_t>(u)] = rng.uniform(0.05, 0.3);
  }

  auto norm2 = [](const State& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
  };

  RandomAffineSystem out;
  out.contraction = params.contractive ? contraction : 0.0;
  out.a_v_bar = (sigma_cost && params.contractive) ? 1.0 / (1.0 - contraction) : 0.0;

  SwitchedSystem sys;
  sys.name = "random_affine";
  sys.state_dim = n;
  sys.num_modes = m;
  sys.next = [n, mats, offsets](const State& x, int mode) -> State {
    const auto& a = mats[static_cast<std::size_t>(mode - 1)];
    const auto& b = offsets[static_cast<std::size_t>(mode - 1)];
    State y(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
      double acc = b[static_cast<std::size_t>(i)];
      for (int j = 0; j < n; ++j) {
        acc += a[static_cast<std::size_t>(i) * n + j] * x[static_cast<std::size_t>(j)];
      }
      y[static_cast<std::size_t>(i)] = acc;
    }
    return y;
  };
  if (sigma_cost) {
    sys.stage_cost = [norm2](const State& x, int) -> double { return norm2(x); };
  } else {
    sys.stage_cost = [norm2, cost_gain, cost_floor](const State& x, int mode) -> double {
      const double nx = norm2(x);
      return cost_gain[static_cast<std::size_t>(mode - 1)] * nx * nx +
             cost_floor[static_cast<std::size_t>(mode - 1)];
    };
  }
  sys.sigma = [norm2](const State& x) -> double { return norm2(x); };
  validate_system(sys);
  out.system = std::move(sys);
  return out;
}

}  // namespace minplan
