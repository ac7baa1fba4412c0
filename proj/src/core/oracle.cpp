#include "core/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "core/wide_uint.hpp"

namespace minplan {

namespace {

struct Enumerator {
  const SwitchedSystem& sys;
  double gamma;
  int length;  // horizon + 1 inputs
  OracleResult out;
  InputSequence prefix;

  void run(const State& x, double acc, double discount, int k) {
    if (k == length) {
      ++out.num_sequences;
      if (out.argmin_sequences.empty() || acc < out.value) {
        out.value = acc;
        out.argmin_sequences.clear();
        out.argmin_sequences.push_back(prefix);
      } else if (acc == out.value) {
        out.argmin_sequences.push_back(prefix);
      }
      return;
    }
    for (int u = 1; u <= sys.num_modes; ++u) {
      const double ell = stage_cost(sys, x, u);
      const State next = step(sys, x, u);
      prefix.push_back(u);
      run(next, acc + discount * ell, discount * gamma, k + 1);
      prefix.pop_back();
    }
  }
};

}  // namespace

OracleResult brute_force_value(const SwitchedSystem& sys, const State& x, int horizon,
                               double gamma, std::int64_t cap) {
  if (horizon < 0) fail(errc::invalid_argument, "brute_force_value: horizon must be >= 0");
  if (!(gamma > 0.0) || gamma > 1.0) {
    fail(errc::invalid_argument, "brute_force_value: gamma must lie in (0, 1]");
  }
  if (cap < 1) fail(errc::invalid_argument, "brute_force_value: cap must be >= 1");
  if (static_cast<int>(x.size()) != sys.state_dim) {
    fail(errc::invalid_argument, "brute_force_value: state dimension mismatch");
  }

  // Size the enumeration before doing any of it.
  WideUint total(1);
  for (int k = 0; k <= horizon; ++k) {
    total = total.mul_add(static_cast<std::uint64_t>(sys.num_modes), 0);
  }
  if (!total.fits_int64() || total.as_int64() > cap) {
    fail(errc::resource_limit, "brute_force_value: " + std::to_string(sys.num_modes) + "^" +
                                   std::to_string(horizon + 1) + " = " + total.str() +
                                   " sequences exceed the cap of " + std::to_string(cap));
  }

  Enumerator e{sys, gamma, horizon + 1, OracleResult{}, {}};
  e.prefix.reserve(static_cast<std::size_t>(horizon) + 1);
  e.run(x, 0.0, 1.0, 0);

  // Depth-first in mode order already yields lexicographic minimizers; keep the
  // guarantee explicit in case the enumeration is ever partitioned.
  std::sort(e.out.argmin_sequences.begin(), e.out.argmin_sequences.end());
  for (const auto& seq : e.out.argmin_sequences) {
    if (e.out.first_input_set.empty() || e.out.first_input_set.back() != seq.front()) {
      e.out.first_input_set.push_back(seq.front());
    }
  }
  e.out.first_input_set.erase(
      std::unique(e.out.first_input_set.begin(), e.out.first_input_set.end()),
      e.out.first_input_set.end());
  std::sort(e.out.first_input_set.begin(), e.out.first_input_set.end());
  return e.out;
}

ValueBracket bracket_infinite_value(const SwitchedSystem& sys, const State& x, double gamma,
                                    int horizon, const LinearBoundParams& params,
                                    std::int64_t cap) {
  validate_params(params);
  ValueBracket b;
  b.lower = brute_force_value(sys, x, horizon, gamma, cap).value;
  b.upper = b.lower + error_bound_linear(params, sigma(sys, x), horizon);
  return b;
}

}  // namespace minplan
