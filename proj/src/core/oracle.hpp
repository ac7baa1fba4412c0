#pragma once

#include <cstdint>
#include <vector>

#include "core/bounds.hpp"
#include "core/system.hpp"

namespace minplan {

struct OracleResult {
  double value = 0.0;                            // exact minimum over all sequences
  std::vector<InputSequence> argmin_sequences;   // every exact minimizer, lexicographic
  std::vector<int> first_input_set;              // distinct first inputs of the minimizers
  std::int64_t num_sequences = 0;                // num_modes^(horizon+1), fully enumerated
};

// Exhaustive minimum of the horizon-d discounted cost over all
// num_modes^(horizon+1) mode sequences. Enumerates depth-first in mode order
// with an incremental cost accumulator (so shared prefixes are computed once
// and values compare bit-for-bit against the planner). Ties on the minimum are
// collected by exact float equality. The enumeration size is checked upfront
// against `cap` (errc::resource_limit when above).
OracleResult brute_force_value(const SwitchedSystem& sys, const State& x, int horizon,
                               double gamma, std::int64_t cap = 10'000'000);

struct ValueBracket {
  double lower = 0.0;  // exact horizon-D value
  double upper = 0.0;  // lower + linear error bound at horizon D
};

// Two-sided bracket on the infinite-horizon value from a finite horizon D:
// exact V at horizon D below, V plus the linear decay error bound above. Valid
// whenever the linear decay data genuinely bounds the system.
ValueBracket bracket_infinite_value(const SwitchedSystem& sys, const State& x, double gamma,
                                    int horizon, const LinearBoundParams& params,
                                    std::int64_t cap = 10'000'000);

}  // namespace minplan
