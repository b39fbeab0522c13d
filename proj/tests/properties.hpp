#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace smatv::testing {

// Each check runs `trials` seeded cases and returns a description of every
// failing case (empty = property holds).
using Failures = std::vector<std::string>;

// Splitting an edge and inserting a flat pad of x dB shifts every downstream
// level by exactly -x and leaves everything else untouched. Noise only
// moves (upwards) when an active stage sits below the pad.
Failures check_pad_linearity(std::uint64_t seed, int trials);

// An extra active stage without gain never improves C/N downstream; a cleaner source
// never worsens it.
Failures check_cnr_monotonic(std::uint64_t seed, int trials);

// combine_cnr ignores order and never beats the worst contribution.
Failures check_combine_cnr(std::uint64_t seed, int trials);

// within + outside == total, and the summary count agrees with the report.
Failures check_counting_identity(std::uint64_t seed, int trials);

// serialize -> parse -> serialize is the identity on random documents.
Failures check_round_trip(std::uint64_t seed, int trials);

// Two optimizer runs with one seed agree on every field.
Failures check_optimizer_determinism(std::uint64_t seed, int trials);

}  // namespace smatv::testing
