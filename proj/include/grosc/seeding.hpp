#pragma once

#include <cstdint>

namespace grosc {

/// One splitmix64 output step.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for task `index` under `master`: the (index+1)-th output of a
/// splitmix64 stream whose state starts at master. Independent of the order
/// in which tasks are executed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace grosc
