#pragma once

#include <cstdint>
#include <string_view>

namespace drlab::harness {

/// FNV-1a over the bytes of a string.
std::uint64_t fnv1a64(std::string_view text);

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic sub-seed derivation: every stochastic stage draws its seed
/// as sub_seed(master, stage_name, index). Changing the master seed changes
/// every sub-seed; fixing it freezes them all.
std::uint64_t sub_seed(std::uint64_t master, std::string_view stage, std::uint64_t index);

}  // namespace drlab::harness
