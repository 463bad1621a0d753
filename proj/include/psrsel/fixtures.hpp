#pragma once

#include <string>
#include <vector>

#include "psrsel/hankel.hpp"

namespace psrsel {

// The built-in environments the test suite exercises, with their pinned
// construction seeds.
struct FixtureSpec {
  std::string name;
  std::uint64_t seed;
};
const std::vector<FixtureSpec>& builtin_fixtures();

// A small deterministic basis for serialization and rank checks: tests of
// length <= 2 and the empty history plus histories of length <= 2, each
// capped at `cap` entries in shortlex order.
Basis fixture_basis(int num_actions, int num_obs, int cap = 40);

// Writes every built-in fixture POMDP and its exact Hankel dump into dir
// (created by the caller).  Output is byte-identical across runs.
void write_fixture_files(const std::string& dir);

}  // namespace psrsel
