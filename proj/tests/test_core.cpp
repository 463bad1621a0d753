#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdint>
#include <vector>

#include "psrsel/core.hpp"
#include "psrsel/errors.hpp"
#include "psrsel/rng.hpp"

using namespace psrsel;

namespace {

Sequence seq(std::initializer_list<ActionObs> pairs) {
  return Sequence(std::vector<ActionObs>(pairs));
}

Sequence random_sequence(Rng& rng, int num_actions, int num_obs,
                         int max_len) {
  const int len = rng.uniform_int(max_len + 1);
  std::vector<ActionObs> pairs;
  pairs.reserve(static_cast<std::size_t>(len));
  for (int i = 0; i < len; ++i)
    pairs.push_back({rng.uniform_int(num_actions), rng.uniform_int(num_obs)});
  return Sequence(std::move(pairs));
}

}  // namespace

TEST_CASE("concat joins histories and tests") {
  const Sequence empty;
  const Sequence h = seq({{0, 1}});
  const Sequence t = seq({{1, 0}, {0, 0}});

  CHECK(concat(empty, t) == t);
  CHECK(concat(h, empty) == h);
  CHECK(concat(h, t) == seq({{0, 1}, {1, 0}, {0, 0}}));
  CHECK(concat(h, t).length() == 3);
}

TEST_CASE("concat is associative") {
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const Sequence a = random_sequence(rng, 3, 3, 4);
    const Sequence b = random_sequence(rng, 3, 3, 4);
    const Sequence c = random_sequence(rng, 3, 3, 4);
    CHECK(concat(concat(a, b), c) == concat(a, concat(b, c)));
  }
}

TEST_CASE("sequence rendering") {
  CHECK(Sequence().to_string() == "e");
  CHECK(seq({{0, 1}}).to_string() == "a0o1");
  CHECK(seq({{0, 1}, {2, 0}}).to_string() == "a0o1.a2o0");
}

TEST_CASE("enumerate_tests counts match the geometric series") {
  // |A||O| = p nonempty tests per extra pair: p + p^2 + ... + p^L.
  CHECK(enumerate_tests(1, 1, 1).size() == 1);
  CHECK(enumerate_tests(2, 1, 2).size() == 2 + 4);
  CHECK(enumerate_tests(2, 2, 2).size() == 4 + 16);
  CHECK(enumerate_tests(3, 2, 2).size() == 4 + 16 + 64);
  CHECK(enumerate_tests(2, 3, 3).size() == 9 + 81);
}

TEST_CASE("enumerate_tests yields distinct sequences in shortlex order") {
  const std::vector<Sequence> tests = enumerate_tests(2, 3, 3);
  for (std::size_t i = 1; i < tests.size(); ++i) {
    CHECK(tests[i - 1] < tests[i]);  // strict: sorted and duplicate-free
  }
  // Shortlex: lengths never decrease.
  for (std::size_t i = 1; i < tests.size(); ++i)
    CHECK(tests[i - 1].length() <= tests[i].length());
}

TEST_CASE("enumerate_tests refuses combinatorial blowups") {
  CHECK_THROWS_AS(enumerate_tests(7, 10, 10), InsufficientCandidates);
}

TEST_CASE("codec round-trips sequences") {
  const SequenceCodec codec(3, 4);
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const Sequence s = random_sequence(rng, 3, 4, codec.max_pairs());
    const std::uint64_t key = codec.encode(s);
    CHECK(codec.decode(key) == s);
  }
  CHECK(codec.decode(codec.empty_key()) == Sequence());
}

TEST_CASE("codec key order equals shortlex order") {
  const SequenceCodec codec(2, 3);
  Rng rng(13);
  for (int i = 0; i < 500; ++i) {
    const Sequence a = random_sequence(rng, 2, 3, 6);
    const Sequence b = random_sequence(rng, 2, 3, 6);
    const bool key_less = codec.encode(a) < codec.encode(b);
    CHECK(key_less == (a < b));
  }
}

TEST_CASE("codec distinguishes dangling actions from pairs") {
  const SequenceCodec codec(2, 2);
  const std::uint64_t base = codec.encode(seq({{1, 0}}));
  const std::uint64_t with_a0 = codec.append_action(base, 0);
  const std::uint64_t with_a1 = codec.append_action(base, 1);
  const std::uint64_t with_pair = codec.append_pair(base, 0, 0);
  CHECK(with_a0 != with_a1);
  CHECK(with_a0 != with_pair);
  CHECK(with_a1 != with_pair);
  // Action-terminated keys are not decodable sequences.
  CHECK_THROWS_AS(codec.decode(with_a0), DimensionMismatch);
}

TEST_CASE("codec rejects sequences beyond its capacity") {
  const SequenceCodec codec(3, 3);
  std::vector<ActionObs> pairs(static_cast<std::size_t>(codec.max_pairs()) + 1,
                               {0, 0});
  CHECK_THROWS_AS(codec.encode(Sequence(std::move(pairs))), DimensionMismatch);
}

TEST_CASE("dataset validates its alphabet") {
  const Sequence good = seq({{0, 1}, {1, 0}});
  CHECK(TrajectoryDataset({good}, 2, 2).total_steps() == 2);
  CHECK_THROWS_AS(TrajectoryDataset({seq({{2, 0}})}, 2, 2), DimensionMismatch);
  CHECK_THROWS_AS(TrajectoryDataset({seq({{0, 2}})}, 2, 2), DimensionMismatch);
  CHECK_THROWS_AS(TrajectoryDataset({good}, 0, 2), ConfigError);
}

TEST_CASE("dataset sums steps across trajectories") {
  const TrajectoryDataset data({seq({{0, 0}}), seq({{1, 1}, {0, 1}})}, 2, 2);
  CHECK(data.total_steps() == 3);
  CHECK(data.trajectories().size() == 2);
}
