#include "psrsel/fixtures.hpp"

#include <filesystem>

#include "psrsel/env.hpp"
#include "psrsel/io.hpp"

namespace psrsel {

const std::vector<FixtureSpec>& builtin_fixtures() {
  static const std::vector<FixtureSpec> specs = {
      {"two-state-noisy", 0},   {"ring-world", 0},
      {"random-pomdp-4-2-2", 3}, {"random-pomdp-5-2-3", 7},
      {"mini-grid", 0},
  };
  return specs;
}

Basis fixture_basis(int num_actions, int num_obs, int cap) {
  std::vector<Sequence> tests = enumerate_tests(2, num_actions, num_obs);
  if (static_cast<int>(tests.size()) > cap)
    tests.resize(static_cast<std::size_t>(cap));
  std::vector<Sequence> histories;
  histories.emplace_back();
  for (const Sequence& t : enumerate_tests(2, num_actions, num_obs)) {
    if (static_cast<int>(histories.size()) >= cap) break;
    histories.push_back(t);
  }
  return Basis{std::move(tests), std::move(histories)};
}

void write_fixture_files(const std::string& dir) {
  const std::filesystem::path base(dir);
  for (const FixtureSpec& spec : builtin_fixtures()) {
    const Pomdp model = make_builtin(spec.name, spec.seed);
    const std::string stem =
        spec.seed == 0 ? spec.name
                       : spec.name + "-seed" + std::to_string(spec.seed);
    write_text_file((base / (stem + ".pomdp")).string(), dump_pomdp(model));
    const Basis basis = fixture_basis(model.num_actions(), model.num_obs());
    write_text_file((base / (stem + ".hankel")).string(),
                    dump_hankel(exact_hankel(model, basis)));
  }
}

}  // namespace psrsel
