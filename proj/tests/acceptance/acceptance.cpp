// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "support/criteria.hpp"

using namespace mlw;
using namespace mlw::testing;

namespace {

int failures = 0;

void report(const char* name, const std::function<Outcome()>& f) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = f();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s %-28s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
  std::fflush(stdout);
}

}  // namespace

int main() {
  Sizes sz;
  TheoryLibrary lib;

  SoundnessReport sound;
  report("soundness", [&] {
    sound = soundness_run(sz);
    return soundness(sound, 1000);
  });
  report("proved_impl_wf", [&] { return proved_wf(sound); });
  report("fixpoint_oracle", [&] { return fixpoint_oracle(sz); });
  report("substitution_lemmas", [&] { return substitution_lemmas(sz); });
  report("counterexample_model", [&] { return counterexample(lib); });
  report("definedness_lemmas", [&] { return definedness_lemmas(lib, sz); });
  report("overlapping_variables_script", [&] { return overlapping_script(lib); });
  report("transitive_closure", [&] { return transitive_closure(lib, sz); });
  report("parser_roundtrip", [&] { return parser_roundtrip(sz); });
  report("tauto_truth_table", [&] { return tauto_agreement(tauto_run(sz)); });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
