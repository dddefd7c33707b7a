// Simulate the shipped one-epoch / ten-epoch pair and measure the speedup
// with the multi-epoch curve cut after 1..10 epochs.
#include <cstdio>
#include <string>

#include "oneepoch/epoch_sim.hpp"
#include "oneepoch/io.hpp"
#include "oneepoch/speedup.hpp"

using namespace oneepoch;

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : ONEEPOCH_PRESET_DIR;
  try {
    const auto multi_cfg = io::sim_from_doc(io::load_config(dir + "/d512_10epoch.ini"));
    const auto single_cfg = io::sim_from_doc(io::load_config(dir + "/d512_one_epoch.ini"));
    const auto multi = simulate(multi_cfg).test;
    const auto single = simulate(single_cfg).test;
    const double per_epoch = multi_cfg.dataset_tokens / multi_cfg.tokens_per_iter;

    std::printf("epochs  best-at  reached-at  speedup\n");
    for (int e = 1; e <= multi_cfg.epochs(); ++e) {
      const auto r = epoch_speedup(single, multi, per_epoch, e);
      std::printf("%6d  %7.0f  %10.1f  %7.3f\n", e, r.baseline_iters, r.target_iters, r.speedup);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "%s: %s\n", std::string(to_string(e.code())).c_str(), e.what());
    return 1;
  }
}
