#pragma once

#include <utility>
#include <vector>

#include "hetbandit/dataset.hpp"

namespace hetbandit::bench {

// small fixed synthetic instance shared by the microbenchmarks
inline const Dataset& small_dataset() {
  static const SynthResult res = [] {
    SynthSpec spec;
    spec.target_count = 500;
    spec.signal_count = 500;
    spec.distractor_count = 500;
    spec.seed = 17;
    return generate_synthetic(spec);
  }();
  return res.dataset;
}

}  // namespace hetbandit::bench
