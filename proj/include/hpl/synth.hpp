#pragma once

// Synthetic instances drawn from the prototype model itself: classes share
// super-prototypes through codes Z, with P = D_v Z and Y = D_c Z.

#include <cstdint>

#include "hpl/model.hpp"

namespace hpl {

struct SynthSpec {
  int d = 20;
  int k = 10;
  int q = 6;
  int m = 8;
  int n = 5;
  int samples_per_class = 50;
  int samples_per_unseen_class = 50;
  // Seen-class samples mixed into the test pool for generalized evaluation.
  int seen_test_per_class = 0;
  double noise_sigma = 0.05;
  // Minimum pairwise prototype distance, in units of noise_sigma.
  double separation = 10.0;
  std::uint64_t seed = 7;

  void validate() const;
};

struct SynthData {
  LabeledFeatureSet seen;
  UnlabeledFeatureSet unseen;
  ModelState truth;
};

/// Throws GenerationError if no prototype set with the requested separation
/// is found within 1000 draws.
SynthData synth_generate(const SynthSpec& spec);

}  // namespace hpl
