#pragma once

#include <cstddef>

#include "pmctag/evaluation.hpp"
#include "pmctag/inference.hpp"
#include "pmctag/training.hpp"

namespace pmctag {

// Trains the HMC-only path and the full PMC bundle `repetitions` times each,
// then decodes `test` (MPM) with both modes the same number of times.
BenchmarkReport run_benchmark(const LabeledCorpus& train_corpus, const LabeledCorpus& test,
                              const TrainConfig& config, std::size_t repetitions,
                              const ResolveOptions& pmc_options = {});

}  // namespace pmctag
