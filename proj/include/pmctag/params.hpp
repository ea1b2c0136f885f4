#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "pmctag/counts.hpp"
#include "pmctag/error.hpp"
#include "pmctag/keys.hpp"

namespace pmctag {

// Sparse distribution over word ids, sorted by id.
using WordDistribution = std::vector<std::pair<WordId, double>>;

double probability_of(const WordDistribution& dist, WordId word);

// Homogeneous hidden Markov chain: pi(i), a_i(j), b_i(k).
struct HmcParams {
  std::size_t num_labels = 0;
  std::vector<double> initial;
  std::vector<double> transition;  // row-major N x N
  std::vector<bool> row_supported;  // false: label never followed by anything
  HashMap<LabelWord, double> emission;

  double trans(LabelId i, LabelId j) const { return transition[i * num_labels + j]; }
  double emit(LabelId i, WordId k) const {
    auto it = emission.find({i, k});
    return it == emission.end() ? 0.0 : it->second;
  }

  friend bool operator==(const HmcParams&, const HmcParams&) = default;
};

// Homogeneous pairwise Markov chain over z_t = (x_t, y_t). Absent keys carry
// probability zero.
struct PmcParams {
  std::size_t num_labels = 0;
  // pi(i,k) = p(x_1 = i, y_1 = k)
  HashMap<LabelWord, double> initial;
  // a_{i,k}(j) = p(x_{t+1} = j | x_t = i, y_t = k), dense over j
  HashMap<LabelWord, std::vector<double>> transition;
  // b_{i,j,k}(l) = p(y_{t+1} = l | x_t = i, x_{t+1} = j, y_t = k)
  HashMap<LabelWordLabel, WordDistribution> emission;

  double init(LabelId i, WordId k) const;
  double trans(LabelId i, WordId k, LabelId j) const;
  double emit(LabelId i, WordId k, LabelId j, WordId l) const;

  friend bool operator==(const PmcParams&, const PmcParams&) = default;
};

// Empirical frequencies count / total. Throws kEmptySupport when every count
// is zero (including an empty map).
template <typename Key, typename CountT>
std::map<Key, double> normalize_counts(const std::map<Key, CountT>& counts) {
  CountT total{};
  for (const auto& [key, c] : counts) total += c;
  if (total == CountT{}) throw Error(ErrorCode::kEmptySupport, "normalize_counts: no positive count");
  std::map<Key, double> out;
  for (const auto& [key, c] : counts) {
    out.emplace(key, static_cast<double>(c) / static_cast<double>(total));
  }
  return out;
}

// Row-stochasticity and normalization checks, tolerance 1e-12. Returns an
// empty string when the tables are valid, otherwise the first violation.
std::string check_invariants(const HmcParams& hmc);
std::string check_invariants(const PmcParams& pmc);

}  // namespace pmctag
