#include "pmctag/params.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace pmctag {

namespace {

constexpr double kTolerance = 1e-12;

// Sums are accumulated in extended precision so that rounding in the check
// itself does not dominate on large supports.
bool near_one(long double s) { return std::abs(s - 1.0L) <= kTolerance; }

}  // namespace

double probability_of(const WordDistribution& dist, WordId word) {
  auto it = std::lower_bound(dist.begin(), dist.end(), word,
                             [](const auto& entry, WordId w) { return entry.first < w; });
  return (it != dist.end() && it->first == word) ? it->second : 0.0;
}

double PmcParams::init(LabelId i, WordId k) const {
  auto it = initial.find({i, k});
  return it == initial.end() ? 0.0 : it->second;
}

double PmcParams::trans(LabelId i, WordId k, LabelId j) const {
  auto it = transition.find({i, k});
  return it == transition.end() ? 0.0 : it->second[j];
}

double PmcParams::emit(LabelId i, WordId k, LabelId j, WordId l) const {
  auto it = emission.find({i, k, j});
  return it == emission.end() ? 0.0 : probability_of(it->second, l);
}

std::string check_invariants(const HmcParams& hmc) {
  const std::size_t n = hmc.num_labels;
  std::ostringstream err;
  if (n == 0) return "hmc: empty label set";
  if (hmc.initial.size() != n || hmc.transition.size() != n * n || hmc.row_supported.size() != n) {
    return "hmc: table shapes disagree with label count";
  }
  long double pi_sum = 0.0;
  for (double p : hmc.initial) pi_sum += p;
  if (!near_one(pi_sum)) {
    err << "hmc: initial sums to " << pi_sum;
    return err.str();
  }
  std::vector<long double> emit_sum(n, 0.0);
  for (const auto& [key, p] : hmc.emission) {
    if (key.label >= n) return "hmc: emission label out of range";
    emit_sum[key.label] += p;
  }
  for (std::size_t i = 0; i < n; ++i) {
    long double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += hmc.transition[i * n + j];
    if (hmc.row_supported[i]) {
      if (!near_one(row)) {
        err << "hmc: transition row " << i << " sums to " << row;
        return err.str();
      }
      if (!near_one(emit_sum[i])) {
        err << "hmc: emission row " << i << " sums to " << emit_sum[i];
        return err.str();
      }
    } else if (row != 0.0 || emit_sum[i] != 0.0) {
      err << "hmc: unsupported row " << i << " carries mass";
      return err.str();
    }
  }
  return {};
}

std::string check_invariants(const PmcParams& pmc) {
  std::ostringstream err;
  long double pi_sum = 0.0;
  for (const auto& [key, p] : pmc.initial) pi_sum += p;
  if (!near_one(pi_sum)) {
    err << "pmc: initial sums to " << pi_sum;
    return err.str();
  }
  for (const auto& [key, row] : pmc.transition) {
    long double s = 0.0;
    for (double p : row) s += p;
    if (row.size() != pmc.num_labels || !near_one(s)) {
      err << "pmc: transition (" << key.label << "," << key.word << ") sums to " << s;
      return err.str();
    }
  }
  for (const auto& [key, dist] : pmc.emission) {
    long double s = 0.0;
    for (const auto& [w, p] : dist) s += p;
    if (!near_one(s)) {
      err << "pmc: emission (" << key.label << "," << key.word << "," << key.next_label
          << ") sums to " << s;
      return err.str();
    }
  }
  return {};
}

}  // namespace pmctag
