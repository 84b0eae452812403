#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "minimax/vec.hpp"

namespace minimax {

/// One sample z = (features, label). Labels are +-1 for classification
/// problems and arbitrary reals for estimation problems.
struct Example {
  Vec features;
  double label = 0.0;
};

/// Ordered sample list. Order matters: stochastic methods index into it.
struct Dataset {
  std::vector<Example> examples;

  std::size_t n() const { return examples.size(); }

  std::size_t feature_dim() const {
    return examples.empty() ? 0 : examples.front().features.size();
  }

  void validate() const {
    if (examples.empty())
      throw std::invalid_argument("dataset: must contain at least one example");
    const std::size_t d = examples.front().features.size();
    for (const Example& e : examples) {
      if (e.features.size() != d)
        throw std::invalid_argument("dataset: inconsistent feature dimension");
      if (!is_finite(e.features) || !std::isfinite(e.label))
        throw std::invalid_argument("dataset: non-finite entry");
    }
  }

  double positive_fraction() const {
    std::size_t pos = 0;
    for (const Example& e : examples)
      if (e.label > 0.0) ++pos;
    return static_cast<double>(pos) / static_cast<double>(examples.size());
  }
};

}  // namespace minimax
