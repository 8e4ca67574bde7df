#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "slobench/errors.hpp"

namespace slobench {

struct BatchStats {
  std::vector<double> mu;
  std::vector<double> sigma;
};

// Per-batch mean and total-variance standard deviation across N parallel
// reward sequences: sigma^2 = E[Var(S|t)] + Var(E[S|t]) over each batch
// window, with population variances.
inline BatchStats aggregate(const std::vector<std::vector<double>>& sequences,
                            int batch_size = 32) {
  require(!sequences.empty(), "aggregate needs at least one sequence");
  require(batch_size >= 1, "batch size must be positive");
  const std::size_t len = sequences.front().size();
  for (const auto& s : sequences)
    require(s.size() == len, "sequences must have equal length");
  require(len % batch_size == 0, "sequence length must be a multiple of the batch size");

  const std::size_t n_seq = sequences.size();
  const std::size_t n_batches = len / batch_size;
  BatchStats out;
  out.mu.resize(n_batches);
  out.sigma.resize(n_batches);

  for (std::size_t b = 0; b < n_batches; ++b) {
    const std::size_t lo = b * batch_size;
    double mu = 0.0;
    for (std::size_t i = 0; i < n_seq; ++i)
      for (int t = 0; t < batch_size; ++t) mu += sequences[i][lo + t];
    mu /= static_cast<double>(n_seq * batch_size);

    double within = 0.0;
    double between = 0.0;
    for (int t = 0; t < batch_size; ++t) {
      double step_mean = 0.0;
      for (std::size_t i = 0; i < n_seq; ++i) step_mean += sequences[i][lo + t];
      step_mean /= static_cast<double>(n_seq);
      for (std::size_t i = 0; i < n_seq; ++i) {
        const double d = sequences[i][lo + t] - step_mean;
        within += d * d;
      }
      const double dm = step_mean - mu;
      between += dm * dm;
    }
    within /= static_cast<double>(n_seq * batch_size);
    between /= static_cast<double>(batch_size);

    out.mu[b] = mu;
    out.sigma[b] = std::sqrt(within + between);
  }
  return out;
}

// Trailing-window mean with a growing window at the head: element k averages
// elements max(0, k-window+1) .. k.
inline std::vector<double> smooth(std::span<const double> series, int window = 15) {
  require(window >= 1, "smoothing window must be positive");
  std::vector<double> out(series.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < series.size(); ++k) {
    acc += series[k];
    if (k >= static_cast<std::size_t>(window)) acc -= series[k - window];
    const std::size_t n = std::min<std::size_t>(k + 1, window);
    out[k] = acc / static_cast<double>(n);
  }
  return out;
}

}  // namespace slobench
