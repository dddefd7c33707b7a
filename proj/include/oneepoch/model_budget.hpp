#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "oneepoch/error.hpp"

namespace oneepoch {

/// Sizing of a pre-LN transformer decoder with untied adaptive input and
/// adaptive softmax. Head count, d_ff and the q/k/v widths are derived from
/// `d_model` (heads = d_model / 64, d_ff = 4 * d_model).
struct ModelConfig {
  std::int64_t d_model = 512;
  std::int64_t n_layers = 6;
  std::int64_t vocab_size = 793471;
  std::vector<std::int64_t> cutoffs = {4000, 20000, 100000};
  std::int64_t adaptive_divisor = 4;
  std::int64_t tokens_per_iter = 6912;  // 256 sentences x 27 tokens

  [[nodiscard]] std::int64_t heads() const noexcept { return d_model / 64; }
  [[nodiscard]] std::int64_t d_ff() const noexcept { return 4 * d_model; }

  void validate() const {
    using detail::require;
    require(d_model >= 64 && d_model % 64 == 0,
            "d_model must be a positive multiple of 64, got " + std::to_string(d_model));
    require(n_layers >= 0, "n_layers must be non-negative");
    require(vocab_size > 0, "vocab_size must be positive");
    require(adaptive_divisor >= 1, "adaptive_divisor must be >= 1");
    require(tokens_per_iter > 0, "tokens_per_iter must be positive");
    std::int64_t prev = 0;
    for (auto c : cutoffs) {
      require(c > prev, "cutoffs must be positive and strictly increasing");
      require(c < vocab_size, "cutoff " + std::to_string(c) + " is not below vocab_size");
      prev = c;
    }
  }

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// LM1B-style defaults (6 layers, ~793k word vocabulary, cutoffs
/// [4000, 20000, 100000]) at the given width.
inline ModelConfig lm1b_config(std::int64_t d_model) {
  ModelConfig cfg;
  cfg.d_model = d_model;
  cfg.validate();
  return cfg;
}

struct ParamCount {
  std::int64_t attention = 0;
  std::int64_t feed_forward = 0;
  std::int64_t input_embedding = 0;
  std::int64_t input_projection = 0;
  std::int64_t softmax_embedding = 0;
  std::int64_t softmax_projection = 0;

  [[nodiscard]] std::int64_t total() const noexcept {
    return attention + feed_forward + input_embedding + input_projection + softmax_embedding +
           softmax_projection;
  }
};

/// One vocabulary cluster of the adaptive input / softmax factorization.
struct AdaptiveCluster {
  std::int64_t size = 0;  // vocabulary slice length
  std::int64_t dim = 0;   // projected embedding width
};

inline std::vector<AdaptiveCluster> adaptive_clusters(const ModelConfig& cfg) {
  cfg.validate();
  std::vector<AdaptiveCluster> clusters;
  std::int64_t lo = 0;
  std::int64_t dim = cfg.d_model;
  auto add = [&](std::int64_t hi) {
    clusters.push_back({hi - lo, dim});
    lo = hi;
    dim = std::max<std::int64_t>(1, dim / cfg.adaptive_divisor);
  };
  for (auto c : cfg.cutoffs) add(c);
  add(cfg.vocab_size);
  return clusters;
}

/// Parameter count without biases and normalization weights. Each layer
/// holds 4*d^2 attention and 8*d^2 feed-forward weights; the adaptive
/// embedding of cluster i is size_i x dim_i plus a d x dim_i projection for
/// tail clusters, counted once for the input side and once for the softmax.
inline ParamCount count_params(const ModelConfig& cfg) {
  const auto clusters = adaptive_clusters(cfg);
  const std::int64_t d = cfg.d_model;

  ParamCount pc;
  pc.attention = cfg.n_layers * 4 * d * d;
  pc.feed_forward = cfg.n_layers * 2 * d * cfg.d_ff();
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    pc.input_embedding += clusters[i].size * clusters[i].dim;
    if (i > 0) pc.input_projection += d * clusters[i].dim;
  }
  pc.softmax_embedding = pc.input_embedding;
  pc.softmax_projection = pc.input_projection;
  return pc;
}

/// Per-iteration training cost in units of parameter-tokens. Only ratios
/// between configs carry meaning.
inline double per_iter_flops(const ModelConfig& cfg) {
  return static_cast<double>(count_params(cfg).total()) * static_cast<double>(cfg.tokens_per_iter);
}

inline double flops_ratio(const ModelConfig& num, const ModelConfig& den) {
  return per_iter_flops(num) / per_iter_flops(den);
}

}  // namespace oneepoch
