#pragma once

#include <cmath>
#include <cstddef>
#include <iostream>
#include <span>

#include "hexq/error.hpp"
#include "hexq/net/qnetwork.hpp"

namespace hexq {

struct RmsPropConfig {
  double learning_rate = 1e-3;
  double decay = 0.9;     // rho
  double damping = 1e-8;  // added under the square root
};

template <typename T>
struct OptimizerState {
  RmsPropConfig config;
  ParameterSet<T> mean_square;  // running mean of squared gradients, same shapes as the network
  std::size_t steps = 0;
  std::size_t skipped_steps = 0;
};

/// acc <- rho acc + (1 - rho) g^2;  p <- p - lr g / sqrt(acc + damping)
template <typename T>
void rmsprop_update(std::span<T> params, std::span<T> mean_square, std::span<const T> grads,
                    const RmsPropConfig& cfg) {
  const T rho = static_cast<T>(cfg.decay);
  const T lr = static_cast<T>(cfg.learning_rate);
  const T eps = static_cast<T>(cfg.damping);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const T g = grads[i];
    mean_square[i] = rho * mean_square[i] + (T(1) - rho) * g * g;
    params[i] -= lr * g / std::sqrt(mean_square[i] + eps);
  }
}

template <typename T>
OptimizerState<T> make_optimizer(const QNetwork<T>& net, const RmsPropConfig& cfg) {
  return {cfg, net.params.zeros_like(), 0, 0};
}

/// One RMSProp step over every array; masks are re-applied afterwards.
/// A step with any non-finite gradient is skipped and counted. Returns
/// whether the update was applied.
template <typename T>
bool rmsprop_step(QNetwork<T>& net, OptimizerState<T>& state, const Gradients<T>& grads) {
  if (grads.arrays.size() != net.params.arrays.size() ||
      state.mean_square.arrays.size() != net.params.arrays.size()) {
    throw UsageError("optimizer state or gradients do not match the network");
  }
  if (!grads.all_finite()) {
    ++state.skipped_steps;
    std::clog << "hexq: skipped optimizer step with non-finite gradient (" << state.skipped_steps
              << " so far)\n";
    return false;
  }
  for (std::size_t k = 0; k < net.params.arrays.size(); ++k) {
    auto& p = net.params.arrays[k];
    auto& acc = state.mean_square.arrays[k].values;
    const auto& g = grads.arrays[k].values;
    if (g.size() != p.values.size() || acc.size() != p.values.size()) {
      throw UsageError("gradient array shape mismatch");
    }
    rmsprop_update<T>(p.values, acc, g, state.config);
    p.apply_mask();
  }
  ++state.steps;
  return true;
}

}  // namespace hexq
