#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "hexq/encode.hpp"
#include "hexq/error.hpp"
#include "hexq/net/hex_mask.hpp"

namespace hexq {

enum class Precision : std::uint32_t { Single = 0, Double = 1 };

template <typename T>
constexpr Precision precision_of() {
  static_assert(std::is_same_v<T, float> || std::is_same_v<T, double>);
  return std::is_same_v<T, float> ? Precision::Single : Precision::Double;
}

struct NetConfig {
  int board_size = 13;
  int conv_layers = 10;
  int filters_d3 = 64;
  int filters_d5 = 64;
  Precision precision = Precision::Single;
  std::uint64_t init_seed = 0;

  int extent() const noexcept { return board_size + 2 * kPadding; }
  int positions() const noexcept { return extent() * extent(); }
  int filters() const noexcept { return filters_d3 + filters_d5; }
  int actions() const noexcept { return board_size * board_size; }

  void validate() const {
    if (board_size < 1 || board_size > kMaxBoardSize) throw ConfigError("net board_size out of range");
    if (conv_layers < 1) throw ConfigError("net needs at least one conv layer");
    if (filters_d3 < 0 || filters_d5 < 0 || filters() < 1) {
      throw ConfigError("net needs at least one filter per layer");
    }
  }

  friend bool operator==(const NetConfig&, const NetConfig&) = default;
};

/// Parameter storage aligned for Eigen's vector kernels. With plain
/// std::vector the alignment follows the heap layout, and the kernels' peeling
/// (hence the rounding of every product) changed from run to run.
template <typename T>
using AlignedVector = std::vector<T, Eigen::aligned_allocator<T>>;

/// One parameter array. Conv weights are square windows stored as
/// [filter][ky][kx][in_channel]; `window` is 3 or 5 for those and 0 otherwise.
template <typename T>
struct ParamArray {
  AlignedVector<T> values;
  int window = 0;
  int in_channels = 0;

  /// True where the hexagonal mask forces the weight to zero.
  bool masked(std::size_t i) const {
    if (window == 0) return false;
    static const std::vector<std::uint8_t> mask3 = hex_mask(3);
    static const std::vector<std::uint8_t> mask5 = hex_mask(5);
    const auto& mask = window == 3 ? mask3 : mask5;
    const auto tap = (i / static_cast<std::size_t>(in_channels)) % static_cast<std::size_t>(window * window);
    return mask[tap] == 0;
  }

  void apply_mask() {
    if (window == 0) return;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (masked(i)) values[i] = T(0);
    }
  }
};

/// Every trainable array, in declaration order: for each conv layer the
/// diameter-3 weights and biases, then the diameter-5 weights and biases;
/// finally the dense head weights [action][position][channel] and biases.
template <typename T>
struct ParameterSet {
  std::vector<ParamArray<T>> arrays;

  int conv_layers() const noexcept { return static_cast<int>(arrays.size() - 2) / 4; }
  ParamArray<T>& w3(int l) { return arrays[static_cast<std::size_t>(4 * l)]; }
  ParamArray<T>& b3(int l) { return arrays[static_cast<std::size_t>(4 * l + 1)]; }
  ParamArray<T>& w5(int l) { return arrays[static_cast<std::size_t>(4 * l + 2)]; }
  ParamArray<T>& b5(int l) { return arrays[static_cast<std::size_t>(4 * l + 3)]; }
  ParamArray<T>& head_w() { return arrays[arrays.size() - 2]; }
  ParamArray<T>& head_b() { return arrays.back(); }
  const ParamArray<T>& w3(int l) const { return arrays[static_cast<std::size_t>(4 * l)]; }
  const ParamArray<T>& b3(int l) const { return arrays[static_cast<std::size_t>(4 * l + 1)]; }
  const ParamArray<T>& w5(int l) const { return arrays[static_cast<std::size_t>(4 * l + 2)]; }
  const ParamArray<T>& b5(int l) const { return arrays[static_cast<std::size_t>(4 * l + 3)]; }
  const ParamArray<T>& head_w() const { return arrays[arrays.size() - 2]; }
  const ParamArray<T>& head_b() const { return arrays.back(); }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& a : arrays) n += a.values.size();
    return n;
  }

  ParameterSet zeros_like() const {
    ParameterSet z = *this;
    for (auto& a : z.arrays) std::fill(a.values.begin(), a.values.end(), T(0));
    return z;
  }

  void apply_masks() {
    for (auto& a : arrays) a.apply_mask();
  }

  bool all_finite() const {
    for (const auto& a : arrays) {
      for (const T v : a.values) {
        if (!std::isfinite(v)) return false;
      }
    }
    return true;
  }

  friend bool operator==(const ParameterSet& x, const ParameterSet& y) {
    if (x.arrays.size() != y.arrays.size()) return false;
    for (std::size_t i = 0; i < x.arrays.size(); ++i) {
      if (x.arrays[i].values != y.arrays[i].values) return false;
    }
    return true;
  }
};

template <typename T>
using Gradients = ParameterSet<T>;

template <typename T>
struct QNetwork {
  NetConfig config;
  ParameterSet<T> params;
};

/// Zero-initialised parameter set with the shapes `config` implies.
template <typename T>
ParameterSet<T> make_parameter_set(const NetConfig& config) {
  config.validate();
  ParameterSet<T> ps;
  int in_ch = kInputChannels;
  for (int l = 0; l < config.conv_layers; ++l) {
    ps.arrays.push_back({AlignedVector<T>(static_cast<std::size_t>(config.filters_d3 * 9 * in_ch)), 3, in_ch});
    ps.arrays.push_back({AlignedVector<T>(static_cast<std::size_t>(config.filters_d3)), 0, 0});
    ps.arrays.push_back({AlignedVector<T>(static_cast<std::size_t>(config.filters_d5 * 25 * in_ch)), 5, in_ch});
    ps.arrays.push_back({AlignedVector<T>(static_cast<std::size_t>(config.filters_d5)), 0, 0});
    in_ch = config.filters();
  }
  const auto features = static_cast<std::size_t>(config.positions() * config.filters());
  ps.arrays.push_back({AlignedVector<T>(static_cast<std::size_t>(config.actions()) * features), 0, 0});
  ps.arrays.push_back({AlignedVector<T>(static_cast<std::size_t>(config.actions())), 0, 0});
  return ps;
}

/// He-normal conv weights over the active taps, head weights uniform in
/// [-0.01, 0.01], zero biases. Deterministic in `config.init_seed`.
template <typename T>
QNetwork<T> init_network(const NetConfig& config) {
  if (config.precision != precision_of<T>()) {
    throw ConfigError("NetConfig precision does not match the network scalar type");
  }
  QNetwork<T> net{config, make_parameter_set<T>(config)};
  std::mt19937_64 rng(config.init_seed);
  const int taps3 = active_taps(3);
  const int taps5 = active_taps(5);
  for (int l = 0; l < config.conv_layers; ++l) {
    for (auto* arr : {&net.params.w3(l), &net.params.w5(l)}) {
      const int taps = arr->window == 3 ? taps3 : taps5;
      std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / (taps * arr->in_channels)));
      for (std::size_t i = 0; i < arr->values.size(); ++i) {
        const double v = dist(rng);
        arr->values[i] = arr->masked(i) ? T(0) : static_cast<T>(v);
      }
    }
  }
  std::uniform_real_distribution<double> head(-0.01, 0.01);
  for (auto& v : net.params.head_w().values) v = static_cast<T>(head(rng));
  return net;
}

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Activations and workspace kept between `forward` and `backward`.
/// Row b * positions + p of each matrix holds position p of sample b.
template <typename T>
struct ForwardCache {
  int batch = 0;
  std::vector<RowMatrix<T>> inputs;   // conv_layers + 1 entries; inputs[l + 1] = relu(preact[l])
  std::vector<RowMatrix<T>> preact;   // per conv layer, diameter-5 outputs then diameter-3 outputs
  std::vector<RowMatrix<T>> packed3;  // per layer, [filter][tap * in + channel]
  std::vector<RowMatrix<T>> packed5;
  RowMatrix<T> head_preact;  // batch x actions
  RowMatrix<T> output;       // batch x actions
  RowMatrix<T> col;          // im2col workspace

  std::span<const T> values(int sample) const {
    return {output.data() + static_cast<std::size_t>(sample) * static_cast<std::size_t>(output.cols()),
            static_cast<std::size_t>(output.cols())};
  }
};

namespace detail {

struct ConvGeometry {
  int extent = 0;
  int positions = 0;
  std::vector<Tap> taps;  // diameter-5 order; the first 7 are the diameter-3 taps
  int taps3 = 0;

  explicit ConvGeometry(int ext) : extent(ext), positions(ext * ext), taps(hex_taps(5)),
                                   taps3(active_taps(3)) {}
};

inline const ConvGeometry& geometry(int extent) {
  static thread_local std::vector<std::unique_ptr<ConvGeometry>> cached;
  for (const auto& g : cached) {
    if (g->extent == extent) return *g;
  }
  return *cached.emplace_back(std::make_unique<ConvGeometry>(extent));
}

/// Scratch matrices reused across backward passes on one thread, so large
/// buffers are not reallocated every step.
template <typename T>
struct BackwardWorkspace {
  RowMatrix<T> g_y, g_act, col, g_col, g_z, g_packed;
};

template <typename T>
BackwardWorkspace<T>& backward_workspace() {
  static thread_local BackwardWorkspace<T> ws;
  return ws;
}

template <typename T>
void pack_weights(const ParamArray<T>& w, int taps_used, const std::vector<Tap>& taps,
                  RowMatrix<T>& packed) {
  const int in = w.in_channels;
  const int window = w.window;
  const int radius = window / 2;
  const int filters = static_cast<int>(w.values.size()) / (window * window * in);
  packed.resize(filters, taps_used * in);
  for (int f = 0; f < filters; ++f) {
    for (int t = 0; t < taps_used; ++t) {
      const int ky = taps[static_cast<std::size_t>(t)].dy + radius;
      const int kx = taps[static_cast<std::size_t>(t)].dx + radius;
      const T* src = w.values.data() + static_cast<std::size_t>(((f * window + ky) * window + kx) * in);
      std::copy(src, src + in, packed.data() + static_cast<std::size_t>(f) * packed.cols() + t * in);
    }
  }
}

template <typename T>
void unpack_gradient(const RowMatrix<T>& packed, int taps_used, const std::vector<Tap>& taps,
                     ParamArray<T>& g) {
  const int in = g.in_channels;
  const int window = g.window;
  const int radius = window / 2;
  std::fill(g.values.begin(), g.values.end(), T(0));
  for (int f = 0; f < packed.rows(); ++f) {
    for (int t = 0; t < taps_used; ++t) {
      const int ky = taps[static_cast<std::size_t>(t)].dy + radius;
      const int kx = taps[static_cast<std::size_t>(t)].dx + radius;
      const T* src = packed.data() + static_cast<std::size_t>(f) * packed.cols() + t * in;
      std::copy(src, src + in, g.values.data() + static_cast<std::size_t>(((f * window + ky) * window + kx) * in));
    }
  }
}

/// col[(b, y, x)][t * in + c] = x[(b, y + dy_t, x + dx_t)][c], zero outside the plane.
template <typename T>
void im2col(const RowMatrix<T>& x, int batch, const ConvGeometry& g, RowMatrix<T>& col) {
  const int in = static_cast<int>(x.cols());
  const int ntaps = static_cast<int>(g.taps.size());
  col.resize(static_cast<Eigen::Index>(batch) * g.positions, ntaps * in);
  for (int b = 0; b < batch; ++b) {
    for (int y = 0; y < g.extent; ++y) {
      for (int xx = 0; xx < g.extent; ++xx) {
        const auto row = static_cast<Eigen::Index>(b) * g.positions + y * g.extent + xx;
        T* dst = col.data() + row * col.cols();
        for (int t = 0; t < ntaps; ++t) {
          const int sy = y + g.taps[static_cast<std::size_t>(t)].dy;
          const int sx = xx + g.taps[static_cast<std::size_t>(t)].dx;
          if (sy < 0 || sx < 0 || sy >= g.extent || sx >= g.extent) {
            std::fill(dst + t * in, dst + (t + 1) * in, T(0));
          } else {
            const T* src = x.data() + (static_cast<Eigen::Index>(b) * g.positions + sy * g.extent + sx) * in;
            std::copy(src, src + in, dst + t * in);
          }
        }
      }
    }
  }
}

/// Adjoint of im2col: scatter-adds column gradients back onto the input plane.
template <typename T>
void col2im(const RowMatrix<T>& col, int batch, int in, const ConvGeometry& g, RowMatrix<T>& x) {
  const int ntaps = static_cast<int>(g.taps.size());
  x.setZero(static_cast<Eigen::Index>(batch) * g.positions, in);
  for (int b = 0; b < batch; ++b) {
    for (int y = 0; y < g.extent; ++y) {
      for (int xx = 0; xx < g.extent; ++xx) {
        const auto row = static_cast<Eigen::Index>(b) * g.positions + y * g.extent + xx;
        const T* src = col.data() + row * col.cols();
        for (int t = 0; t < ntaps; ++t) {
          const int sy = y + g.taps[static_cast<std::size_t>(t)].dy;
          const int sx = xx + g.taps[static_cast<std::size_t>(t)].dx;
          if (sy < 0 || sx < 0 || sy >= g.extent || sx >= g.extent) continue;
          T* dst = x.data() + (static_cast<Eigen::Index>(b) * g.positions + sy * g.extent + sx) * in;
          for (int c = 0; c < in; ++c) dst[c] += src[t * in + c];
        }
      }
    }
  }
}

/// 1 - 2 sigmoid(x) written as -tanh(x / 2), kept strictly inside (-1, 1).
template <typename T>
T head_activation(T x) {
  constexpr T bound = T(1) - std::numeric_limits<T>::epsilon();
  return std::clamp(-std::tanh(x / T(2)), -bound, bound);
}

}  // namespace detail

/// Batched forward pass. Every conv layer concatenates its diameter-5 and
/// diameter-3 outputs (stride 1, zero padding, ReLU); the head is one dense
/// layer over the flattened final volume with activation 1 - 2 sigmoid(x).
template <typename T>
void forward(const QNetwork<T>& net, std::span<const InputTensor<T>> batch_inputs,
             ForwardCache<T>& cache) {
  const NetConfig& cfg = net.config;
  const int batch = static_cast<int>(batch_inputs.size());
  if (batch == 0) throw UsageError("forward needs at least one input");
  const int pos = cfg.positions();
  for (const auto& in : batch_inputs) {
    if (in.board_size != cfg.board_size ||
        in.values.size() != static_cast<std::size_t>(kInputChannels * pos)) {
      throw ConfigError("input tensor does not match the network board size");
    }
  }
  const detail::ConvGeometry* geo = &detail::geometry(cfg.extent());

  const int layers = cfg.conv_layers;
  cache.batch = batch;
  cache.inputs.resize(static_cast<std::size_t>(layers + 1));
  cache.preact.resize(static_cast<std::size_t>(layers));
  cache.packed3.resize(static_cast<std::size_t>(layers));
  cache.packed5.resize(static_cast<std::size_t>(layers));

  RowMatrix<T>& x0 = cache.inputs[0];
  x0.resize(static_cast<Eigen::Index>(batch) * pos, kInputChannels);
  for (int b = 0; b < batch; ++b) {
    const auto& v = batch_inputs[static_cast<std::size_t>(b)].values;
    for (int p = 0; p < pos; ++p) {
      for (int ch = 0; ch < kInputChannels; ++ch) {
        x0(static_cast<Eigen::Index>(b) * pos + p, ch) = v[static_cast<std::size_t>(ch * pos + p)];
      }
    }
  }

  const int f3 = cfg.filters_d3;
  const int f5 = cfg.filters_d5;
  for (int l = 0; l < layers; ++l) {
    const auto ul = static_cast<std::size_t>(l);
    const RowMatrix<T>& x = cache.inputs[ul];
    const int in = static_cast<int>(x.cols());
    detail::im2col(x, batch, *geo, cache.col);
    detail::pack_weights(net.params.w3(l), geo->taps3, geo->taps, cache.packed3[ul]);
    detail::pack_weights(net.params.w5(l), static_cast<int>(geo->taps.size()), geo->taps, cache.packed5[ul]);

    RowMatrix<T>& z = cache.preact[ul];
    z.resize(cache.col.rows(), f5 + f3);
    const auto b3 = Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>(net.params.b3(l).values.data(), f3);
    const auto b5 = Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>(net.params.b5(l).values.data(), f5);
    if (f5 > 0) {
      z.leftCols(f5).noalias() = cache.col * cache.packed5[ul].transpose();
      z.leftCols(f5).rowwise() += b5;
    }
    if (f3 > 0) {
      z.rightCols(f3).noalias() = cache.col.leftCols(geo->taps3 * in) * cache.packed3[ul].transpose();
      z.rightCols(f3).rowwise() += b3;
    }
    cache.inputs[ul + 1] = z.cwiseMax(T(0));
  }

  const RowMatrix<T>& last = cache.inputs[static_cast<std::size_t>(layers)];
  const Eigen::Index features = static_cast<Eigen::Index>(pos) * cfg.filters();
  const Eigen::Map<const RowMatrix<T>> flat(last.data(), batch, features);
  const Eigen::Map<const RowMatrix<T>> head_w(net.params.head_w().values.data(), cfg.actions(), features);
  const auto head_b =
      Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>(net.params.head_b().values.data(), cfg.actions());
  cache.head_preact.noalias() = flat * head_w.transpose();
  cache.head_preact.rowwise() += head_b;
  cache.output = cache.head_preact.unaryExpr([](T v) { return detail::head_activation(v); });
}

/// Action values for one position, indexed row * N + col.
template <typename T>
std::vector<T> evaluate(const QNetwork<T>& net, const InputTensor<T>& input) {
  ForwardCache<T> cache;
  forward(net, std::span<const InputTensor<T>>(&input, 1), cache);
  const auto v = cache.values(0);
  return {v.begin(), v.end()};
}

/// Gradients of a loss whose derivative with respect to the network outputs
/// is `output_gradient` (batch x actions, row-major).
template <typename T>
void backward(const QNetwork<T>& net, const ForwardCache<T>& cache, std::span<const T> output_gradient,
              Gradients<T>& grads) {
  const NetConfig& cfg = net.config;
  if (cache.batch == 0 || cache.preact.size() != static_cast<std::size_t>(cfg.conv_layers)) {
    throw UsageError("backward needs the cache of a matching forward pass");
  }
  const int batch = cache.batch;
  const int actions = cfg.actions();
  if (output_gradient.size() != static_cast<std::size_t>(batch * actions)) {
    throw UsageError("output gradient shape does not match the forward batch");
  }
  if (grads.arrays.size() != net.params.arrays.size()) grads = net.params.zeros_like();

  const detail::ConvGeometry& geo = detail::geometry(cfg.extent());
  const int pos = cfg.positions();
  const Eigen::Index features = static_cast<Eigen::Index>(pos) * cfg.filters();

  const Eigen::Map<const RowMatrix<T>> g_out(output_gradient.data(), batch, actions);
  auto& ws = detail::backward_workspace<T>();
  RowMatrix<T>& g_y = ws.g_y;
  g_y.resize(batch, actions);
  for (int b = 0; b < batch; ++b) {
    for (int a = 0; a < actions; ++a) {
      const T t = std::tanh(cache.head_preact(b, a) / T(2));
      g_y(b, a) = g_out(b, a) * (-(T(1) - t * t) / T(2));
    }
  }

  const RowMatrix<T>& last = cache.inputs[static_cast<std::size_t>(cfg.conv_layers)];
  const Eigen::Map<const RowMatrix<T>> flat(last.data(), batch, features);
  const Eigen::Map<const RowMatrix<T>> head_w(net.params.head_w().values.data(), actions, features);
  Eigen::Map<RowMatrix<T>> g_head_w(grads.head_w().values.data(), actions, features);
  g_head_w.noalias() = g_y.transpose() * flat;
  Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>(grads.head_b().values.data(), actions) =
      g_y.colwise().sum();

  RowMatrix<T>& g_act = ws.g_act;
  g_act.resize(static_cast<Eigen::Index>(batch) * pos, cfg.filters());
  Eigen::Map<RowMatrix<T>>(g_act.data(), batch, features).noalias() = g_y * head_w;

  const int f3 = cfg.filters_d3;
  const int f5 = cfg.filters_d5;
  RowMatrix<T>& col = ws.col;
  RowMatrix<T>& g_col = ws.g_col;
  RowMatrix<T>& g_z = ws.g_z;
  RowMatrix<T>& g_packed = ws.g_packed;
  for (int l = cfg.conv_layers - 1; l >= 0; --l) {
    const auto ul = static_cast<std::size_t>(l);
    const RowMatrix<T>& x = cache.inputs[ul];
    const int in = static_cast<int>(x.cols());
    g_z = g_act.cwiseProduct((cache.preact[ul].array() > T(0)).template cast<T>().matrix());
    detail::im2col(x, batch, geo, col);

    if (f5 > 0) {
      g_packed.noalias() = g_z.leftCols(f5).transpose() * col;
      detail::unpack_gradient(g_packed, static_cast<int>(geo.taps.size()), geo.taps, grads.w5(l));
      Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>(grads.b5(l).values.data(), f5) =
          g_z.leftCols(f5).colwise().sum();
    }
    if (f3 > 0) {
      g_packed.noalias() = g_z.rightCols(f3).transpose() * col.leftCols(geo.taps3 * in);
      detail::unpack_gradient(g_packed, geo.taps3, geo.taps, grads.w3(l));
      Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>(grads.b3(l).values.data(), f3) =
          g_z.rightCols(f3).colwise().sum();
    }
    if (l == 0) break;
    if (f5 > 0) {
      g_col.noalias() = g_z.leftCols(f5) * cache.packed5[ul];
    } else {
      g_col.setZero(col.rows(), col.cols());
    }
    if (f3 > 0) g_col.leftCols(geo.taps3 * in).noalias() += g_z.rightCols(f3) * cache.packed3[ul];
    detail::col2im(g_col, batch, in, geo, g_act);
  }
}

template <typename T>
Gradients<T> backward(const QNetwork<T>& net, const ForwardCache<T>& cache, std::span<const T> output_gradient) {
  Gradients<T> g = net.params.zeros_like();
  backward(net, cache, output_gradient, g);
  return g;
}

}  // namespace hexq
