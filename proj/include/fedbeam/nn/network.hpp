// Copyright 2026 The fedbeam Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fedbeam/channel.hpp"
#include "fedbeam/error.hpp"
#include "fedbeam/nn/architecture.hpp"
#include "fedbeam/random.hpp"

namespace fedbeam::nn {

enum class Mode { kTrain, kEval };

// Running statistics for every conv block's batch-norm, concatenated in
// layer order (one entry per output channel).
template <typename T>
struct BatchNormState {
  std::vector<T> mean;
  std::vector<T> var;
  T momentum = T(0.9);
  T eps = T(1e-5);

  friend bool operator==(const BatchNormState&, const BatchNormState&) = default;
};

template <typename T>
BatchNormState<T> fresh_batch_norm(const ArchitectureSpec& spec) {
  const auto n = bn_channels(spec);
  return {std::vector<T>(n, T(0)), std::vector<T>(n, T(1))};
}

// Activations retained by a training-mode forward pass.
template <typename T>
struct ForwardCache {
  std::size_t batch = 0;
  // block_in[l] is the input of conv block l; block_in.back() is the
  // flattened feature map entering the linear head.
  std::vector<std::vector<T>> block_in;
  std::vector<std::vector<T>> xhat;
  std::vector<std::vector<T>> bn_out;
  std::vector<std::vector<T>> inv_std;
  std::vector<T> hidden_pre;
  std::vector<T> hidden_act;
  std::vector<T> probs;
};

template <typename T>
class Network {
 public:
  explicit Network(ArchitectureSpec spec)
      : spec_(std::move(spec)),
        shapes_(feature_shapes(spec_)),
        layout_(make_layout(spec_)) {}

  const ArchitectureSpec& spec() const noexcept { return spec_; }
  const ParamLayout& layout() const noexcept { return layout_; }
  std::size_t param_count() const noexcept { return layout_.total; }
  std::size_t input_size() const noexcept { return shapes_.front().size(); }
  std::size_t classes() const noexcept { return spec_.classes; }

  // Softmax probabilities, batch x classes. Train mode uses batch
  // statistics and updates bn's running averages; eval mode reads them.
  std::vector<T> forward(std::span<const T> theta, BatchNormState<T>& bn,
                         std::span<const T> input, std::size_t batch,
                         Mode mode, ForwardCache<T>* cache = nullptr) const {
    check_inputs(theta, bn, input, batch);
    if (mode == Mode::kTrain && batch < 2) {
      throw InvalidArgument("forward: train mode needs a batch of at least 2");
    }
    ForwardCache<T> local;
    ForwardCache<T>& c = cache ? *cache : local;
    c.batch = batch;
    c.block_in.assign(spec_.convs.size() + 1, {});
    c.xhat.assign(spec_.convs.size(), {});
    c.bn_out.assign(spec_.convs.size(), {});
    c.inv_std.assign(spec_.convs.size(), {});
    c.block_in[0].assign(input.begin(), input.end());

    std::size_t bn_offset = 0;
    for (std::size_t l = 0; l < spec_.convs.size(); ++l) {
      const auto& layer = spec_.convs[l];
      const auto& in_shape = shapes_[l];
      const auto& out_shape = shapes_[l + 1];
      const std::size_t plane = out_shape.h * out_shape.w;
      auto& z = c.bn_out[l];  // conv output, normalized in place below
      z.assign(batch * out_shape.size(), T(0));
      conv_forward(layer, in_shape, out_shape, c.block_in[l].data(),
                   param(theta, SegmentKind::kConvWeight, l),
                   param(theta, SegmentKind::kConvBias, l), z.data(), batch);

      const T* gamma = param(theta, SegmentKind::kBnScale, l);
      const T* beta = param(theta, SegmentKind::kBnShift, l);
      const T* slope = param(theta, SegmentKind::kPreluSlope, l);
      auto& xhat = c.xhat[l];
      xhat.resize(z.size());
      auto& inv_std = c.inv_std[l];
      inv_std.assign(layer.out_ch, T(0));
      const auto count = static_cast<double>(batch * plane);
      for (std::size_t ch = 0; ch < layer.out_ch; ++ch) {
        T mean, istd;
        if (mode == Mode::kTrain) {
          double sum = 0.0;
          for (std::size_t b = 0; b < batch; ++b) {
            const T* p = z.data() + (b * layer.out_ch + ch) * plane;
            for (std::size_t k = 0; k < plane; ++k) sum += p[k];
          }
          const double m = sum / count;
          double sq = 0.0;
          for (std::size_t b = 0; b < batch; ++b) {
            const T* p = z.data() + (b * layer.out_ch + ch) * plane;
            for (std::size_t k = 0; k < plane; ++k) {
              const double d = p[k] - m;
              sq += d * d;
            }
          }
          const double var = sq / count;
          mean = static_cast<T>(m);
          istd = static_cast<T>(1.0 / std::sqrt(var + static_cast<double>(bn.eps)));
          const double unbiased = count > 1.0 ? var * count / (count - 1.0) : var;
          auto& rm = bn.mean[bn_offset + ch];
          auto& rv = bn.var[bn_offset + ch];
          rm = bn.momentum * rm + (T(1) - bn.momentum) * mean;
          rv = bn.momentum * rv + (T(1) - bn.momentum) * static_cast<T>(unbiased);
        } else {
          mean = bn.mean[bn_offset + ch];
          istd = T(1) / std::sqrt(bn.var[bn_offset + ch] + bn.eps);
        }
        inv_std[ch] = istd;
        for (std::size_t b = 0; b < batch; ++b) {
          const std::size_t base = (b * layer.out_ch + ch) * plane;
          for (std::size_t k = 0; k < plane; ++k) {
            const T xh = (z[base + k] - mean) * istd;
            xhat[base + k] = xh;
            z[base + k] = gamma[ch] * xh + beta[ch];
          }
        }
      }
      auto& out = c.block_in[l + 1];
      out.resize(z.size());
      for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t ch = 0; ch < layer.out_ch; ++ch) {
          const std::size_t base = (b * layer.out_ch + ch) * plane;
          const T a = slope[ch];
          for (std::size_t k = 0; k < plane; ++k) {
            const T y = z[base + k];
            out[base + k] = y > T(0) ? y : a * y;
          }
        }
      }
      bn_offset += layer.out_ch;
    }

    const std::size_t flat = shapes_.back().size();
    const T* features = c.block_in.back().data();
    const T* head_in = features;
    std::size_t head_width = flat;
    std::size_t lin = 0;
    if (spec_.hidden > 0) {
      c.hidden_pre.assign(batch * spec_.hidden, T(0));
      linear_forward(param(theta, SegmentKind::kLinearWeight, 0),
                     param(theta, SegmentKind::kLinearBias, 0), features, flat,
                     spec_.hidden, c.hidden_pre.data(), batch);
      c.hidden_act.resize(c.hidden_pre.size());
      for (std::size_t k = 0; k < c.hidden_pre.size(); ++k) {
        c.hidden_act[k] = std::max(T(0), c.hidden_pre[k]);
      }
      head_in = c.hidden_act.data();
      head_width = spec_.hidden;
      lin = 1;
    }
    c.probs.assign(batch * spec_.classes, T(0));
    linear_forward(param(theta, SegmentKind::kLinearWeight, lin),
                   param(theta, SegmentKind::kLinearBias, lin), head_in,
                   head_width, spec_.classes, c.probs.data(), batch);
    for (std::size_t b = 0; b < batch; ++b) {
      softmax_inplace(std::span<T>(c.probs.data() + b * spec_.classes, spec_.classes));
    }
    return c.probs;
  }

  // Mean cross-entropy of the true-class probability over the batch, and
  // its exact gradient with respect to every parameter (written to grad).
  // Runs a training-mode forward pass, so bn's running stats advance.
  T loss_and_grad(std::span<const T> theta, BatchNormState<T>& bn,
                  std::span<const T> input, std::span<const BeamLabel> labels,
                  std::span<T> grad) const {
    const std::size_t batch = labels.size();
    if (batch == 0) throw InvalidArgument("loss_and_grad: empty batch");
    for (auto label : labels) {
      if (label >= spec_.classes) {
        throw InvalidArgument("loss_and_grad: label " + std::to_string(label) +
                              " >= " + std::to_string(spec_.classes));
      }
    }
    if (grad.size() != layout_.total) {
      throw InvalidArgument("loss_and_grad: gradient buffer has wrong length");
    }
    ForwardCache<T> cache;
    forward(theta, bn, input, batch, Mode::kTrain, &cache);
    double loss = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
      const T p = cache.probs[b * spec_.classes + labels[b]];
      loss -= std::log(std::max(static_cast<double>(p), 1e-300));
    }
    backward(theta, cache, labels, grad);
    return static_cast<T>(loss / static_cast<double>(batch));
  }

  // Loss only, training-mode statistics, without touching the caller's
  // running stats. Used by finite-difference checks.
  T loss(std::span<const T> theta, const BatchNormState<T>& bn,
         std::span<const T> input, std::span<const BeamLabel> labels) const {
    auto scratch = bn;
    const auto probs =
        forward(theta, scratch, input, labels.size(), Mode::kTrain);
    double total = 0.0;
    for (std::size_t b = 0; b < labels.size(); ++b) {
      total -= std::log(static_cast<double>(probs[b * spec_.classes + labels[b]]));
    }
    return static_cast<T>(total / static_cast<double>(labels.size()));
  }

  void backward(std::span<const T> theta, ForwardCache<T>& c,
                std::span<const BeamLabel> labels, std::span<T> grad) const {
    const std::size_t batch = c.batch;
    std::fill(grad.begin(), grad.end(), T(0));
    const T inv_b = T(1) / static_cast<T>(batch);

    std::vector<T> dlogits(c.probs);
    for (std::size_t b = 0; b < batch; ++b) {
      dlogits[b * spec_.classes + labels[b]] -= T(1);
    }
    for (auto& v : dlogits) v *= inv_b;

    const std::size_t flat = shapes_.back().size();
    std::vector<T> dfeatures(batch * flat, T(0));
    if (spec_.hidden > 0) {
      std::vector<T> dhidden(batch * spec_.hidden, T(0));
      linear_backward(param(theta, SegmentKind::kLinearWeight, 1),
                      c.hidden_act.data(), spec_.hidden, spec_.classes,
                      dlogits.data(), batch,
                      mut(grad, SegmentKind::kLinearWeight, 1),
                      mut(grad, SegmentKind::kLinearBias, 1), dhidden.data());
      for (std::size_t k = 0; k < dhidden.size(); ++k) {
        if (!(c.hidden_pre[k] > T(0))) dhidden[k] = T(0);
      }
      linear_backward(param(theta, SegmentKind::kLinearWeight, 0),
                      c.block_in.back().data(), flat, spec_.hidden,
                      dhidden.data(), batch,
                      mut(grad, SegmentKind::kLinearWeight, 0),
                      mut(grad, SegmentKind::kLinearBias, 0), dfeatures.data());
    } else {
      linear_backward(param(theta, SegmentKind::kLinearWeight, 0),
                      c.block_in.back().data(), flat, spec_.classes,
                      dlogits.data(), batch,
                      mut(grad, SegmentKind::kLinearWeight, 0),
                      mut(grad, SegmentKind::kLinearBias, 0), dfeatures.data());
    }

    std::vector<T> dout = std::move(dfeatures);
    for (std::size_t l = spec_.convs.size(); l-- > 0;) {
      const auto& layer = spec_.convs[l];
      const auto& in_shape = shapes_[l];
      const auto& out_shape = shapes_[l + 1];
      const std::size_t plane = out_shape.h * out_shape.w;
      const T* gamma = param(theta, SegmentKind::kBnScale, l);
      const T* slope = param(theta, SegmentKind::kPreluSlope, l);
      T* dgamma = mut(grad, SegmentKind::kBnScale, l);
      T* dbeta = mut(grad, SegmentKind::kBnShift, l);
      T* dslope = mut(grad, SegmentKind::kPreluSlope, l);
      const auto& y = c.bn_out[l];
      const auto& xhat = c.xhat[l];

      // PReLU, in place: dout becomes d(bn_out).
      for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t ch = 0; ch < layer.out_ch; ++ch) {
          const std::size_t base = (b * layer.out_ch + ch) * plane;
          T acc = T(0);
          for (std::size_t k = 0; k < plane; ++k) {
            const T yk = y[base + k];
            if (!(yk > T(0))) {
              acc += dout[base + k] * yk;
              dout[base + k] *= slope[ch];
            }
          }
          dslope[ch] += acc;
        }
      }
      // Batch-norm with batch statistics, in place: dout becomes d(conv out).
      const T count = static_cast<T>(batch * plane);
      for (std::size_t ch = 0; ch < layer.out_ch; ++ch) {
        T sum_dy = T(0);
        T sum_dy_xhat = T(0);
        for (std::size_t b = 0; b < batch; ++b) {
          const std::size_t base = (b * layer.out_ch + ch) * plane;
          for (std::size_t k = 0; k < plane; ++k) {
            sum_dy += dout[base + k];
            sum_dy_xhat += dout[base + k] * xhat[base + k];
          }
        }
        dgamma[ch] += sum_dy_xhat;
        dbeta[ch] += sum_dy;
        const T scale = gamma[ch] * c.inv_std[l][ch] / count;
        for (std::size_t b = 0; b < batch; ++b) {
          const std::size_t base = (b * layer.out_ch + ch) * plane;
          for (std::size_t k = 0; k < plane; ++k) {
            dout[base + k] = scale * (count * dout[base + k] - sum_dy -
                                      xhat[base + k] * sum_dy_xhat);
          }
        }
      }
      std::vector<T> din;
      if (l > 0) din.assign(batch * in_shape.size(), T(0));
      conv_backward(layer, in_shape, out_shape, c.block_in[l].data(),
                    param(theta, SegmentKind::kConvWeight, l), dout.data(),
                    batch, mut(grad, SegmentKind::kConvWeight, l),
                    mut(grad, SegmentKind::kConvBias, l),
                    l > 0 ? din.data() : nullptr);
      dout = std::move(din);
    }
  }

 private:
  void check_inputs(std::span<const T> theta, const BatchNormState<T>& bn,
                    std::span<const T> input, std::size_t batch) const {
    if (theta.size() != layout_.total) {
      throw InvalidArgument("forward: parameter vector has " +
                            std::to_string(theta.size()) + " entries, spec needs " +
                            std::to_string(layout_.total));
    }
    if (bn.mean.size() != bn_channels(spec_) || bn.var.size() != bn.mean.size()) {
      throw InvalidArgument("forward: batch-norm state does not match spec");
    }
    if (batch == 0 || input.size() != batch * shapes_.front().size()) {
      throw InvalidArgument("forward: input of " + std::to_string(input.size()) +
                            " values does not match batch " + std::to_string(batch) +
                            " x " + std::to_string(shapes_.front().size()));
    }
  }

  const T* param(std::span<const T> theta, SegmentKind k, std::size_t layer) const {
    return theta.data() + layout_.find(k, layer).offset;
  }
  T* mut(std::span<T> grad, SegmentKind k, std::size_t layer) const {
    return grad.data() + layout_.find(k, layer).offset;
  }

  // Valid output-column range [lo, hi) for kernel column kw.
  static void column_range(std::ptrdiff_t in_w, std::ptrdiff_t out_w,
                           std::ptrdiff_t kw, std::ptrdiff_t stride,
                           std::ptrdiff_t pad, std::ptrdiff_t& lo,
                           std::ptrdiff_t& hi) {
    lo = 0;
    if (pad > kw) lo = (pad - kw + stride - 1) / stride;
    const std::ptrdiff_t last = in_w - 1 + pad - kw;
    hi = last < 0 ? 0 : std::min(out_w, last / stride + 1);
  }

  static void conv_forward(const ConvLayer& layer, const FeatureShape& in,
                           const FeatureShape& out, const T* x, const T* w,
                           const T* bias, T* z, std::size_t batch) {
    const auto s = static_cast<std::ptrdiff_t>(layer.stride);
    const auto pad = static_cast<std::ptrdiff_t>(layer.padding);
    const auto ih_n = static_cast<std::ptrdiff_t>(in.h);
    const auto iw_n = static_cast<std::ptrdiff_t>(in.w);
    const auto oh_n = static_cast<std::ptrdiff_t>(out.h);
    const auto ow_n = static_cast<std::ptrdiff_t>(out.w);
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t oc = 0; oc < layer.out_ch; ++oc) {
        T* zp = z + (b * layer.out_ch + oc) * out.h * out.w;
        std::fill(zp, zp + out.h * out.w, bias[oc]);
        for (std::size_t ic = 0; ic < layer.in_ch; ++ic) {
          const T* xp = x + (b * layer.in_ch + ic) * in.h * in.w;
          const T* wk = w + (oc * layer.in_ch + ic) * layer.kernel_h * layer.kernel_w;
          for (std::ptrdiff_t kh = 0; kh < static_cast<std::ptrdiff_t>(layer.kernel_h); ++kh) {
            for (std::ptrdiff_t kw = 0; kw < static_cast<std::ptrdiff_t>(layer.kernel_w); ++kw) {
              const T wv = wk[kh * static_cast<std::ptrdiff_t>(layer.kernel_w) + kw];
              std::ptrdiff_t lo, hi;
              column_range(iw_n, ow_n, kw, s, pad, lo, hi);
              for (std::ptrdiff_t oh = 0; oh < oh_n; ++oh) {
                const std::ptrdiff_t ih = oh * s + kh - pad;
                if (ih < 0 || ih >= ih_n) continue;
                const std::ptrdiff_t xoff = ih * iw_n + kw - pad;
                T* zrow = zp + oh * ow_n;
                for (std::ptrdiff_t ow = lo; ow < hi; ++ow) {
                  zrow[ow] += wv * xp[xoff + ow * s];
                }
              }
            }
          }
        }
      }
    }
  }

  static void conv_backward(const ConvLayer& layer, const FeatureShape& in,
                            const FeatureShape& out, const T* x, const T* w,
                            const T* dz, std::size_t batch, T* dw, T* dbias,
                            T* dx) {
    const auto s = static_cast<std::ptrdiff_t>(layer.stride);
    const auto pad = static_cast<std::ptrdiff_t>(layer.padding);
    const auto ih_n = static_cast<std::ptrdiff_t>(in.h);
    const auto iw_n = static_cast<std::ptrdiff_t>(in.w);
    const auto oh_n = static_cast<std::ptrdiff_t>(out.h);
    const auto ow_n = static_cast<std::ptrdiff_t>(out.w);
    const std::size_t plane = out.h * out.w;
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t oc = 0; oc < layer.out_ch; ++oc) {
        const T* dzp = dz + (b * layer.out_ch + oc) * plane;
        T acc = T(0);
        for (std::size_t k = 0; k < plane; ++k) acc += dzp[k];
        dbias[oc] += acc;
        for (std::size_t ic = 0; ic < layer.in_ch; ++ic) {
          const T* xp = x + (b * layer.in_ch + ic) * in.h * in.w;
          T* dxp = dx ? dx + (b * layer.in_ch + ic) * in.h * in.w : nullptr;
          const std::size_t wbase = (oc * layer.in_ch + ic) * layer.kernel_h * layer.kernel_w;
          for (std::ptrdiff_t kh = 0; kh < static_cast<std::ptrdiff_t>(layer.kernel_h); ++kh) {
            for (std::ptrdiff_t kw = 0; kw < static_cast<std::ptrdiff_t>(layer.kernel_w); ++kw) {
              const std::size_t widx = wbase + static_cast<std::size_t>(
                  kh * static_cast<std::ptrdiff_t>(layer.kernel_w) + kw);
              const T wv = w[widx];
              std::ptrdiff_t lo, hi;
              column_range(iw_n, ow_n, kw, s, pad, lo, hi);
              T gw = T(0);
              for (std::ptrdiff_t oh = 0; oh < oh_n; ++oh) {
                const std::ptrdiff_t ih = oh * s + kh - pad;
                if (ih < 0 || ih >= ih_n) continue;
                const std::ptrdiff_t xoff = ih * iw_n + kw - pad;
                const T* dzrow = dzp + oh * ow_n;
                for (std::ptrdiff_t ow = lo; ow < hi; ++ow) {
                  gw += dzrow[ow] * xp[xoff + ow * s];
                }
                if (dxp) {
                  for (std::ptrdiff_t ow = lo; ow < hi; ++ow) {
                    dxp[xoff + ow * s] += wv * dzrow[ow];
                  }
                }
              }
              dw[widx] += gw;
            }
          }
        }
      }
    }
  }

  // y[b] = W x[b] + bias, W is [out][in].
  static void linear_forward(const T* w, const T* bias, const T* x,
                             std::size_t in, std::size_t out, T* y,
                             std::size_t batch) {
    for (std::size_t b = 0; b < batch; ++b) {
      const T* xb = x + b * in;
      T* yb = y + b * out;
      for (std::size_t o = 0; o < out; ++o) {
        const T* wr = w + o * in;
        T acc = bias[o];
        for (std::size_t i = 0; i < in; ++i) acc += wr[i] * xb[i];
        yb[o] = acc;
      }
    }
  }

  static void linear_backward(const T* w, const T* x, std::size_t in,
                              std::size_t out, const T* dy, std::size_t batch,
                              T* dw, T* dbias, T* dx) {
    for (std::size_t b = 0; b < batch; ++b) {
      const T* xb = x + b * in;
      const T* dyb = dy + b * out;
      T* dxb = dx + b * in;
      for (std::size_t o = 0; o < out; ++o) {
        const T g = dyb[o];
        dbias[o] += g;
        const T* wr = w + o * in;
        T* dwr = dw + o * in;
        for (std::size_t i = 0; i < in; ++i) {
          dwr[i] += g * xb[i];
          dxb[i] += g * wr[i];
        }
      }
    }
  }

  static void softmax_inplace(std::span<T> row) {
    const T peak = *std::max_element(row.begin(), row.end());
    T sum = T(0);
    for (auto& v : row) {
      v = std::exp(v - peak);
      sum += v;
    }
    for (auto& v : row) v /= sum;
  }

  ArchitectureSpec spec_;
  std::vector<FeatureShape> shapes_;
  ParamLayout layout_;
};

// Trainable parameters plus batch-norm running statistics: everything the
// server broadcasts and a checkpoint stores.
struct ModelState {
  ArchitectureSpec spec;
  std::vector<float> params;
  BatchNormState<float> bn;

  friend bool operator==(const ModelState&, const ModelState&) = default;
};

// Glorot-uniform conv/linear weights, zero biases, BN scale 1 / shift 0,
// PReLU slopes 0.25, running mean 0 / variance 1.
inline ModelState init_params(const ArchitectureSpec& spec, std::uint64_t seed) {
  const auto layout = make_layout(spec);
  const auto shapes = feature_shapes(spec);
  ModelState m{spec, std::vector<float>(layout.total, 0.0F),
               fresh_batch_norm<float>(spec)};
  std::mt19937_64 rng(derive_seed(seed, streams::kInit));
  auto glorot = [&](const Segment& seg, double fan_in, double fan_out) {
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-a, a);
    for (std::size_t k = 0; k < seg.size; ++k) {
      m.params[seg.offset + k] = static_cast<float>(dist(rng));
    }
  };
  for (const auto& seg : layout.segments) {
    switch (seg.kind) {
      case SegmentKind::kConvWeight: {
        const auto& c = spec.convs[seg.layer];
        const double area = static_cast<double>(c.kernel_h * c.kernel_w);
        glorot(seg, static_cast<double>(c.in_ch) * area,
               static_cast<double>(c.out_ch) * area);
        break;
      }
      case SegmentKind::kLinearWeight: {
        const std::size_t flat = shapes.back().size();
        std::size_t in = flat;
        std::size_t out = spec.classes;
        if (spec.hidden > 0) {
          in = seg.layer == 0 ? flat : spec.hidden;
          out = seg.layer == 0 ? spec.hidden : spec.classes;
        }
        glorot(seg, static_cast<double>(in), static_cast<double>(out));
        break;
      }
      case SegmentKind::kBnScale:
        std::fill_n(m.params.begin() + static_cast<std::ptrdiff_t>(seg.offset),
                    seg.size, 1.0F);
        break;
      case SegmentKind::kPreluSlope:
        std::fill_n(m.params.begin() + static_cast<std::ptrdiff_t>(seg.offset),
                    seg.size, 0.25F);
        break;
      default:
        break;
    }
  }
  return m;
}

}  // namespace fedbeam::nn
