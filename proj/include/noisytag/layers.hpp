#pragma once

// Differentiable building blocks with explicit forward/backward passes and
// owned parameter/gradient buffers. Backward consumes the activations cached
// by the most recent forward; callers drive strict forward-then-backward
// sequences, one batch at a time.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "noisytag/errors.hpp"
#include "noisytag/rng.hpp"
#include "noisytag/tensor.hpp"

namespace noisytag {

template <class Real>
struct ParamTensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<Real> value;
  std::vector<Real> grad;

  ParamTensor() = default;
  ParamTensor(std::string name_, std::vector<std::size_t> shape_)
      : name(std::move(name_)), shape(std::move(shape_)) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    value.assign(n, Real(0));
    grad.assign(n, Real(0));
  }
  std::size_t size() const { return value.size(); }
  void zero_grad() { std::fill(grad.begin(), grad.end(), Real(0)); }
};

template <class Real>
using ParamRefs = std::vector<ParamTensor<Real>*>;

namespace init {

// Kaiming-uniform fan-in scaling; biases start at zero.
template <class Real>
void kaiming_uniform(ParamTensor<Real>& p, std::size_t fan_in, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  for (auto& v : p.value) v = static_cast<Real>(rng.uniform(-bound, bound));
}

}  // namespace init

template <class Real>
class Conv1d {
 public:
  Conv1d(std::string name, std::size_t in_ch, std::size_t out_ch, std::size_t kernel,
         std::size_t stride, std::size_t pad)
      : in_ch_(in_ch), out_ch_(out_ch), kernel_(kernel), stride_(stride), pad_(pad),
        w_(name + ".w", {out_ch, in_ch, kernel}), b_(name + ".b", {out_ch}) {}

  void init(Rng& rng) { init::kaiming_uniform(w_, in_ch_ * kernel_, rng); }

  std::size_t out_len(std::size_t in_len) const {
    return (in_len + 2 * pad_ - kernel_) / stride_ + 1;
  }

  Array3<Real> forward(const Array3<Real>& x) {
    if (x.ch != in_ch_) throw ShapeMismatch("conv1d: channel mismatch");
    x_ = x;
    const std::size_t t_out = out_len(x.len);
    Array3<Real> y(x.n, out_ch_, t_out);
    for (std::size_t i = 0; i < x.n; ++i) {
      for (std::size_t oc = 0; oc < out_ch_; ++oc) {
        Real* yrow = y.channel(i, oc);
        for (std::size_t t = 0; t < t_out; ++t) yrow[t] = b_.value[oc];
        for (std::size_t ic = 0; ic < in_ch_; ++ic) {
          const Real* xrow = x.channel(i, ic);
          const Real* wk = &w_.value[(oc * in_ch_ + ic) * kernel_];
          for (std::size_t k = 0; k < kernel_; ++k) {
            const Real wv = wk[k];
            const auto [t_lo, t_hi] = tap_range(k, x.len, t_out);
            const std::ptrdiff_t base =
                static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(pad_);
            for (std::size_t t = t_lo; t < t_hi; ++t) {
              yrow[t] += wv * xrow[static_cast<std::ptrdiff_t>(t * stride_) + base];
            }
          }
        }
      }
    }
    return y;
  }

  Array3<Real> backward(const Array3<Real>& gy) {
    const std::size_t t_out = gy.len;
    Array3<Real> gx(x_.n, in_ch_, x_.len);
    for (std::size_t i = 0; i < x_.n; ++i) {
      for (std::size_t oc = 0; oc < out_ch_; ++oc) {
        const Real* grow = gy.channel(i, oc);
        for (std::size_t t = 0; t < t_out; ++t) b_.grad[oc] += grow[t];
        for (std::size_t ic = 0; ic < in_ch_; ++ic) {
          const Real* xrow = x_.channel(i, ic);
          Real* gxrow = gx.channel(i, ic);
          const Real* wk = &w_.value[(oc * in_ch_ + ic) * kernel_];
          Real* gwk = &w_.grad[(oc * in_ch_ + ic) * kernel_];
          for (std::size_t k = 0; k < kernel_; ++k) {
            const Real wv = wk[k];
            const auto [t_lo, t_hi] = tap_range(k, x_.len, t_out);
            const std::ptrdiff_t base =
                static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(pad_);
            Real gw = Real(0);
            for (std::size_t t = t_lo; t < t_hi; ++t) {
              const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t * stride_) + base;
              gw += grow[t] * xrow[src];
              gxrow[src] += grow[t] * wv;
            }
            gwk[k] += gw;
          }
        }
      }
    }
    return gx;
  }

  ParamRefs<Real> params() { return {&w_, &b_}; }

 private:
  // Output positions t for which tap k reads inside [0, in_len).
  std::pair<std::size_t, std::size_t> tap_range(std::size_t k, std::size_t in_len,
                                                std::size_t t_out) const {
    const std::ptrdiff_t shift =
        static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(pad_);
    const std::ptrdiff_t s = static_cast<std::ptrdiff_t>(stride_);
    std::ptrdiff_t lo = shift < 0 ? (-shift + s - 1) / s : 0;
    std::ptrdiff_t hi = (static_cast<std::ptrdiff_t>(in_len) - 1 - shift) / s + 1;
    lo = std::max<std::ptrdiff_t>(lo, 0);
    hi = std::min<std::ptrdiff_t>(hi, static_cast<std::ptrdiff_t>(t_out));
    if (hi < lo) hi = lo;
    return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
  }

  std::size_t in_ch_, out_ch_, kernel_, stride_, pad_;
  ParamTensor<Real> w_, b_;
  Array3<Real> x_;
};

// Batch normalization over (batch, time) per channel. In train mode batch
// statistics normalize and running statistics are updated; in eval mode the
// stored running statistics make the layer a fixed affine map. Running
// statistics live in `running_mean/running_var` and are checkpointed with
// the parameters but never touched by the optimizer.
template <class Real>
class BatchNorm1d {
 public:
  BatchNorm1d(std::string name, std::size_t channels, double momentum = 0.1,
              double eps = 1e-5)
      : channels_(channels), momentum_(momentum), eps_(eps),
        gamma_(name + ".gamma", {channels}), beta_(name + ".beta", {channels}),
        running_mean_(name + ".running_mean", {channels}),
        running_var_(name + ".running_var", {channels}) {
    std::fill(gamma_.value.begin(), gamma_.value.end(), Real(1));
    std::fill(running_var_.value.begin(), running_var_.value.end(), Real(1));
  }

  Array3<Real> forward(const Array3<Real>& x, bool train) {
    if (x.ch != channels_) throw ShapeMismatch("batchnorm: channel mismatch");
    train_ = train;
    x_ = x;
    const std::size_t count = x.n * x.len;
    Array3<Real> y(x.n, x.ch, x.len);
    mean_.assign(channels_, 0.0);
    var_.assign(channels_, 0.0);
    inv_std_.assign(channels_, 0.0);
    for (std::size_t c = 0; c < channels_; ++c) {
      double mean, var;
      if (train) {
        double acc = 0.0;
        for (std::size_t i = 0; i < x.n; ++i) {
          const Real* row = x.channel(i, c);
          for (std::size_t t = 0; t < x.len; ++t) acc += row[t];
        }
        mean = acc / count;
        double vacc = 0.0;
        for (std::size_t i = 0; i < x.n; ++i) {
          const Real* row = x.channel(i, c);
          for (std::size_t t = 0; t < x.len; ++t) {
            const double d = row[t] - mean;
            vacc += d * d;
          }
        }
        var = vacc / count;  // biased, used for normalization
        const double unbiased = count > 1 ? vacc / (count - 1) : var;
        running_mean_.value[c] = static_cast<Real>(
            (1.0 - momentum_) * running_mean_.value[c] + momentum_ * mean);
        running_var_.value[c] = static_cast<Real>(
            (1.0 - momentum_) * running_var_.value[c] + momentum_ * unbiased);
      } else {
        mean = running_mean_.value[c];
        var = running_var_.value[c];
      }
      mean_[c] = mean;
      var_[c] = var;
      const double inv_std = 1.0 / std::sqrt(var + eps_);
      inv_std_[c] = inv_std;
      const double g = gamma_.value[c], b = beta_.value[c];
      for (std::size_t i = 0; i < x.n; ++i) {
        const Real* row = x.channel(i, c);
        Real* yrow = y.channel(i, c);
        for (std::size_t t = 0; t < x.len; ++t) {
          yrow[t] = static_cast<Real>((row[t] - mean) * inv_std * g + b);
        }
      }
    }
    return y;
  }

  Array3<Real> backward(const Array3<Real>& gy) {
    const std::size_t count = x_.n * x_.len;
    Array3<Real> gx(x_.n, x_.ch, x_.len);
    for (std::size_t c = 0; c < channels_; ++c) {
      const double mean = mean_[c];
      const double inv_std = inv_std_[c];
      const double g = gamma_.value[c];
      double sum_gy = 0.0, sum_gy_xhat = 0.0;
      for (std::size_t i = 0; i < x_.n; ++i) {
        const Real* xrow = x_.channel(i, c);
        const Real* grow = gy.channel(i, c);
        for (std::size_t t = 0; t < x_.len; ++t) {
          const double xhat = (xrow[t] - mean) * inv_std;
          sum_gy += grow[t];
          sum_gy_xhat += grow[t] * xhat;
        }
      }
      gamma_.grad[c] += static_cast<Real>(sum_gy_xhat);
      beta_.grad[c] += static_cast<Real>(sum_gy);
      for (std::size_t i = 0; i < x_.n; ++i) {
        const Real* xrow = x_.channel(i, c);
        const Real* grow = gy.channel(i, c);
        Real* gxrow = gx.channel(i, c);
        for (std::size_t t = 0; t < x_.len; ++t) {
          const double xhat = (xrow[t] - mean) * inv_std;
          double v;
          if (train_) {
            v = g * inv_std *
                (grow[t] - sum_gy / count - xhat * sum_gy_xhat / count);
          } else {
            v = g * inv_std * grow[t];
          }
          gxrow[t] = static_cast<Real>(v);
        }
      }
    }
    return gx;
  }

  // Learnable parameters only; running statistics are exposed separately so
  // checkpoints capture them without the optimizer seeing them.
  ParamRefs<Real> params() { return {&gamma_, &beta_}; }
  ParamRefs<Real> buffers() { return {&running_mean_, &running_var_}; }

 private:
  std::size_t channels_;
  double momentum_, eps_;
  ParamTensor<Real> gamma_, beta_, running_mean_, running_var_;
  Array3<Real> x_;
  std::vector<double> mean_, var_, inv_std_;
  bool train_ = true;
};

template <class Real>
class Relu3 {
 public:
  Array3<Real> forward(const Array3<Real>& x) {
    x_ = x;
    Array3<Real> y = x;
    for (auto& v : y.data) v = v > Real(0) ? v : Real(0);
    return y;
  }
  Array3<Real> backward(const Array3<Real>& gy) {
    Array3<Real> gx = gy;
    for (std::size_t i = 0; i < gx.data.size(); ++i) {
      if (x_.data[i] <= Real(0)) gx.data[i] = Real(0);
    }
    return gx;
  }

 private:
  Array3<Real> x_;
};

template <class Real>
class MaxPool3 {
 public:
  explicit MaxPool3(std::size_t width = 3) : width_(width) {}

  Array3<Real> forward(const Array3<Real>& x) {
    if (x.len % width_ != 0) throw ShapeMismatch("maxpool: length not divisible by pool width");
    const std::size_t t_out = x.len / width_;
    in_len_ = x.len;
    argmax_.assign(x.n * x.ch * t_out, 0);
    Array3<Real> y(x.n, x.ch, t_out);
    for (std::size_t i = 0; i < x.n; ++i) {
      for (std::size_t c = 0; c < x.ch; ++c) {
        const Real* row = x.channel(i, c);
        Real* yrow = y.channel(i, c);
        std::size_t* arow = &argmax_[(i * x.ch + c) * t_out];
        for (std::size_t t = 0; t < t_out; ++t) {
          std::size_t best = t * width_;
          Real bv = row[best];
          for (std::size_t k = 1; k < width_; ++k) {
            const std::size_t idx = t * width_ + k;
            if (row[idx] > bv) {
              bv = row[idx];
              best = idx;
            }
          }
          yrow[t] = bv;
          arow[t] = best;
        }
      }
    }
    return y;
  }

  Array3<Real> backward(const Array3<Real>& gy) {
    Array3<Real> gx(gy.n, gy.ch, in_len_);
    const std::size_t t_out = gy.len;
    for (std::size_t i = 0; i < gy.n; ++i) {
      for (std::size_t c = 0; c < gy.ch; ++c) {
        const Real* grow = gy.channel(i, c);
        Real* gxrow = gx.channel(i, c);
        const std::size_t* arow = &argmax_[(i * gy.ch + c) * t_out];
        for (std::size_t t = 0; t < t_out; ++t) gxrow[arow[t]] += grow[t];
      }
    }
    return gx;
  }

 private:
  std::size_t width_;
  std::size_t in_len_ = 0;
  std::vector<std::size_t> argmax_;
};

template <class Real>
class Linear {
 public:
  Linear(std::string name, std::size_t in_dim, std::size_t out_dim)
      : in_dim_(in_dim), out_dim_(out_dim),
        w_(name + ".w", {out_dim, in_dim}), b_(name + ".b", {out_dim}) {}

  void init(Rng& rng) { init::kaiming_uniform(w_, in_dim_, rng); }

  Array2<Real> forward(const Array2<Real>& x) {
    if (x.cols != in_dim_) throw ShapeMismatch("linear: input dim mismatch");
    x_ = x;
    Array2<Real> y(x.rows, out_dim_);
    for (std::size_t i = 0; i < x.rows; ++i) {
      const Real* xr = x.row(i);
      Real* yr = y.row(i);
      for (std::size_t o = 0; o < out_dim_; ++o) {
        const Real* wr = &w_.value[o * in_dim_];
        Real acc = b_.value[o];
        for (std::size_t k = 0; k < in_dim_; ++k) acc += wr[k] * xr[k];
        yr[o] = acc;
      }
    }
    return y;
  }

  Array2<Real> backward(const Array2<Real>& gy) {
    Array2<Real> gx(x_.rows, in_dim_);
    for (std::size_t i = 0; i < x_.rows; ++i) {
      const Real* xr = x_.row(i);
      const Real* gr = gy.row(i);
      Real* gxr = gx.row(i);
      for (std::size_t o = 0; o < out_dim_; ++o) {
        const Real g = gr[o];
        b_.grad[o] += g;
        const Real* wr = &w_.value[o * in_dim_];
        Real* gwr = &w_.grad[o * in_dim_];
        for (std::size_t k = 0; k < in_dim_; ++k) {
          gwr[k] += g * xr[k];
          gxr[k] += g * wr[k];
        }
      }
    }
    return gx;
  }

  ParamRefs<Real> params() { return {&w_, &b_}; }

 private:
  std::size_t in_dim_, out_dim_;
  ParamTensor<Real> w_, b_;
  Array2<Real> x_;
};

template <class Real>
class Relu2 {
 public:
  Array2<Real> forward(const Array2<Real>& x) {
    x_ = x;
    Array2<Real> y = x;
    for (auto& v : y.data) v = v > Real(0) ? v : Real(0);
    return y;
  }
  Array2<Real> backward(const Array2<Real>& gy) {
    Array2<Real> gx = gy;
    for (std::size_t i = 0; i < gx.data.size(); ++i) {
      if (x_.data[i] <= Real(0)) gx.data[i] = Real(0);
    }
    return gx;
  }

 private:
  Array2<Real> x_;
};

// Sigmoid head whose output is clamped into (eps, 1-eps). The clamp keeps a
// downstream probability-form BCE finite at any logit; backward uses the
// clamped output so sigmoid'/BCE' cancel exactly to (p - t).
template <class Real>
class SigmoidHead {
 public:
  static constexpr double clamp_eps() {
    return sizeof(Real) == 4 ? 1e-6 : 1e-12;
  }

  Array2<Real> forward(const Array2<Real>& x) {
    Array2<Real> y(x.rows, x.cols);
    const double eps = clamp_eps();
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double z = x.data[i];
      double p = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
      p = std::min(1.0 - eps, std::max(eps, p));
      y.data[i] = static_cast<Real>(p);
    }
    y_ = y;
    return y;
  }

  Array2<Real> backward(const Array2<Real>& gy) {
    Array2<Real> gx(gy.rows, gy.cols);
    for (std::size_t i = 0; i < gy.size(); ++i) {
      const double p = y_.data[i];
      gx.data[i] = static_cast<Real>(gy.data[i] * p * (1.0 - p));
    }
    return gx;
  }

 private:
  Array2<Real> y_;
};

// Dense-layer batch norm: wraps the channel-wise implementation by viewing
// [n, d] as [n, d, 1].
template <class Real>
class BatchNormDense {
 public:
  BatchNormDense(std::string name, std::size_t dim) : bn_(std::move(name), dim) {}

  Array2<Real> forward(const Array2<Real>& x, bool train) {
    Array2<Real> copy = x;
    return squeeze_time(bn_.forward(unsqueeze_time(std::move(copy)), train));
  }
  Array2<Real> backward(const Array2<Real>& gy) {
    Array2<Real> copy = gy;
    return squeeze_time(bn_.backward(unsqueeze_time(std::move(copy))));
  }
  ParamRefs<Real> params() { return bn_.params(); }
  ParamRefs<Real> buffers() { return bn_.buffers(); }

 private:
  BatchNorm1d<Real> bn_;
};

}  // namespace noisytag
