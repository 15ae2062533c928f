#pragma once

// Minimal dense containers for the training graph: 2-D (batch x features)
// and 3-D (batch x channels x time), row-major, flat storage.

#include <cstddef>
#include <vector>

#include "noisytag/errors.hpp"

namespace noisytag {

template <class Real>
struct Array2 {
  std::size_t rows = 0, cols = 0;
  std::vector<Real> data;

  Array2() = default;
  Array2(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, Real(0)) {}

  Real& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  const Real& at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  Real* row(std::size_t r) { return data.data() + r * cols; }
  const Real* row(std::size_t r) const { return data.data() + r * cols; }
  std::size_t size() const { return data.size(); }
};

template <class Real>
struct Array3 {
  std::size_t n = 0, ch = 0, len = 0;
  std::vector<Real> data;

  Array3() = default;
  Array3(std::size_t n_, std::size_t ch_, std::size_t len_)
      : n(n_), ch(ch_), len(len_), data(n_ * ch_ * len_, Real(0)) {}

  Real& at(std::size_t i, std::size_t c, std::size_t t) {
    return data[(i * ch + c) * len + t];
  }
  const Real& at(std::size_t i, std::size_t c, std::size_t t) const {
    return data[(i * ch + c) * len + t];
  }
  Real* channel(std::size_t i, std::size_t c) { return data.data() + (i * ch + c) * len; }
  const Real* channel(std::size_t i, std::size_t c) const {
    return data.data() + (i * ch + c) * len;
  }
  std::size_t size() const { return data.size(); }
};

// Row-major [n][d] and [n][d][1] share a layout, so these reshapes move the
// buffer without copying.
template <class Real>
Array2<Real> squeeze_time(Array3<Real>&& x) {
  if (x.len != 1) throw ShapeMismatch("squeeze_time: temporal axis not reduced to 1");
  Array2<Real> out;
  out.rows = x.n;
  out.cols = x.ch;
  out.data = std::move(x.data);
  return out;
}

template <class Real>
Array3<Real> unsqueeze_time(Array2<Real>&& x) {
  Array3<Real> out;
  out.n = x.rows;
  out.ch = x.cols;
  out.len = 1;
  out.data = std::move(x.data);
  return out;
}

}  // namespace noisytag
