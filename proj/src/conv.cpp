// Copyright 2026 The segrobust Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "segrobust/conv.hpp"

#include <Eigen/Core>

#include "segrobust/error.hpp"

namespace segrobust {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

struct ConvGeometry {
  std::size_t height, width, cin, kh, kw, cout;
  std::size_t patch() const { return kh * kw * cin; }
  std::size_t pixels() const { return height * width; }
};

ConvGeometry check_geometry(const Tensor& input, const Tensor& kernel) {
  if (input.rank() != 3) throw UsageError("conv2d: input must be H x W x Cin");
  if (kernel.rank() != 4) throw UsageError("conv2d: kernel must be kh x kw x Cin x Cout");
  ConvGeometry g{input.dim(0), input.dim(1), input.dim(2), kernel.dim(0), kernel.dim(1), kernel.dim(3)};
  if (kernel.dim(2) != g.cin) throw UsageError("conv2d: kernel Cin does not match input channels");
  if (g.kh % 2 == 0 || g.kw % 2 == 0) throw UsageError("conv2d: kernel extents must be odd");
  return g;
}

// Row p of the result holds the zero-padded receptive field of pixel p,
// ordered (dy, dx, cin) to match the kernel layout.
RowMatrix im2col(const Tensor& input, const ConvGeometry& g) {
  RowMatrix cols = RowMatrix::Zero(static_cast<Eigen::Index>(g.pixels()), static_cast<Eigen::Index>(g.patch()));
  const auto ry = static_cast<std::ptrdiff_t>(g.kh / 2);
  const auto rx = static_cast<std::ptrdiff_t>(g.kw / 2);
  const auto h = static_cast<std::ptrdiff_t>(g.height);
  const auto w = static_cast<std::ptrdiff_t>(g.width);
  const double* src = input.data().data();
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      double* row = cols.data() + (y * w + x) * static_cast<std::ptrdiff_t>(g.patch());
      for (std::ptrdiff_t dy = -ry; dy <= ry; ++dy) {
        const std::ptrdiff_t sy = y + dy;
        if (sy < 0 || sy >= h) continue;
        for (std::ptrdiff_t dx = -rx; dx <= rx; ++dx) {
          const std::ptrdiff_t sx = x + dx;
          if (sx < 0 || sx >= w) continue;
          const std::size_t offset = static_cast<std::size_t>((dy + ry) * static_cast<std::ptrdiff_t>(g.kw) + (dx + rx)) * g.cin;
          const double* pix = src + (sy * w + sx) * static_cast<std::ptrdiff_t>(g.cin);
          std::copy(pix, pix + g.cin, row + offset);
        }
      }
    }
  }
  return cols;
}

void col2im(const RowMatrix& cols, const ConvGeometry& g, Tensor& out) {
  const auto ry = static_cast<std::ptrdiff_t>(g.kh / 2);
  const auto rx = static_cast<std::ptrdiff_t>(g.kw / 2);
  const auto h = static_cast<std::ptrdiff_t>(g.height);
  const auto w = static_cast<std::ptrdiff_t>(g.width);
  double* dst = out.data().data();
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      const double* row = cols.data() + (y * w + x) * static_cast<std::ptrdiff_t>(g.patch());
      for (std::ptrdiff_t dy = -ry; dy <= ry; ++dy) {
        const std::ptrdiff_t sy = y + dy;
        if (sy < 0 || sy >= h) continue;
        for (std::ptrdiff_t dx = -rx; dx <= rx; ++dx) {
          const std::ptrdiff_t sx = x + dx;
          if (sx < 0 || sx >= w) continue;
          const std::size_t offset = static_cast<std::size_t>((dy + ry) * static_cast<std::ptrdiff_t>(g.kw) + (dx + rx)) * g.cin;
          double* pix = dst + (sy * w + sx) * static_cast<std::ptrdiff_t>(g.cin);
          for (std::size_t c = 0; c < g.cin; ++c) pix[c] += row[offset + c];
        }
      }
    }
  }
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& kernel, std::span<const double> bias) {
  const ConvGeometry g = check_geometry(input, kernel);
  if (bias.size() != g.cout) throw UsageError("conv2d: bias length does not match Cout");

  const auto patch = static_cast<Eigen::Index>(g.patch());
  const auto cout = static_cast<Eigen::Index>(g.cout);
  const auto pixels = static_cast<Eigen::Index>(g.pixels());
  ConstMatrixMap weights(kernel.data().data(), patch, cout);
  Eigen::Map<const Eigen::RowVectorXd> b(bias.data(), cout);

  Tensor out({g.height, g.width, g.cout});
  MatrixMap result(out.data().data(), pixels, cout);
  if (g.kh == 1 && g.kw == 1) {
    result.noalias() = ConstMatrixMap(input.data().data(), pixels, patch) * weights;
  } else {
    result.noalias() = im2col(input, g) * weights;
  }
  result.rowwise() += b;
  return out;
}

Conv2dGrads conv2d_backward(const Tensor& grad_out, const Tensor& input, const Tensor& kernel) {
  const ConvGeometry g = check_geometry(input, kernel);
  if (grad_out.shape() != std::vector<std::size_t>{g.height, g.width, g.cout}) {
    throw UsageError("conv2d_backward: grad_out shape does not match conv2d output");
  }
  const auto patch = static_cast<Eigen::Index>(g.patch());
  const auto cout = static_cast<Eigen::Index>(g.cout);
  const auto pixels = static_cast<Eigen::Index>(g.pixels());
  ConstMatrixMap go(grad_out.data().data(), pixels, cout);
  ConstMatrixMap weights(kernel.data().data(), patch, cout);

  Conv2dGrads grads{Tensor(input.shape()), Tensor(kernel.shape()), std::vector<double>(g.cout, 0.0)};
  MatrixMap gk(grads.kernel.data().data(), patch, cout);
  // Plain pixel-order sum: Eigen's vectorized reductions pick their order
  // from buffer alignment, which would tie results to heap addresses.
  const double* gp = grad_out.data().data();
  for (std::size_t p = 0; p < g.pixels(); ++p) {
    for (std::size_t c = 0; c < g.cout; ++c) grads.bias[c] += gp[p * g.cout + c];
  }

  if (g.kh == 1 && g.kw == 1) {
    ConstMatrixMap cols(input.data().data(), pixels, patch);
    gk.noalias() = cols.transpose() * go;
    MatrixMap(grads.input.data().data(), pixels, patch).noalias() = go * weights.transpose();
    return grads;
  }

  const RowMatrix cols = im2col(input, g);
  gk.noalias() = cols.transpose() * go;
  RowMatrix grad_cols(pixels, patch);
  grad_cols.noalias() = go * weights.transpose();
  col2im(grad_cols, g, grads.input);
  return grads;
}

}  // namespace segrobust
