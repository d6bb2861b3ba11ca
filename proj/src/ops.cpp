// Copyright 2026 The TRR-SNN Authors
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

#include "trr/ops.hpp"

#include <algorithm>
#include <array>

#include "trr/error.hpp"

namespace trr {

namespace {

// Fixed 8-lane accumulation: vectorizes without -ffast-math and keeps a
// fixed summation order, so results are reproducible bit for bit.
float dot(const float* a, const float* b, std::size_t n) {
  std::array<float, 8> acc{};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    for (std::size_t l = 0; l < 8; ++l) acc[l] += a[i + l] * b[i + l];
  }
  float tail = 0.0f;
  for (; i < n; ++i) tail += a[i] * b[i];
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) +
         ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
}

void axpy(float* y, const float* x, float alpha, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void require_rank(const Tensor& t, std::size_t rank, const char* op,
                  const char* name) {
  check(t.rank() == rank, ErrorKind::kDimension,
        std::string(op) + ": " + name + " must have rank " +
            std::to_string(rank) + ", got shape " +
            shape_to_string(t.shape()));
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  check(a.shape() == b.shape(), ErrorKind::kDimension,
        std::string(op) + ": shape mismatch " + shape_to_string(a.shape()) +
            " vs " + shape_to_string(b.shape()));
}

struct ConvGeometry {
  std::size_t batch, in_c, in_h, in_w, out_c, k, stride, pad, out_h, out_w;
  std::size_t patch() const { return in_c * k * k; }
  std::size_t pixels() const { return out_h * out_w; }
};

// Images per column-matrix chunk, capped at roughly 64 MiB of columns.
std::size_t conv_chunk(const ConvGeometry& g) {
  const std::size_t per_image = g.patch() * g.pixels();
  return std::clamp<std::size_t>((std::size_t{1} << 24) / per_image, 1, g.batch);
}

// Column matrix [patch, nb * pixels] for nb consecutive images.
void im2col_chunk(const float* imgs, const ConvGeometry& g, std::size_t nb,
                  float* col) {
  const std::size_t pixels = g.pixels();
  const std::size_t width = nb * pixels;
  const std::size_t in_stride = g.in_c * g.in_h * g.in_w;
  for (std::size_t c = 0; c < g.in_c; ++c) {
    for (std::size_t ky = 0; ky < g.k; ++ky) {
      for (std::size_t kx = 0; kx < g.k; ++kx) {
        float* row = col + ((c * g.k + ky) * g.k + kx) * width;
        for (std::size_t n = 0; n < nb; ++n) {
          const float* img = imgs + n * in_stride + c * g.in_h * g.in_w;
          float* dst = row + n * pixels;
          for (std::size_t oy = 0; oy < g.out_h; ++oy) {
            const auto iy = static_cast<std::ptrdiff_t>(oy * g.stride + ky) -
                            static_cast<std::ptrdiff_t>(g.pad);
            const bool row_inside =
                iy >= 0 && iy < static_cast<std::ptrdiff_t>(g.in_h);
            for (std::size_t ox = 0; ox < g.out_w; ++ox) {
              const auto ix = static_cast<std::ptrdiff_t>(ox * g.stride + kx) -
                              static_cast<std::ptrdiff_t>(g.pad);
              const bool inside = row_inside && ix >= 0 &&
                                  ix < static_cast<std::ptrdiff_t>(g.in_w);
              dst[oy * g.out_w + ox] = inside ? img[iy * g.in_w + ix] : 0.0f;
            }
          }
        }
      }
    }
  }
}

void col2im_chunk_add(const float* col, const ConvGeometry& g, std::size_t nb,
                      float* imgs) {
  const std::size_t pixels = g.pixels();
  const std::size_t width = nb * pixels;
  const std::size_t in_stride = g.in_c * g.in_h * g.in_w;
  for (std::size_t c = 0; c < g.in_c; ++c) {
    for (std::size_t ky = 0; ky < g.k; ++ky) {
      for (std::size_t kx = 0; kx < g.k; ++kx) {
        const float* row = col + ((c * g.k + ky) * g.k + kx) * width;
        for (std::size_t n = 0; n < nb; ++n) {
          float* img = imgs + n * in_stride + c * g.in_h * g.in_w;
          const float* src = row + n * pixels;
          for (std::size_t oy = 0; oy < g.out_h; ++oy) {
            const auto iy = static_cast<std::ptrdiff_t>(oy * g.stride + ky) -
                            static_cast<std::ptrdiff_t>(g.pad);
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(g.in_h)) continue;
            for (std::size_t ox = 0; ox < g.out_w; ++ox) {
              const auto ix = static_cast<std::ptrdiff_t>(ox * g.stride + kx) -
                              static_cast<std::ptrdiff_t>(g.pad);
              if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(g.in_w)) continue;
              img[iy * g.in_w + ix] += src[oy * g.out_w + ox];
            }
          }
        }
      }
    }
  }
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& weight, std::size_t stride,
              std::size_t padding) {
  require_rank(input, 4, "conv2d", "input");
  require_rank(weight, 4, "conv2d", "weight");
  const auto& is = input.shape();
  const auto& ws = weight.shape();
  check(ws[2] == ws[3], ErrorKind::kDimension,
        "conv2d: kernel must be square, got " + shape_to_string(ws));
  check(ws[2] % 2 == 1, ErrorKind::kContract,
        "conv2d: kernel size must be odd, got " + std::to_string(ws[2]));
  check(is[1] == ws[1], ErrorKind::kDimension,
        "conv2d: input channels (axis 1 of input) " + std::to_string(is[1]) +
            " != weight channels (axis 1 of weight) " + std::to_string(ws[1]));
  check(stride >= 1, ErrorKind::kContract, "conv2d: stride must be >= 1");
  const std::size_t k = ws[2];
  check(is[2] + 2 * padding >= k && is[3] + 2 * padding >= k,
        ErrorKind::kDimension, "conv2d: kernel larger than padded input (axes 2,3)");
  check((is[2] + 2 * padding - k) % stride == 0 &&
            (is[3] + 2 * padding - k) % stride == 0,
        ErrorKind::kDimension,
        "conv2d: output size along axes 2,3 is not integral for input " +
            shape_to_string(is));

  ConvGeometry g{is[0], is[1], is[2], is[3], ws[0], k, stride, padding,
                 (is[2] + 2 * padding - k) / stride + 1,
                 (is[3] + 2 * padding - k) / stride + 1};
  Tensor out(Shape{g.batch, g.out_c, g.out_h, g.out_w});

  // Images are processed in chunks laid side by side in one column matrix
  // [patch, chunk * pixels], so the inner loops run over long rows even
  // when the feature maps are tiny.
  const std::size_t patch = g.patch();
  const std::size_t pixels = g.pixels();
  const std::size_t in_stride = g.in_c * g.in_h * g.in_w;
  const std::size_t out_stride = g.out_c * pixels;
  const std::size_t chunk = conv_chunk(g);
  {
    std::vector<float> col(patch * chunk * pixels);
    std::vector<float> acc(g.out_c * chunk * pixels);
    const float* x = input.data().data();
    const float* w = weight.data().data();
    float* y = out.mutable_data().data();
    for (std::size_t n0 = 0; n0 < g.batch; n0 += chunk) {
      const std::size_t nb = std::min(chunk, g.batch - n0);
      const std::size_t width = nb * pixels;
      im2col_chunk(x + n0 * in_stride, g, nb, col.data());
      std::fill(acc.begin(), acc.begin() + g.out_c * width, 0.0f);
      for (std::size_t co = 0; co < g.out_c; ++co) {
        float* arow = acc.data() + co * width;
        const float* wrow = w + co * patch;
        for (std::size_t r = 0; r < patch; ++r) {
          const float wv = wrow[r];
          if (wv == 0.0f) continue;
          axpy(arow, col.data() + r * width, wv, width);
        }
      }
      for (std::size_t n = 0; n < nb; ++n) {
        for (std::size_t co = 0; co < g.out_c; ++co) {
          std::copy_n(acc.data() + co * width + n * pixels, pixels,
                      y + (n0 + n) * out_stride + co * pixels);
        }
      }
    }
  }

  auto in_impl = input.impl();
  auto w_impl = weight.impl();
  detail::record(out, OpKind::kConv2d, {input, weight},
                 [in_impl, w_impl, g](std::span<const float> gout) {
    const std::size_t patch = g.patch();
    const std::size_t pixels = g.pixels();
    const std::size_t in_stride = g.in_c * g.in_h * g.in_w;
    const std::size_t out_stride = g.out_c * pixels;
    const std::size_t chunk = conv_chunk(g);
    std::vector<float> col(patch * chunk * pixels);
    std::vector<float> go(g.out_c * chunk * pixels);
    const float* x = in_impl->data.data();
    const float* w = w_impl->data.data();
    float* dw = w_impl->requires_grad ? detail::grad_sink(w_impl).data() : nullptr;
    float* dx = in_impl->requires_grad ? detail::grad_sink(in_impl).data() : nullptr;
    for (std::size_t n0 = 0; n0 < g.batch; n0 += chunk) {
      const std::size_t nb = std::min(chunk, g.batch - n0);
      const std::size_t width = nb * pixels;
      for (std::size_t n = 0; n < nb; ++n) {
        for (std::size_t co = 0; co < g.out_c; ++co) {
          std::copy_n(gout.data() + (n0 + n) * out_stride + co * pixels, pixels,
                      go.data() + co * width + n * pixels);
        }
      }
      if (dw) {
        im2col_chunk(x + n0 * in_stride, g, nb, col.data());
        for (std::size_t co = 0; co < g.out_c; ++co) {
          for (std::size_t r = 0; r < patch; ++r) {
            dw[co * patch + r] +=
                dot(go.data() + co * width, col.data() + r * width, width);
          }
        }
      }
      if (dx) {
        std::fill(col.begin(), col.begin() + patch * width, 0.0f);
        for (std::size_t co = 0; co < g.out_c; ++co) {
          for (std::size_t r = 0; r < patch; ++r) {
            const float wv = w[co * patch + r];
            if (wv == 0.0f) continue;
            axpy(col.data() + r * width, go.data() + co * width, wv, width);
          }
        }
        col2im_chunk_add(col.data(), g, nb, dx + n0 * in_stride);
      }
    }
  });
  return out;
}

Tensor linear(const Tensor& input, const Tensor& weight, const Tensor& bias) {
  require_rank(input, 2, "linear", "input");
  require_rank(weight, 2, "linear", "weight");
  const std::size_t batch = input.dim(0), din = input.dim(1),
                    dout = weight.dim(0);
  check(weight.dim(1) == din, ErrorKind::kDimension,
        "linear: input features (axis 1) " + std::to_string(din) +
            " != weight features (axis 1) " + std::to_string(weight.dim(1)));
  const bool has_bias = bias.defined();
  if (has_bias) {
    check(bias.rank() == 1 && bias.dim(0) == dout, ErrorKind::kDimension,
          "linear: bias shape " + shape_to_string(bias.shape()) +
              " does not match output features " + std::to_string(dout));
  }
  Tensor out(Shape{batch, dout});
  {
    const float* x = input.data().data();
    const float* w = weight.data().data();
    float* y = out.mutable_data().data();
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t o = 0; o < dout; ++o) {
        float v = dot(x + b * din, w + o * din, din);
        if (has_bias) v += bias.data()[o];
        y[b * dout + o] = v;
      }
    }
  }
  std::vector<Tensor> inputs{input, weight};
  if (has_bias) inputs.push_back(bias);
  auto in_impl = input.impl();
  auto w_impl = weight.impl();
  auto b_impl = has_bias ? bias.impl() : nullptr;
  detail::record(out, OpKind::kLinear, std::move(inputs),
                 [in_impl, w_impl, b_impl, batch, din, dout](
                     std::span<const float> g) {
    const float* x = in_impl->data.data();
    const float* w = w_impl->data.data();
    if (in_impl->requires_grad) {
      float* dx = detail::grad_sink(in_impl).data();
      for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t o = 0; o < dout; ++o) {
          axpy(dx + b * din, w + o * din, g[b * dout + o], din);
        }
      }
    }
    if (w_impl->requires_grad) {
      float* dw = detail::grad_sink(w_impl).data();
      for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t o = 0; o < dout; ++o) {
          axpy(dw + o * din, x + b * din, g[b * dout + o], din);
        }
      }
    }
    if (b_impl && b_impl->requires_grad) {
      float* db = detail::grad_sink(b_impl).data();
      for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t o = 0; o < dout; ++o) db[o] += g[b * dout + o];
      }
    }
  });
  return out;
}

Tensor avg_pool2d(const Tensor& input, std::size_t window, std::size_t stride) {
  require_rank(input, 4, "avg_pool2d", "input");
  check(window >= 1 && stride >= 1, ErrorKind::kContract,
        "avg_pool2d: window and stride must be >= 1");
  const auto& s = input.shape();
  const std::size_t planes = s[0] * s[1], h = s[2], w = s[3];
  check(h >= window && w >= window && (h - window) % stride == 0 &&
            (w - window) % stride == 0,
        ErrorKind::kDimension,
        "avg_pool2d: spatial axes 2,3 of " + shape_to_string(s) +
            " not divisible for window " + std::to_string(window) +
            ", stride " + std::to_string(stride));
  const std::size_t oh = (h - window) / stride + 1, ow = (w - window) / stride + 1;
  const float inv = 1.0f / static_cast<float>(window * window);
  Tensor out(Shape{s[0], s[1], oh, ow});
  const float* x = input.data().data();
  float* y = out.mutable_data().data();
  for (std::size_t p = 0; p < planes; ++p) {
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        float acc = 0.0f;
        for (std::size_t ky = 0; ky < window; ++ky) {
          for (std::size_t kx = 0; kx < window; ++kx) {
            acc += x[(p * h + oy * stride + ky) * w + ox * stride + kx];
          }
        }
        y[(p * oh + oy) * ow + ox] = acc * inv;
      }
    }
  }
  auto in_impl = input.impl();
  detail::record(out, OpKind::kAvgPool2d, {input},
                 [in_impl, planes, h, w, oh, ow, window, stride, inv](
                     std::span<const float> g) {
    float* dx = detail::grad_sink(in_impl).data();
    for (std::size_t p = 0; p < planes; ++p) {
      for (std::size_t oy = 0; oy < oh; ++oy) {
        for (std::size_t ox = 0; ox < ow; ++ox) {
          const float v = g[(p * oh + oy) * ow + ox] * inv;
          for (std::size_t ky = 0; ky < window; ++ky) {
            for (std::size_t kx = 0; kx < window; ++kx) {
              dx[(p * h + oy * stride + ky) * w + ox * stride + kx] += v;
            }
          }
        }
      }
    }
  });
  return out;
}

Tensor global_avg_pool(const Tensor& input) {
  require_rank(input, 4, "global_avg_pool", "input");
  const auto& s = input.shape();
  const std::size_t planes = s[0] * s[1], area = s[2] * s[3];
  const float inv = 1.0f / static_cast<float>(area);
  Tensor out(Shape{s[0], s[1]});
  const float* x = input.data().data();
  float* y = out.mutable_data().data();
  for (std::size_t p = 0; p < planes; ++p) {
    float acc = 0.0f;
    for (std::size_t i = 0; i < area; ++i) acc += x[p * area + i];
    y[p] = acc * inv;
  }
  auto in_impl = input.impl();
  detail::record(out, OpKind::kGlobalAvgPool, {input},
                 [in_impl, planes, area, inv](std::span<const float> g) {
    float* dx = detail::grad_sink(in_impl).data();
    for (std::size_t p = 0; p < planes; ++p) {
      const float v = g[p] * inv;
      for (std::size_t i = 0; i < area; ++i) dx[p * area + i] += v;
    }
  });
  return out;
}

Tensor channel_affine(const Tensor& input, const Tensor& scale_t,
                      const Tensor& shift) {
  check(input.rank() == 4 || input.rank() == 2, ErrorKind::kDimension,
        "channel_affine: input must be [N,C,H,W] or [N,C], got " +
            shape_to_string(input.shape()));
  const std::size_t n = input.dim(0), c = input.dim(1);
  const std::size_t area = input.rank() == 4 ? input.dim(2) * input.dim(3) : 1;
  check(scale_t.shape() == Shape{c} && shift.shape() == Shape{c},
        ErrorKind::kDimension,
        "channel_affine: scale/shift must have shape [" + std::to_string(c) +
            "]");
  Tensor out(input.shape());
  const float* x = input.data().data();
  const float* a = scale_t.data().data();
  const float* b = shift.data().data();
  float* y = out.mutable_data().data();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      const std::size_t base = (i * c + ch) * area;
      for (std::size_t j = 0; j < area; ++j) y[base + j] = x[base + j] * a[ch] + b[ch];
    }
  }
  auto x_impl = input.impl();
  auto a_impl = scale_t.impl();
  auto b_impl = shift.impl();
  detail::record(out, OpKind::kChannelAffine, {input, scale_t, shift},
                 [x_impl, a_impl, b_impl, n, c, area](std::span<const float> g) {
    const float* x = x_impl->data.data();
    const float* a = a_impl->data.data();
    float* dx = x_impl->requires_grad ? detail::grad_sink(x_impl).data() : nullptr;
    float* da = a_impl->requires_grad ? detail::grad_sink(a_impl).data() : nullptr;
    float* db = b_impl->requires_grad ? detail::grad_sink(b_impl).data() : nullptr;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        const std::size_t base = (i * c + ch) * area;
        if (dx) axpy(dx + base, g.data() + base, a[ch], area);
        if (da) da[ch] += dot(g.data() + base, x + base, area);
        if (db) {
          float acc = 0.0f;
          for (std::size_t j = 0; j < area; ++j) acc += g[base + j];
          db[ch] += acc;
        }
      }
    }
  });
  return out;
}

Tensor elementwise(const Tensor& a, const Tensor& b, Elementwise kind) {
  require_same_shape(a, b, kind == Elementwise::kAdd ? "add" : "mul");
  Tensor out(a.shape());
  const auto x = a.data();
  const auto y = b.data();
  auto z = out.mutable_data();
  if (kind == Elementwise::kAdd) {
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = x[i] + y[i];
  } else {
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = x[i] * y[i];
  }
  auto a_impl = a.impl();
  auto b_impl = b.impl();
  detail::record(out, kind == Elementwise::kAdd ? OpKind::kAdd : OpKind::kMul,
                 {a, b}, [a_impl, b_impl, kind](std::span<const float> g) {
    if (kind == Elementwise::kAdd) {
      if (a_impl->requires_grad) {
        auto da = detail::grad_sink(a_impl);
        for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i];
      }
      if (b_impl->requires_grad) {
        auto db = detail::grad_sink(b_impl);
        for (std::size_t i = 0; i < g.size(); ++i) db[i] += g[i];
      }
    } else {
      if (a_impl->requires_grad) {
        auto da = detail::grad_sink(a_impl);
        for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i] * b_impl->data[i];
      }
      if (b_impl->requires_grad) {
        auto db = detail::grad_sink(b_impl);
        for (std::size_t i = 0; i < g.size(); ++i) db[i] += g[i] * a_impl->data[i];
      }
    }
  });
  return out;
}

Tensor scale(const Tensor& a, float factor) {
  Tensor out(a.shape());
  const auto x = a.data();
  auto y = out.mutable_data();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] * factor;
  auto a_impl = a.impl();
  detail::record(out, OpKind::kScale, {a},
                 [a_impl, factor](std::span<const float> g) {
    auto da = detail::grad_sink(a_impl);
    for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i] * factor;
  });
  return out;
}

Tensor sum(const Tensor& a) {
  float acc = 0.0f;
  for (float v : a.data()) acc += v;
  Tensor out = Tensor::scalar(acc);
  auto a_impl = a.impl();
  detail::record(out, OpKind::kSum, {a}, [a_impl](std::span<const float> g) {
    auto da = detail::grad_sink(a_impl);
    for (auto& v : da) v += g[0];
  });
  return out;
}

Tensor mean_over_axis(const Tensor& input, std::size_t axis) {
  const auto& s = input.shape();
  check(axis < s.size(), ErrorKind::kDimension,
        "mean_over_axis: axis " + std::to_string(axis) +
            " out of range for shape " + shape_to_string(s));
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  const std::size_t len = s[axis];
  check(len > 0, ErrorKind::kDimension, "mean_over_axis: empty axis");
  Shape out_shape;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i != axis) out_shape.push_back(s[i]);
  }
  const float inv = 1.0f / static_cast<float>(len);
  Tensor out(out_shape);
  const float* x = input.data().data();
  float* y = out.mutable_data().data();
  for (std::size_t o = 0; o < outer; ++o) {
    float* yrow = y + o * inner;
    for (std::size_t l = 0; l < len; ++l) {
      const float* xrow = x + (o * len + l) * inner;
      for (std::size_t i = 0; i < inner; ++i) yrow[i] += xrow[i];
    }
    for (std::size_t i = 0; i < inner; ++i) yrow[i] *= inv;
  }
  auto in_impl = input.impl();
  detail::record(out, OpKind::kMeanAxis, {input},
                 [in_impl, outer, inner, len, inv](std::span<const float> g) {
    float* dx = detail::grad_sink(in_impl).data();
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t l = 0; l < len; ++l) {
        axpy(dx + (o * len + l) * inner, g.data() + o * inner, inv, inner);
      }
    }
  });
  return out;
}

Tensor reshape(const Tensor& input, Shape shape) {
  check(shape_numel(shape) == input.numel(), ErrorKind::kDimension,
        "reshape: cannot view " + shape_to_string(input.shape()) + " as " +
            shape_to_string(shape));
  Tensor out(std::move(shape),
             std::vector<float>(input.data().begin(), input.data().end()));
  auto in_impl = input.impl();
  detail::record(out, OpKind::kReshape, {input},
                 [in_impl](std::span<const float> g) {
    auto dx = detail::grad_sink(in_impl);
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] += g[i];
  });
  return out;
}

Tensor permute_time(const Tensor& input, const std::vector<std::size_t>& perm) {
  check(input.rank() >= 1, ErrorKind::kDimension,
        "permute_time: input must have a leading time axis");
  const std::size_t steps = input.dim(0);
  check(perm.size() == steps, ErrorKind::kContract,
        "permute_time: permutation length " + std::to_string(perm.size()) +
            " != T " + std::to_string(steps));
  std::vector<bool> hit(steps, false);
  for (auto p : perm) {
    check(p < steps && !hit[p], ErrorKind::kContract,
          "permute_time: not a permutation");
    hit[p] = true;
  }
  const std::size_t frame = steps ? input.numel() / steps : 0;
  Tensor out(input.shape());
  const float* x = input.data().data();
  float* y = out.mutable_data().data();
  for (std::size_t t = 0; t < steps; ++t) {
    std::copy_n(x + perm[t] * frame, frame, y + t * frame);
  }
  auto in_impl = input.impl();
  detail::record(out, OpKind::kPermuteTime, {input},
                 [in_impl, perm, frame](std::span<const float> g) {
    float* dx = detail::grad_sink(in_impl).data();
    for (std::size_t t = 0; t < perm.size(); ++t) {
      const float* src = g.data() + t * frame;
      float* dst = dx + perm[t] * frame;
      for (std::size_t i = 0; i < frame; ++i) dst[i] += src[i];
    }
  });
  return out;
}

}  // namespace trr
