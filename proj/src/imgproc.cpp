// Copyright 2026 The Endovo Authors
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

#include "endovo/imgproc.hpp"

#include <cmath>
#include <sstream>

#include "endovo/error.hpp"

namespace endovo {

namespace {

void require_same_size(const GrayImage& a, const GrayImage& b, const char* op) {
  if (!a.same_size(b)) {
    std::ostringstream os;
    os << op << ": dimension mismatch " << a.width() << "x" << a.height()
       << " vs " << b.width() << "x" << b.height();
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
}

struct BilinearStencil {
  int u0;
  int v0;
  int u1;  // u0 + 1, or u0 on single-column images
  int v1;
  double fu;
  double fv;
};

// Resolves the 2x2 support of (u, v). A coordinate sitting exactly on the last
// row or column uses the previous cell with weight 1 on its far side.
std::optional<BilinearStencil> stencil(int width, int height, double u, double v) {
  if (std::isnan(u) || std::isnan(v)) {
    throw Error(ErrorCode::kInvalidArgument, "sample_bilinear: NaN coordinate");
  }
  if (!(u >= 0.0) || !(v >= 0.0) || u > width - 1 || v > height - 1) {
    return std::nullopt;
  }
  BilinearStencil s;
  s.u0 = static_cast<int>(u);
  s.v0 = static_cast<int>(v);
  if (width == 1 || height == 1) {
    if ((width == 1 && u != 0.0) || (height == 1 && v != 0.0)) return std::nullopt;
  }
  if (s.u0 == width - 1 && width > 1) --s.u0;
  if (s.v0 == height - 1 && height > 1) --s.v0;
  s.u1 = std::min(s.u0 + 1, width - 1);
  s.v1 = std::min(s.v0 + 1, height - 1);
  s.fu = u - s.u0;
  s.fv = v - s.v0;
  return s;
}

int reflect(int i, int n) {
  if (i < 0) return -i;
  if (i >= n) return 2 * (n - 1) - i;
  return i;
}

// Uniform box mean with reflection padding, separable.
GrayImage box_mean(const GrayImage& img, int window) {
  const int r = window / 2;
  const int w = img.width();
  const int h = img.height();
  GrayImage rows(w, h);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      double s = 0.0;
      for (int k = -r; k <= r; ++k) s += img(reflect(u + k, w), v);
      rows(u, v) = s;
    }
  }
  GrayImage out(w, h);
  const double norm = 1.0 / (double(window) * window);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      double s = 0.0;
      for (int k = -r; k <= r; ++k) s += rows(u, reflect(v + k, h));
      out(u, v) = s * norm;
    }
  }
  return out;
}

}  // namespace

GrayImage to_grayscale(const RgbImage& rgb) {
  GrayImage out(rgb.width, rgb.height);
  for (int v = 0; v < rgb.height; ++v) {
    for (int u = 0; u < rgb.width; ++u) {
      const double* p = rgb.pixel(u, v);
      out(u, v) = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
    }
  }
  return out;
}

GrayImage downsample(const GrayImage& img) {
  if (img.width() < 2 || img.height() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "downsample: image must be at least 2x2");
  }
  GrayImage out(img.width() / 2, img.height() / 2);
  for (int v = 0; v < out.height(); ++v) {
    for (int u = 0; u < out.width(); ++u) {
      const int su = 2 * u;
      const int sv = 2 * v;
      out(u, v) = 0.25 * (img(su, sv) + img(su + 1, sv) + img(su, sv + 1) +
                          img(su + 1, sv + 1));
    }
  }
  return out;
}

DepthImage downsample_depth(const DepthImage& depth) {
  if (depth.width() < 2 || depth.height() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "downsample_depth: image must be at least 2x2");
  }
  DepthImage out(depth.width() / 2, depth.height() / 2, kInvalidDepth);
  for (int v = 0; v < out.height(); ++v) {
    for (int u = 0; u < out.width(); ++u) {
      double sum = 0.0;
      int n = 0;
      for (int dv = 0; dv < 2; ++dv) {
        for (int du = 0; du < 2; ++du) {
          const double d = depth(2 * u + du, 2 * v + dv);
          if (is_valid_depth(d)) {
            sum += d;
            ++n;
          }
        }
      }
      if (n > 0) out(u, v) = sum / n;
    }
  }
  return out;
}

std::optional<double> sample_bilinear(const GrayImage& img, double u, double v) {
  auto s = stencil(img.width(), img.height(), u, v);
  if (!s) return std::nullopt;
  const double w00 = (1.0 - s->fu) * (1.0 - s->fv);
  const double w10 = s->fu * (1.0 - s->fv);
  const double w01 = (1.0 - s->fu) * s->fv;
  const double w11 = s->fu * s->fv;
  return w00 * img(s->u0, s->v0) + w10 * img(s->u1, s->v0) +
         w01 * img(s->u0, s->v1) + w11 * img(s->u1, s->v1);
}

std::optional<double> sample_bilinear_depth(const DepthImage& depth, double u,
                                            double v) {
  auto s = stencil(depth.width(), depth.height(), u, v);
  if (!s) return std::nullopt;
  const double w[4] = {(1.0 - s->fu) * (1.0 - s->fv), s->fu * (1.0 - s->fv),
                       (1.0 - s->fu) * s->fv, s->fu * s->fv};
  const double d[4] = {depth(s->u0, s->v0), depth(s->u1, s->v0),
                       depth(s->u0, s->v1), depth(s->u1, s->v1)};
  double out = 0.0;
  for (int k = 0; k < 4; ++k) {
    if (w[k] == 0.0) continue;
    if (!is_valid_depth(d[k])) return std::nullopt;
    out += w[k] * d[k];
  }
  return out;
}

std::optional<BilinearSample> sample_bilinear_with_gradient(const GrayImage& img,
                                                            double u, double v) {
  if (img.width() < 2 || img.height() < 2) return std::nullopt;
  auto s = stencil(img.width(), img.height(), u, v);
  if (!s) return std::nullopt;
  const double i00 = img(s->u0, s->v0);
  const double i10 = img(s->u1, s->v0);
  const double i01 = img(s->u0, s->v1);
  const double i11 = img(s->u1, s->v1);
  BilinearSample out;
  out.value = (1.0 - s->fu) * (1.0 - s->fv) * i00 + s->fu * (1.0 - s->fv) * i10 +
              (1.0 - s->fu) * s->fv * i01 + s->fu * s->fv * i11;
  out.du = (1.0 - s->fv) * (i10 - i00) + s->fv * (i11 - i01);
  out.dv = (1.0 - s->fu) * (i01 - i00) + s->fu * (i11 - i10);
  return out;
}

ImageGradient gradient(const GrayImage& img) {
  const int w = img.width();
  const int h = img.height();
  if (w < 3 || h < 3) {
    throw Error(ErrorCode::kInvalidArgument, "gradient: image must be at least 3x3");
  }
  ImageGradient g{GrayImage(w, h), GrayImage(w, h)};
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (u == 0) {
        g.gx(u, v) = img(1, v) - img(0, v);
      } else if (u == w - 1) {
        g.gx(u, v) = img(w - 1, v) - img(w - 2, v);
      } else {
        g.gx(u, v) = 0.5 * (img(u + 1, v) - img(u - 1, v));
      }
      if (v == 0) {
        g.gy(u, v) = img(u, 1) - img(u, 0);
      } else if (v == h - 1) {
        g.gy(u, v) = img(u, h - 1) - img(u, h - 2);
      } else {
        g.gy(u, v) = 0.5 * (img(u, v + 1) - img(u, v - 1));
      }
    }
  }
  return g;
}

SsimResult ssim(const GrayImage& a, const GrayImage& b, int window) {
  require_same_size(a, b, "ssim");
  if (window < 3 || window % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument, "ssim: window must be odd and >= 3");
  }
  if (window / 2 >= a.width() || window / 2 >= a.height()) {
    throw Error(ErrorCode::kInvalidArgument, "ssim: window larger than image");
  }
  constexpr double kC1 = 0.01 * 0.01;
  constexpr double kC2 = 0.03 * 0.03;
  const int w = a.width();
  const int h = a.height();
  GrayImage aa(w, h), bb(w, h), ab(w, h);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      aa(u, v) = a(u, v) * a(u, v);
      bb(u, v) = b(u, v) * b(u, v);
      ab(u, v) = a(u, v) * b(u, v);
    }
  }
  const GrayImage mu_a = box_mean(a, window);
  const GrayImage mu_b = box_mean(b, window);
  const GrayImage e_aa = box_mean(aa, window);
  const GrayImage e_bb = box_mean(bb, window);
  const GrayImage e_ab = box_mean(ab, window);

  SsimResult out{GrayImage(w, h), 0.0};
  double sum = 0.0;
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const double ma = mu_a(u, v);
      const double mb = mu_b(u, v);
      const double var_a = e_aa(u, v) - ma * ma;
      const double var_b = e_bb(u, v) - mb * mb;
      const double cov = e_ab(u, v) - ma * mb;
      const double num = (2.0 * ma * mb + kC1) * (2.0 * cov + kC2);
      const double den = (ma * ma + mb * mb + kC1) * (var_a + var_b + kC2);
      out.map(u, v) = num / den;
      sum += out.map(u, v);
    }
  }
  out.mean = sum / (double(w) * h);
  return out;
}

GrayImage appearance_residual(const GrayImage& target, const GrayImage& warped,
                              double alpha, const AppearanceOptions& options) {
  require_same_size(target, warped, "appearance_residual");
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "appearance_residual: alpha must lie in [0, 1]");
  }
  GrayImage out(target.width(), target.height());
  std::optional<SsimResult> s;
  if (options.use_ssim) s = ssim(target, warped, options.ssim_window);
  for (int v = 0; v < target.height(); ++v) {
    for (int u = 0; u < target.width(); ++u) {
      double r = alpha * std::abs(target(u, v) - warped(u, v));
      if (s) r += 1.0 - s->map(u, v);
      out(u, v) = r;
    }
  }
  return out;
}

ImagePyramid::ImagePyramid(const GrayImage& intensity,
                           std::optional<DepthImage> depth,
                           const PinholeCamera& camera, int levels) {
  if (levels < 1) {
    throw Error(ErrorCode::kInvalidArgument, "pyramid needs at least one level");
  }
  camera.validate();
  if (intensity.width() != camera.width || intensity.height() != camera.height) {
    throw Error(ErrorCode::kInvalidArgument,
                "pyramid: image size does not match camera");
  }
  if (depth && !depth->same_size(intensity)) {
    throw Error(ErrorCode::kInvalidArgument,
                "pyramid: depth size does not match image");
  }
  levels_.reserve(levels);
  levels_.push_back({intensity, std::move(depth), camera});
  for (int l = 1; l < levels; ++l) {
    const PyramidLevel& prev = levels_.back();
    if (prev.intensity.width() < 4 || prev.intensity.height() < 4) {
      throw Error(ErrorCode::kInvalidArgument,
                  "pyramid: too many levels for image size");
    }
    PyramidLevel next;
    next.intensity = downsample(prev.intensity);
    if (prev.depth) next.depth = downsample_depth(*prev.depth);
    next.camera = camera.scaled(l);
    levels_.push_back(std::move(next));
  }
}

}  // namespace endovo
