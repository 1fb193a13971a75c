#include "salrank/descriptors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>

#include "salrank/errors.hpp"

namespace salrank {

namespace {

constexpr int kN = kCanonicalSize;
constexpr std::size_t kPixels = static_cast<std::size_t>(kN) * kN;

// Transfer functions of the Gabor bank, one per (scale, orientation).
// Radial profile exp(-3.5 (f/f_s - 1)^2), angular exp(-2 pi dtheta^2),
// f_s = 0.3 / 1.85^s cycles per pixel; forced to zero at DC.
class GaborBank {
 public:
  GaborBank() {
    for (int s = 0; s < kGistScales; ++s) {
      const double fs = 0.3 / std::pow(1.85, s);
      for (int k = 0; k < kGistOrientations; ++k) {
        auto& h = filters_[s * kGistOrientations + k];
        h.resize(kPixels);
        for (int v = 0; v < kN; ++v) {
          const double fy = (v < kN / 2 ? v : v - kN) / static_cast<double>(kN);
          for (int u = 0; u < kN; ++u) {
            const double fx = (u < kN / 2 ? u : u - kN) / static_cast<double>(kN);
            const double fr = std::hypot(fx, fy);
            double t = std::atan2(fy, fx) + std::numbers::pi * k / kGistOrientations;
            if (t < -std::numbers::pi) t += 2 * std::numbers::pi;
            if (t > std::numbers::pi) t -= 2 * std::numbers::pi;
            const double g = std::exp(-3.5 * (fr / fs - 1.0) * (fr / fs - 1.0) - 2.0 * std::numbers::pi * t * t);
            h[static_cast<std::size_t>(v) * kN + u] = (u == 0 && v == 0) ? 0.0f : static_cast<float>(g);
          }
        }
      }
    }
  }

  const std::vector<float>& operator[](int i) const { return filters_[i]; }

 private:
  std::array<std::vector<float>, kGistScales * kGistOrientations> filters_;
};

const GaborBank& gabor_bank() {
  static const GaborBank bank;
  return bank;
}

// FFTW planning is not thread-safe; execution with the new-array interface is.
std::mutex& plan_mutex() {
  static std::mutex mu;
  return mu;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n)
      : data(static_cast<fftwf_complex*>(fftwf_malloc(sizeof(fftwf_complex) * n))) {
    if (data == nullptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftwf_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftwf_complex* data;
};

struct Plans {
  fftwf_plan forward;
  fftwf_plan inverse;
};

const Plans& plans() {
  static const Plans p = [] {
    std::lock_guard lock(plan_mutex());
    FftwBuffer a(kPixels), b(kPixels);
    return Plans{fftwf_plan_dft_2d(kN, kN, a.data, b.data, FFTW_FORWARD, FFTW_ESTIMATE),
                 fftwf_plan_dft_2d(kN, kN, a.data, b.data, FFTW_BACKWARD, FFTW_ESTIMATE)};
  }();
  return p;
}

GrayImage canonical(const GrayImage& image) {
  if (image.width < 1 || image.height < 1 || image.size() != static_cast<std::size_t>(image.width) * image.height) {
    throw ValidationError("descriptor input image is empty or inconsistent");
  }
  if (image.width == kN && image.height == kN) return image;
  return resize_bilinear(image, kN, kN);
}

void l2_normalize(std::span<float> v) {
  double ss = 0.0;
  for (float x : v) ss += static_cast<double>(x) * x;
  if (ss <= 0.0) return;
  const double inv = 1.0 / std::sqrt(ss);
  for (float& x : v) x = static_cast<float>(x * inv);
}

}  // namespace

GrayImage resize_bilinear(const GrayImage& image, int width, int height) {
  GrayImage out(width, height);
  const double sx = static_cast<double>(image.width) / width;
  const double sy = static_cast<double>(image.height) / height;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(image.height - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, image.height - 1);
    const double wy = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(image.width - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, image.width - 1);
      const double wx = fx - x0;
      const double top = (1 - wx) * image.at(x0, y0) + wx * image.at(x1, y0);
      const double bot = (1 - wx) * image.at(x0, y1) + wx * image.at(x1, y1);
      out.at(x, y) = static_cast<float>((1 - wy) * top + wy * bot);
    }
  }
  return out;
}

std::vector<float> gist_descriptor(const GrayImage& image) {
  const GrayImage img = canonical(image);
  const auto& bank = gabor_bank();
  const auto& p = plans();

  FftwBuffer spatial(kPixels), spectrum(kPixels), filtered(kPixels), response(kPixels);
  for (std::size_t i = 0; i < kPixels; ++i) {
    spatial.data[i][0] = img.data[i];
    spatial.data[i][1] = 0.0f;
  }
  fftwf_execute_dft(p.forward, spatial.data, spectrum.data);

  std::vector<float> out(kGistDim, 0.0f);
  constexpr int kCell = kN / kGistGrid;
  constexpr double kNorm = 1.0 / static_cast<double>(kPixels);
  for (int f = 0; f < kGistScales * kGistOrientations; ++f) {
    const auto& h = bank[f];
    for (std::size_t i = 0; i < kPixels; ++i) {
      filtered.data[i][0] = spectrum.data[i][0] * h[i];
      filtered.data[i][1] = spectrum.data[i][1] * h[i];
    }
    fftwf_execute_dft(p.inverse, filtered.data, response.data);
    std::array<double, kGistGrid * kGistGrid> energy{};
    for (int y = 0; y < kN; ++y) {
      for (int x = 0; x < kN; ++x) {
        const auto& c = response.data[static_cast<std::size_t>(y) * kN + x];
        energy[(y / kCell) * kGistGrid + x / kCell] += std::hypot(c[0], c[1]) * kNorm;
      }
    }
    for (int c = 0; c < kGistGrid * kGistGrid; ++c) {
      out[static_cast<std::size_t>(f) * kGistGrid * kGistGrid + c] =
          static_cast<float>(energy[c] / (kCell * kCell));
    }
  }
  return out;
}

std::vector<float> hog_cell_histograms(const GrayImage& image) {
  const GrayImage img = canonical(image);
  std::vector<float> hist(static_cast<std::size_t>(kHogCells) * kHogCells * kHogBins, 0.0f);
  constexpr double kBinWidth = std::numbers::pi / kHogBins;
  for (int y = 0; y < kN; ++y) {
    for (int x = 0; x < kN; ++x) {
      double gx = img.at(std::min(x + 1, kN - 1), y) - img.at(std::max(x - 1, 0), y);
      double gy = img.at(x, std::min(y + 1, kN - 1)) - img.at(x, std::max(y - 1, 0));
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0) continue;
      // Fold to the upper half-plane so g and -g get the same angle exactly.
      if (gy < 0 || (gy == 0 && gx < 0)) {
        gx = -gx;
        gy = -gy;
      }
      const double pos = std::atan2(gy, gx) / kBinWidth;  // in [0, kHogBins]
      int lo = static_cast<int>(std::floor(pos));
      const double frac = pos - lo;
      lo %= kHogBins;
      const int hi = (lo + 1) % kHogBins;
      float* cell = hist.data() + (static_cast<std::size_t>(y / kHogCell) * kHogCells + x / kHogCell) * kHogBins;
      cell[lo] += static_cast<float>(mag * (1.0 - frac));
      cell[hi] += static_cast<float>(mag * frac);
    }
  }
  return hist;
}

std::vector<float> hog_descriptor(const GrayImage& image) {
  const auto cells = hog_cell_histograms(image);
  std::vector<float> out;
  out.reserve(kHogDim);
  constexpr double kEps = 1e-3;
  constexpr double kClip = 0.2;
  std::array<double, 4 * kHogBins> block{};
  for (int by = 0; by + 1 < kHogCells; ++by) {
    for (int bx = 0; bx + 1 < kHogCells; ++bx) {
      std::size_t n = 0;
      for (int cy = by; cy <= by + 1; ++cy) {
        for (int cx = bx; cx <= bx + 1; ++cx) {
          const float* c = cells.data() + (static_cast<std::size_t>(cy) * kHogCells + cx) * kHogBins;
          for (int b = 0; b < kHogBins; ++b) block[n++] = c[b];
        }
      }
      auto normalize = [&] {
        double ss = 0.0;
        for (double v : block) ss += v * v;
        const double inv = 1.0 / std::sqrt(ss + kEps * kEps);
        for (double& v : block) v *= inv;
      };
      normalize();
      for (double& v : block) v = std::min(v, kClip);
      normalize();
      for (double v : block) out.push_back(static_cast<float>(v));
    }
  }
  return out;
}

std::vector<float> scene_descriptor(const GrayImage& image) {
  auto gist = gist_descriptor(image);
  auto hog = hog_descriptor(image);
  l2_normalize(gist);
  l2_normalize(hog);
  gist.insert(gist.end(), hog.begin(), hog.end());
  return gist;
}

}  // namespace salrank
