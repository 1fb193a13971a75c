#ifndef SALRANK_DESCRIPTORS_HPP
#define SALRANK_DESCRIPTORS_HPP

#include <vector>

#include "salrank/types.hpp"

namespace salrank {

inline constexpr int kCanonicalSize = 128;

inline constexpr int kGistScales = 4;
inline constexpr int kGistOrientations = 8;
inline constexpr int kGistGrid = 4;
inline constexpr int kGistDim = kGistScales * kGistOrientations * kGistGrid * kGistGrid;

inline constexpr int kHogCell = 8;
inline constexpr int kHogBins = 9;
inline constexpr int kHogCells = kCanonicalSize / kHogCell;
inline constexpr int kHogDim = (kHogCells - 1) * (kHogCells - 1) * 4 * kHogBins;

/// Bilinear resampling (pixel-center aligned, edge-clamped).
GrayImage resize_bilinear(const GrayImage& image, int width, int height);

/// Mean Gabor energy per (scale, orientation, grid cell), laid out as
/// [(scale * 8 + orientation) * 16 + cell_row * 4 + cell_col]. The filter bank
/// has no DC response, so constant images give all zeros.
std::vector<float> gist_descriptor(const GrayImage& image);

/// Unsigned-orientation histograms of the 16x16 cells of the canonical image,
/// laid out [cell_row][cell_col][bin]. Bin k is centered at k*20 degrees of
/// gradient direction (bin 0: horizontal gradient).
std::vector<float> hog_cell_histograms(const GrayImage& image);

/// Overlapping 2x2-cell blocks with L2-Hys normalization.
std::vector<float> hog_descriptor(const GrayImage& image);

/// GIST and HOG, each scaled to unit L2 norm (zero blocks stay zero), concatenated.
std::vector<float> scene_descriptor(const GrayImage& image);

}  // namespace salrank

#endif  // SALRANK_DESCRIPTORS_HPP
