#pragma once

#include <string>
#include <vector>

#include "chargedpoint/matrix.hpp"
#include "chargedpoint/rng.hpp"

namespace chargedpoint {

// In-memory supervised dataset: one input row and one target row per
// sample. Targets are one-hot class rows for every loader here.
struct Dataset {
    Matrix inputs;
    Matrix targets;

    std::size_t size() const { return inputs.rows; }
};

// One-hot row for `label` out of `classes` classes.
std::vector<double> one_hot(int label, int classes);

// Loads the big-endian IDX image/label pair (magics 0x00000803 and
// 0x00000801), normalizes pixels to [0, 1], and one-hot encodes labels
// over 10 classes. Malformed headers, truncated payloads, or mismatched
// counts raise FormatError naming the file and byte offset.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

// 28x28 row -> 8x8 row: zero-pad to 32x32 with a centered 2-pixel border,
// then average over non-overlapping 4x4 windows.
std::vector<double> downsample_8x8(const std::vector<double>& image);

// downsample_8x8 applied to every row of a (n x 784) matrix.
Matrix downsample_rows_8x8(const Matrix& images);

// Gaussian clusters around pairwise unit-separated means (the class means
// sit at e_c / sqrt(2), so every pair of means is distance 1 apart, six
// cluster sigmas at the default). Labels are assigned round-robin, so
// class counts are balanced within one. Requires dim >= classes.
Dataset make_synthetic(int classes, int dim, int n, SeededRng& rng, double sigma = 1.0 / 6.0);

}  // namespace chargedpoint
