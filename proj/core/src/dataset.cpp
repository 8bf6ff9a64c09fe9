#include "chargedpoint/dataset.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>

#include "chargedpoint/errors.hpp"

namespace chargedpoint {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;
constexpr int kIdxClasses = 10;

std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DatasetNotFoundError("cannot open '" + path + "'");
    }
    return std::vector<unsigned char>(std::istreambuf_iterator<char>(in),
                                      std::istreambuf_iterator<char>());
}

std::uint32_t read_u32_be(const std::vector<unsigned char>& buf, std::size_t offset,
                          const std::string& path) {
    if (offset + 4 > buf.size()) {
        throw FormatError("'" + path + "': truncated at offset " + std::to_string(offset));
    }
    return (static_cast<std::uint32_t>(buf[offset]) << 24) |
           (static_cast<std::uint32_t>(buf[offset + 1]) << 16) |
           (static_cast<std::uint32_t>(buf[offset + 2]) << 8) |
           static_cast<std::uint32_t>(buf[offset + 3]);
}

}  // namespace

std::vector<double> one_hot(int label, int classes) {
    if (classes < 2 || label < 0 || label >= classes) {
        throw InvalidParameterError("one_hot: label " + std::to_string(label) +
                                    " outside [0, " + std::to_string(classes) + ")");
    }
    std::vector<double> row(static_cast<std::size_t>(classes), 0.0);
    row[static_cast<std::size_t>(label)] = 1.0;
    return row;
}

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    const auto img = read_file(images_path);
    const auto lab = read_file(labels_path);

    if (read_u32_be(img, 0, images_path) != kImagesMagic) {
        throw FormatError("'" + images_path + "': bad magic at offset 0");
    }
    const std::size_t n_images = read_u32_be(img, 4, images_path);
    const std::size_t rows = read_u32_be(img, 8, images_path);
    const std::size_t cols = read_u32_be(img, 12, images_path);
    const std::size_t pixels = rows * cols;
    if (img.size() != 16 + n_images * pixels) {
        throw FormatError("'" + images_path + "': payload size " +
                          std::to_string(img.size() - 16) + " at offset 16 does not match " +
                          std::to_string(n_images) + " images of " + std::to_string(pixels) +
                          " pixels");
    }

    if (read_u32_be(lab, 0, labels_path) != kLabelsMagic) {
        throw FormatError("'" + labels_path + "': bad magic at offset 0");
    }
    const std::size_t n_labels = read_u32_be(lab, 4, labels_path);
    if (lab.size() != 8 + n_labels) {
        throw FormatError("'" + labels_path + "': payload size " +
                          std::to_string(lab.size() - 8) + " at offset 8 does not match " +
                          std::to_string(n_labels) + " labels");
    }
    if (n_images != n_labels) {
        throw FormatError("'" + images_path + "' holds " + std::to_string(n_images) +
                          " images but '" + labels_path + "' holds " +
                          std::to_string(n_labels) + " labels");
    }

    Dataset out;
    out.inputs = Matrix(n_images, pixels);
    out.targets = Matrix(n_images, kIdxClasses);
    for (std::size_t i = 0; i < n_images; ++i) {
        for (std::size_t p = 0; p < pixels; ++p) {
            out.inputs(i, p) = static_cast<double>(img[16 + i * pixels + p]) / 255.0;
        }
        const unsigned char label = lab[8 + i];
        if (label >= kIdxClasses) {
            throw FormatError("'" + labels_path + "': label " + std::to_string(label) +
                              " at offset " + std::to_string(8 + i) + " exceeds class count");
        }
        out.targets(i, label) = 1.0;
    }
    return out;
}

std::vector<double> downsample_8x8(const std::vector<double>& image) {
    if (image.size() != 784) {
        throw StructuralMismatchError("downsample_8x8 expects a 784-value row, got " +
                                      std::to_string(image.size()));
    }
    // 32x32 canvas with the 28x28 image centered leaves a 2-pixel zero
    // border; each output cell averages one 4x4 window of the canvas.
    std::vector<double> out(64, 0.0);
    for (std::size_t cell_r = 0; cell_r < 8; ++cell_r) {
        for (std::size_t cell_c = 0; cell_c < 8; ++cell_c) {
            double sum = 0.0;
            for (std::size_t dr = 0; dr < 4; ++dr) {
                for (std::size_t dc = 0; dc < 4; ++dc) {
                    const std::size_t canvas_r = cell_r * 4 + dr;
                    const std::size_t canvas_c = cell_c * 4 + dc;
                    if (canvas_r < 2 || canvas_r >= 30 || canvas_c < 2 || canvas_c >= 30) {
                        continue;
                    }
                    sum += image[(canvas_r - 2) * 28 + (canvas_c - 2)];
                }
            }
            out[cell_r * 8 + cell_c] = sum / 16.0;
        }
    }
    return out;
}

Matrix downsample_rows_8x8(const Matrix& images) {
    Matrix out(images.rows, 64);
    std::vector<double> row(784);
    for (std::size_t i = 0; i < images.rows; ++i) {
        if (images.cols != 784) {
            throw StructuralMismatchError("downsample_rows_8x8 expects 784 columns");
        }
        std::copy(images.data.begin() + static_cast<std::ptrdiff_t>(i * 784),
                  images.data.begin() + static_cast<std::ptrdiff_t>((i + 1) * 784),
                  row.begin());
        const std::vector<double> small = downsample_8x8(row);
        std::copy(small.begin(), small.end(),
                  out.data.begin() + static_cast<std::ptrdiff_t>(i * 64));
    }
    return out;
}

Dataset make_synthetic(int classes, int dim, int n, SeededRng& rng, double sigma) {
    if (classes < 2) throw InvalidParameterError("make_synthetic: classes must be >= 2");
    if (dim < classes) {
        throw InvalidParameterError("make_synthetic: dim must be >= classes");
    }
    if (n < 1) throw InvalidParameterError("make_synthetic: n must be >= 1");
    if (!(sigma > 0.0)) throw InvalidParameterError("make_synthetic: sigma must be > 0");

    const double mean_scale = 1.0 / std::sqrt(2.0);
    Dataset out;
    out.inputs = Matrix(static_cast<std::size_t>(n), static_cast<std::size_t>(dim));
    out.targets = Matrix(static_cast<std::size_t>(n), static_cast<std::size_t>(classes));
    for (int i = 0; i < n; ++i) {
        const int label = i % classes;
        const auto r = static_cast<std::size_t>(i);
        for (int d = 0; d < dim; ++d) {
            double v = rng.normal(sigma);
            if (d == label) v += mean_scale;
            out.inputs(r, static_cast<std::size_t>(d)) = v;
        }
        out.targets(r, static_cast<std::size_t>(label)) = 1.0;
    }
    return out;
}

}  // namespace chargedpoint
