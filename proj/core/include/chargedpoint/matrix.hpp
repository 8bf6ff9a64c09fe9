#pragma once

#include <cstddef>
#include <vector>

namespace chargedpoint {

// Dense row-major matrix of doubles. Minimal by intent: the project only
// needs storage plus indexed access, so heavier linear-algebra types are
// left out.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::size_t size() const { return data.size(); }
};

}  // namespace chargedpoint
