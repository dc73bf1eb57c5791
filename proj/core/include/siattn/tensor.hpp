#pragma once

#include <cstddef>
#include <vector>

namespace siattn {

// Dense row-major tensor of doubles with an explicit shape.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::vector<std::size_t> shape_, std::vector<double> data_);

    static Tensor zeros(std::vector<std::size_t> shape_);

    std::size_t size() const { return data.size(); }
    std::size_t ndim() const { return shape.size(); }

    // 2-D accessors; valid only for matrices.
    std::size_t rows() const { return shape.at(0); }
    std::size_t cols() const { return shape.at(1); }
    double& at(std::size_t i, std::size_t j) { return data[i * shape[1] + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * shape[1] + j]; }
};

// Throws std::invalid_argument if product(shape) != data size or any dim is 0.
void validate(const Tensor& t);

}  // namespace siattn
