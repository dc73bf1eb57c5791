#include "siattn/tensor.hpp"

#include <stdexcept>
#include <utility>

namespace siattn {

namespace {
std::size_t checked_product(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) {
        if (d == 0) throw std::invalid_argument("Tensor: zero-sized dimension");
        if (d > 0 && n > static_cast<std::size_t>(-1) / d)
            throw std::invalid_argument("Tensor: shape product overflows");
        n *= d;
    }
    return n;
}
}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape_, std::vector<double> data_)
    : shape(std::move(shape_)), data(std::move(data_)) {
    validate(*this);
}

Tensor Tensor::zeros(std::vector<std::size_t> shape_) {
    const std::size_t n = checked_product(shape_);
    Tensor t;
    t.shape = std::move(shape_);
    t.data.assign(n, 0.0);
    return t;
}

void validate(const Tensor& t) {
    if (checked_product(t.shape) != t.data.size())
        throw std::invalid_argument("Tensor: shape does not match payload size");
}

}  // namespace siattn
