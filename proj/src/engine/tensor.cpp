#include "fiinet/engine/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fiinet/error.hpp"

namespace fiinet::engine {

std::string shape_str(const Shape& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ',';
        os << shape[i];
    }
    os << ']';
    return os.str();
}

std::size_t shape_size(const Shape& shape) {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    return n;
}

static void validate_shape(const Shape& shape) {
    require(!shape.empty(), ErrorCategory::Shape, "tensor shape must have rank >= 1");
    for (auto d : shape)
        require(d > 0, ErrorCategory::Shape, "tensor shape " + shape_str(shape) + " has a zero dimension");
}

template <typename Real>
Tensor<Real>::Tensor(Shape shape, Real fill) : shape_(std::move(shape)) {
    validate_shape(shape_);
    data_.assign(shape_size(shape_), fill);
}

template <typename Real>
Tensor<Real>::Tensor(Shape shape, std::vector<Real> data) : shape_(std::move(shape)), data_(std::move(data)) {
    validate_shape(shape_);
    require(data_.size() == shape_size(shape_), ErrorCategory::Shape,
            "data length " + std::to_string(data_.size()) + " does not match shape " + shape_str(shape_));
}

template <typename Real>
Tensor<Real>::Tensor(std::initializer_list<std::size_t> shape, std::initializer_list<Real> data)
    : Tensor(Shape(shape), std::vector<Real>(data)) {}

template <typename Real>
void Tensor<Real>::fill(Real v) {
    std::fill(data_.begin(), data_.end(), v);
}

template <typename Real>
void Tensor<Real>::reshape(Shape shape) {
    validate_shape(shape);
    require(shape_size(shape) == data_.size(), ErrorCategory::Shape,
            "cannot reshape " + shape_str(shape_) + " to " + shape_str(shape));
    shape_ = std::move(shape);
}

template <typename Real>
void Tensor<Real>::check_finite(const std::string& what) const {
    for (std::size_t i = 0; i < data_.size(); ++i) {
        if (!std::isfinite(data_[i]))
            fail(ErrorCategory::Numeric, "non-finite value in " + what + " at flat index " + std::to_string(i));
    }
}

void check_same_shape(const Shape& a, const Shape& b, const std::string& op) {
    if (a != b) fail(ErrorCategory::Shape, op + ": shape mismatch " + shape_str(a) + " vs " + shape_str(b));
}

template class Tensor<float>;
template class Tensor<double>;

}  // namespace fiinet::engine
