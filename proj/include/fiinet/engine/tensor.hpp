#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace fiinet::engine {

using Shape = std::vector<std::size_t>;

std::string shape_str(const Shape& shape);
std::size_t shape_size(const Shape& shape);

// Dense row-major tensor. Every dimension is positive; there is no implicit
// broadcasting anywhere in the engine, so shape checks are exact.
template <typename Real>
class Tensor {
public:
    using value_type = Real;

    Tensor() = default;
    explicit Tensor(Shape shape, Real fill = Real(0));
    Tensor(Shape shape, std::vector<Real> data);
    Tensor(std::initializer_list<std::size_t> shape, std::initializer_list<Real> data);

    static Tensor scalar(Real v) { return Tensor(Shape{1}, std::vector<Real>{v}); }

    const Shape& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    std::span<Real> data() noexcept { return data_; }
    std::span<const Real> data() const noexcept { return data_; }
    Real* ptr() noexcept { return data_.data(); }
    const Real* ptr() const noexcept { return data_.data(); }

    Real& operator[](std::size_t i) { return data_[i]; }
    const Real& operator[](std::size_t i) const { return data_[i]; }

    // 2-D and 3-D element access; the caller is responsible for the rank.
    Real& at(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
    const Real& at(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }
    Real& at(std::size_t i, std::size_t j, std::size_t t) {
        return data_[(i * shape_[1] + j) * shape_[2] + t];
    }
    const Real& at(std::size_t i, std::size_t j, std::size_t t) const {
        return data_[(i * shape_[1] + j) * shape_[2] + t];
    }

    void fill(Real v);
    void reshape(Shape shape);

    // Throws a numeric error naming `what` if any element is NaN or Inf.
    void check_finite(const std::string& what) const;

    bool operator==(const Tensor& other) const = default;

private:
    Shape shape_;
    std::vector<Real> data_;
};

void check_same_shape(const Shape& a, const Shape& b, const std::string& op);

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace fiinet::engine
