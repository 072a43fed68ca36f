#pragma once

#include <cstdint>
#include <string_view>

#include "fiinet/engine/tensor.hpp"

namespace fiinet::engine {

/// Glorot/Xavier uniform bound sqrt(6 / (fan_in + fan_out)).
double xavier_bound(std::size_t fan_in, std::size_t fan_out);

/// 2-D tensor of i.i.d. U[-b, b] draws, b = xavier_bound(rows, cols).
/// The stream is keyed on (seed, name), so adding a parameter never shifts
/// the draws of another.
template <typename Real>
Tensor<Real> xavier_init(const Shape& shape, std::uint64_t seed, std::string_view name);

extern template Tensor<float> xavier_init<float>(const Shape&, std::uint64_t, std::string_view);
extern template Tensor<double> xavier_init<double>(const Shape&, std::uint64_t, std::string_view);

}  // namespace fiinet::engine
