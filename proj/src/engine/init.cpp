#include "fiinet/engine/init.hpp"

#include <cmath>

#include "fiinet/engine/rng.hpp"
#include "fiinet/error.hpp"

namespace fiinet::engine {

double xavier_bound(std::size_t fan_in, std::size_t fan_out) {
    require(fan_in > 0 && fan_out > 0, ErrorCategory::Shape, "xavier_init: zero fan-in or fan-out");
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

template <typename Real>
Tensor<Real> xavier_init(const Shape& shape, std::uint64_t seed, std::string_view name) {
    if (shape.size() != 2) fail(ErrorCategory::Shape, "xavier_init: expected a 2-D shape, got " + shape_str(shape));
    const double bound = xavier_bound(shape[0], shape[1]);
    Tensor<Real> out(shape);
    Rng rng(derive_seed(seed, name));
    for (auto& x : out.data()) x = static_cast<Real>(rng.uniform(-bound, bound));
    return out;
}

template Tensor<float> xavier_init<float>(const Shape&, std::uint64_t, std::string_view);
template Tensor<double> xavier_init<double>(const Shape&, std::uint64_t, std::string_view);

}  // namespace fiinet::engine
