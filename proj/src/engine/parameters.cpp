#include "fiinet/engine/parameters.hpp"

#include "fiinet/error.hpp"

namespace fiinet::engine {

template <typename Real>
ParamId ParameterStore<Real>::add(std::string name, Tensor<Real> value, bool decay) {
    require(!name.empty(), ErrorCategory::Config, "parameter name must not be empty");
    require(!contains(name), ErrorCategory::Config, "duplicate parameter name '" + name + "'");
    require(!value.empty(), ErrorCategory::Shape, "parameter '" + name + "' has no elements");
    ParamId id = entries_.size();
    index_.emplace(name, id);
    entries_.push_back(Entry{std::move(name), std::move(value), decay});
    return id;
}

template <typename Real>
bool ParameterStore<Real>::contains(std::string_view name) const {
    return index_.find(name) != index_.end();
}

template <typename Real>
ParamId ParameterStore<Real>::id(std::string_view name) const {
    auto it = index_.find(name);
    if (it == index_.end()) fail(ErrorCategory::Config, "unknown parameter '" + std::string(name) + "'");
    return it->second;
}

template <typename Real>
std::size_t ParameterStore<Real>::scalar_count() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.value.size();
    return n;
}

template <typename Real>
void ParameterStore<Real>::assign_values(const ParameterStore& other) {
    require(other.size() == size(), ErrorCategory::Shape, "parameter store size mismatch");
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        require(entries_[i].name == other.entries_[i].name, ErrorCategory::Shape,
                "parameter name mismatch: '" + entries_[i].name + "' vs '" + other.entries_[i].name + "'");
        check_same_shape(entries_[i].value.shape(), other.entries_[i].value.shape(), entries_[i].name);
        entries_[i].value = other.entries_[i].value;
    }
}

template <typename Real>
GradientStore<Real>::GradientStore(const ParameterStore<Real>& params) {
    grads_.reserve(params.size());
    for (const auto& e : params.entries()) grads_.emplace_back(e.value.shape(), Real(0));
}

template <typename Real>
void GradientStore<Real>::zero() {
    for (auto& g : grads_) g.fill(Real(0));
}

template <typename Real>
void GradientStore<Real>::check_congruent(const ParameterStore<Real>& params) const {
    require(params.size() == grads_.size(), ErrorCategory::Shape, "gradient store does not match parameter count");
    for (std::size_t i = 0; i < grads_.size(); ++i)
        check_same_shape(params[i].shape(), grads_[i].shape(), "gradient '" + params.entry(i).name + "'");
}

template class ParameterStore<float>;
template class ParameterStore<double>;
template class GradientStore<float>;
template class GradientStore<double>;

}  // namespace fiinet::engine
