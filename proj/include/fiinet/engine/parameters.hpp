#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fiinet/engine/tensor.hpp"

namespace fiinet::engine {

using ParamId = std::size_t;

/// Every learnable tensor of a model, in registration order. Names are
/// unique. `decay` marks tensors that receive decoupled weight decay
/// (everything except biases).
template <typename Real>
class ParameterStore {
public:
    struct Entry {
        std::string name;
        Tensor<Real> value;
        bool decay = true;
    };

    ParamId add(std::string name, Tensor<Real> value, bool decay = true);

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    bool contains(std::string_view name) const;
    ParamId id(std::string_view name) const;

    Tensor<Real>& operator[](ParamId id) { return entries_.at(id).value; }
    const Tensor<Real>& operator[](ParamId id) const { return entries_.at(id).value; }
    Tensor<Real>& at(std::string_view name) { return entries_[id(name)].value; }
    const Tensor<Real>& at(std::string_view name) const { return entries_[id(name)].value; }

    const Entry& entry(ParamId id) const { return entries_.at(id); }
    const std::vector<Entry>& entries() const noexcept { return entries_; }

    std::size_t scalar_count() const;

    /// Copies values from `other`, which must have identical names and shapes.
    void assign_values(const ParameterStore& other);

private:
    std::vector<Entry> entries_;
    std::map<std::string, ParamId, std::less<>> index_;
};

/// Gradients congruent with a ParameterStore.
template <typename Real>
class GradientStore {
public:
    GradientStore() = default;
    explicit GradientStore(const ParameterStore<Real>& params);

    void zero();
    std::size_t size() const noexcept { return grads_.size(); }
    Tensor<Real>& operator[](ParamId id) { return grads_.at(id); }
    const Tensor<Real>& operator[](ParamId id) const { return grads_.at(id); }

    /// Throws if the shapes no longer match `params`.
    void check_congruent(const ParameterStore<Real>& params) const;

private:
    std::vector<Tensor<Real>> grads_;
};

extern template class ParameterStore<float>;
extern template class ParameterStore<double>;
extern template class GradientStore<float>;
extern template class GradientStore<double>;

}  // namespace fiinet::engine
