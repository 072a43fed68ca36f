#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fiinet/engine/parameters.hpp"

namespace fiinet::engine {

struct GradCheckOptions {
    double eps = 1e-3;
    /// 0 checks every coordinate. Otherwise a group larger than this is
    /// sampled: half the budget goes to the largest analytic entries (so a
    /// sparse embedding gradient is actually exercised), the rest uniformly.
    std::size_t max_coords_per_group = 0;
    std::uint64_t seed = 0;
    /// A coordinate whose central differences at eps and eps/2 disagree by
    /// more than this (relative) straddles a non-differentiable point such
    /// as a relu kink and is skipped. 0 disables the test.
    double kink_tolerance = 1e-3;
};

struct GradCheckEntry {
    std::string name;
    double max_rel_error = 0.0;
    std::size_t coords_checked = 0;
    std::size_t coords_skipped = 0;  // probes that straddled a kink
};

/// Evaluates the loss at the current parameter values. When `grads` is
/// non-null the function must also accumulate d(loss)/d(params) into it
/// (it arrives zeroed).
using LossFunction = std::function<double(GradientStore<double>* grads)>;

/// Central-difference check of an analytic gradient. Per coordinate the
/// relative error is |a - n| / max(|a|, |n|, 1e-8). Parameter values are
/// restored exactly after each probe.
std::vector<GradCheckEntry> finite_difference_check(ParameterStore<double>& params, const LossFunction& loss,
                                                    const GradCheckOptions& options = {});

double max_relative_error(const std::vector<GradCheckEntry>& report);

}  // namespace fiinet::engine
