#include "fiinet/engine/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fiinet/engine/rng.hpp"

namespace fiinet::engine {

namespace {

std::vector<std::size_t> pick_coordinates(const Tensor<double>& grad, std::size_t budget, Rng& rng) {
    std::vector<std::size_t> all(grad.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    if (budget == 0 || grad.size() <= budget) return all;

    const std::size_t top = budget / 2;
    std::stable_sort(all.begin(), all.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(grad[a]) > std::abs(grad[b]); });
    std::vector<std::size_t> chosen(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(top));
    std::vector<std::size_t> rest(all.begin() + static_cast<std::ptrdiff_t>(top), all.end());
    shuffle(rest.begin(), rest.end(), rng);
    chosen.insert(chosen.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(budget - top));
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

}  // namespace

std::vector<GradCheckEntry> finite_difference_check(ParameterStore<double>& params, const LossFunction& loss,
                                                    const GradCheckOptions& options) {
    std::vector<GradCheckEntry> report;
    if (params.empty()) return report;

    GradientStore<double> analytic(params);
    loss(&analytic);

    Rng rng(options.seed);
    const double eps = options.eps;
    for (ParamId id = 0; id < params.size(); ++id) {
        GradCheckEntry entry{params.entry(id).name, 0.0, 0};
        Tensor<double>& theta = params[id];
        for (std::size_t idx : pick_coordinates(analytic[id], options.max_coords_per_group, rng)) {
            const double saved = theta[idx];
            auto central = [&](double h) {
                theta[idx] = saved + h;
                const double up = loss(nullptr);
                theta[idx] = saved - h;
                const double down = loss(nullptr);
                theta[idx] = saved;
                return (up - down) / (2.0 * h);
            };
            const double numeric = central(eps);
            if (options.kink_tolerance > 0.0) {
                const double half = central(0.5 * eps);
                const double scale = std::max({std::abs(numeric), std::abs(half), 1e-8});
                if (std::abs(numeric - half) > options.kink_tolerance * scale) {
                    ++entry.coords_skipped;
                    continue;
                }
            }
            const double a = analytic[id][idx];
            const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
            entry.max_rel_error = std::max(entry.max_rel_error, std::abs(a - numeric) / denom);
            ++entry.coords_checked;
        }
        report.push_back(std::move(entry));
    }
    return report;
}

double max_relative_error(const std::vector<GradCheckEntry>& report) {
    double m = 0.0;
    for (const auto& e : report) m = std::max(m, e.max_rel_error);
    return m;
}

}  // namespace fiinet::engine
