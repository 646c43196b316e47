#include "fogsim/schedulability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fogsim {

namespace {

void validate_demand(const StreamDemand& d) {
    if (!(d.exec_time > 0)) throw std::invalid_argument("demand: exec_time must be > 0");
    if (!(d.period > 0)) throw std::invalid_argument("demand: period must be > 0");
    if (!(d.deadline > 0)) throw std::invalid_argument("demand: deadline must be > 0");
}

}  // namespace

TimingBounds scale_bounds(double c_gen_block, double c_val_block, double alpha, double beta) {
    if (!(c_gen_block > 0)) throw std::invalid_argument("scale_bounds: c_gen_block must be > 0");
    if (!(c_val_block > 0)) throw std::invalid_argument("scale_bounds: c_val_block must be > 0");
    if (!(alpha > 0)) throw std::invalid_argument("scale_bounds: alpha must be > 0");
    if (!(beta > 0)) throw std::invalid_argument("scale_bounds: beta must be > 0");
    TimingBounds b;
    b.c_gen_block = c_gen_block;
    b.c_val_block = c_val_block;
    b.alpha = alpha;
    b.beta = beta;
    b.c_gen_fog = alpha * c_gen_block;
    b.c_val_fog = beta * c_val_block;
    return b;
}

double dbf(const StreamDemand& d, double delta) {
    validate_demand(d);
    if (delta < 0) throw std::invalid_argument("dbf: delta must be >= 0");
    const double jobs = std::ceil((delta - (d.deadline - d.period)) / d.period);
    return std::max(0.0, jobs * d.exec_time);
}

double load(std::span<const StreamDemand> demands, double delta) {
    if (!(delta > 0)) throw std::invalid_argument("load: delta must be > 0");
    double total = 0.0;
    for (const auto& d : demands) total += dbf(d, delta);
    return total / delta;
}

std::pair<double, double> max_load(std::span<const StreamDemand> demands, double delta_max) {
    if (!(delta_max > 0)) throw std::invalid_argument("max_load: delta_max must be > 0");
    if (demands.empty()) return {0.0, delta_max};

    // Deadline points of each stream within the window, plus the window end.
    std::vector<double> candidates;
    for (const auto& d : demands) {
        validate_demand(d);
        for (double p = d.deadline; p <= delta_max; p += d.period) candidates.push_back(p);
    }
    candidates.push_back(delta_max);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    double best = -1.0;
    double best_delta = delta_max;
    for (double delta : candidates) {
        if (!(delta > 0)) continue;
        const double l = load(demands, delta);
        if (l > best) {  // strict: ties keep the smallest delta
            best = l;
            best_delta = delta;
        }
    }
    return {std::max(best, 0.0), best_delta};
}

bool admit(std::span<const StreamDemand> node_demands, const StreamDemand& candidate, double delta_max) {
    validate_demand(candidate);
    std::vector<StreamDemand> all(node_demands.begin(), node_demands.end());
    all.push_back(candidate);
    return max_load(all, delta_max).first <= 1.0;
}

double default_delta_max(std::span<const StreamDemand> demands) {
    constexpr double kFallback = 1e4;
    constexpr double kGrid = 1000.0;  // millisecond grid
    if (demands.empty()) return kFallback;

    uint64_t lcm_ms = 1;
    for (const auto& d : demands) {
        const double scaled = d.period * kGrid;
        const double rounded = std::round(scaled);
        if (std::abs(scaled - rounded) > 1e-6 || rounded < 1 || rounded > 1e9) return kFallback;
        lcm_ms = std::lcm(lcm_ms, static_cast<uint64_t>(rounded));
        if (lcm_ms > static_cast<uint64_t>(kFallback * kGrid)) return kFallback;
    }
    const double twice_hyper = 2.0 * static_cast<double>(lcm_ms) / kGrid;
    return twice_hyper <= kFallback ? twice_hyper : kFallback;
}

}  // namespace fogsim
