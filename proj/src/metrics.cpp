#include "fogsim/metrics.hpp"

#include <stdexcept>

namespace fogsim {

double schedulability_ratio(uint64_t completed, uint64_t scheduled) {
    if (scheduled == 0) throw std::invalid_argument("schedulability_ratio: no scheduled tasks");
    if (completed > scheduled) throw std::invalid_argument("schedulability_ratio: completed > scheduled");
    return static_cast<double>(completed) / static_cast<double>(scheduled);
}

}  // namespace fogsim
