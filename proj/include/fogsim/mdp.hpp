#pragma once

#include <vector>

namespace fogsim {

// Feature vector observed by the agent; every entry lies in [0, 1].
using MdpState = std::vector<double>;

struct Transition {
    MdpState state;
    int action = 0;
    double reward = 0.0;
    MdpState next_state;
    bool done = false;
};

}  // namespace fogsim
