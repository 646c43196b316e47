#pragma once

#include <span>
#include <utility>
#include <vector>

namespace fogsim {

// Per-stream demand as seen by one node: slot-level execution time C, period T,
// relative deadline D (seconds).
struct StreamDemand {
    double exec_time = 0.0;  // C_i
    double period = 0.0;     // T_i
    double deadline = 0.0;   // D_i
};

// Block-generation/validation bounds scaled from the blockchain constants.
struct TimingBounds {
    double c_gen_block = 0.0;
    double c_val_block = 0.0;
    double alpha = 1.0;
    double beta = 1.0;
    double c_gen_fog = 0.0;  // alpha * c_gen_block
    double c_val_fog = 0.0;  // beta * c_val_block
};

TimingBounds scale_bounds(double c_gen_block, double c_val_block, double alpha, double beta);

// Demand bound at interval length delta:
//   max(0, ceil((delta - (D - T)) / T) * C)
// implemented in the ceiling form as printed; for D < T this exceeds the
// classical floor-based DBF (it is an upper bound on job demand, not equal).
double dbf(const StreamDemand& d, double delta);

// (1/delta) * sum_i dbf(d_i, delta).
double load(std::span<const StreamDemand> demands, double delta);

// Maximum of load over the candidate set {k*T_i + D_i <= delta_max} U {delta_max}.
// Returns (max load, smallest delta attaining it); empty set -> (0, delta_max).
std::pair<double, double> max_load(std::span<const StreamDemand> demands, double delta_max);

// Admission: the node stays within capacity with the candidate added.
bool admit(std::span<const StreamDemand> node_demands, const StreamDemand& candidate, double delta_max);

// Analysis window default: twice the hyperperiod when the periods are
// commensurable on a millisecond grid and the result stays small, else 1e4 s.
double default_delta_max(std::span<const StreamDemand> demands);

}  // namespace fogsim
