#pragma once

#include <cstdint>
#include <string>

#include "risp/model.hpp"

namespace risp {

enum class GateKind { And, Or, Xor };

struct GateInfo {
    Network network;
    std::int64_t latency = 1;  // output timestep for inputs applied at t=0
};

// Binary gates over inputs {A, B} and output X. Applying unit spikes at t=0
// to the inputs that are 1 makes X fire at t=latency exactly when the gate
// evaluates to 1. Gates self-clear and can be retriggered every latency+1
// timesteps.
GateInfo build_gate(GateKind kind);

enum class TieBreak { None, FavorX, FavorY };

struct ComparatorSpec {
    std::int64_t interval = 4;  // t, in timesteps; >= 1
    TieBreak tie_break = TieBreak::None;
};

struct ComparatorInfo {
    Network network;
    std::string bias;             // input neuron that must spike once at t=0
    std::int64_t output_time = 0; // t + 1
};

// Spike-count comparator over inputs {I_X, I_Y, Bias} and outputs
// {O_X, O_Y}. With unit spikes placed anywhere in [0, t-1] and one Bias
// spike at 0, the side with strictly more spikes fires exactly once at
// t+1; ties are silent (or favor one side). The network clears itself and
// can be rerun back to back starting at t+1.
//
// Construction: each side owns a non-leak accumulator counting its spikes
// (+1) against the other side's (-1). A bias-driven probe of weight t lands
// at timestep t, lifting the count over the accumulator threshold t+1
// exactly when the side is strictly ahead; the accumulator's fire drives
// the output one step later. A bias-driven flush of weight t+1 lands at
// t+1 and always fires the accumulator, clearing any residue; the flush
// echo at the output is canceled by a -1 bias synapse arriving with it.
ComparatorInfo build_comparator(const ComparatorSpec& spec);

}  // namespace risp
