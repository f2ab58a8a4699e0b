#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "risp/engine.hpp"
#include "risp/model.hpp"

namespace risp {

struct CartPoleState {
    double x = 0.0;       // cart position, m
    double dx = 0.0;      // cart velocity, m/s
    double theta = 0.0;   // pole angle from vertical, rad
    double dtheta = 0.0;  // pole angular velocity, rad/s

    bool operator==(const CartPoleState&) const = default;
};

struct EpisodeConfig {
    double dt = 0.02;             // control interval, s
    int steps_per_interval = 50;  // engine timesteps per interval
    int max_intervals = 15000;    // 15000 * 0.02 s = 5 simulated minutes
    double force_mag = 10.0;      // N
    double gravity = 9.8;
    double cart_mass = 1.0;
    double pole_mass = 0.1;
    double pole_half_length = 0.5;
    double x_limit = 2.4;
    double theta_limit = 0.20943951023931953;  // 12 degrees
    bool reset_engine_between_intervals = false;
};

// Per-observation maximum magnitudes used for spike binning.
struct ObservationRanges {
    double x = 2.4;
    double dx = 3.0;
    double theta = 0.20943951023931953;
    double dtheta = 3.0;
};

// Each observation is split over a +/- neuron pair; the magnitude becomes
// one to four unit spikes on the sign-matching neuron.
inline constexpr std::array<const char*, 8> cart_input_names = {
    "I_X+", "I_X-", "I_DX+", "I_DX-", "I_T+", "I_T-", "I_DT+", "I_DT-"};
inline constexpr std::array<const char*, 2> cart_output_names = {"O_L", "O_R"};

bool alive(const CartPoleState& state, const EpisodeConfig& config);

// One Euler step of the classic cart-pole dynamics under a signed force.
CartPoleState physics_step(const CartPoleState& state, double force, const EpisodeConfig& config);

// Spike encoding relative to the interval start: k = clamp(ceil(4|v|/R), 1, 4)
// unit spikes at timesteps 0..k-1 on the +/- neuron matching the sign
// (zero routes to the positive side). Exactly four neurons receive spikes.
SpikeSchedule encode_observation(const CartPoleState& state, const ObservationRanges& ranges,
                                 const Network& net);

enum class Action { Left, Right };

const char* action_name(Action a);

// Right iff O_R spiked strictly more than O_L; ties push left.
Action decode_action(std::int64_t left_count, std::int64_t right_count);
Action decode_action(const SpikeRaster& interval_raster, NeuronId o_l, NeuronId o_r);

struct IntervalTrace {
    int interval = 0;
    double x = 0.0;
    double theta = 0.0;
    Action action = Action::Left;
    std::int64_t l_count = 0;
    std::int64_t r_count = 0;
};

// Closed loop: encode the state, feed a persistent engine for
// steps_per_interval timesteps, vote on the output spike counts, push the
// cart, and advance the physics. Returns the number of intervals completed
// with the state still alive, capped at max_intervals.
int run_episode(const Network& net, CartPoleState start, const EpisodeConfig& config,
                const ObservationRanges& ranges = {}, std::vector<IntervalTrace>* trace = nullptr);

}  // namespace risp
