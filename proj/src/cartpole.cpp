#include "risp/cartpole.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace risp {

bool alive(const CartPoleState& s, const EpisodeConfig& cfg) {
    return std::abs(s.x) <= cfg.x_limit && std::abs(s.theta) <= cfg.theta_limit;
}

CartPoleState physics_step(const CartPoleState& s, double force, const EpisodeConfig& cfg) {
    const double total_mass = cfg.cart_mass + cfg.pole_mass;
    const double polemass_length = cfg.pole_mass * cfg.pole_half_length;
    const double cos_t = std::cos(s.theta);
    const double sin_t = std::sin(s.theta);

    const double temp = (force + polemass_length * s.dtheta * s.dtheta * sin_t) / total_mass;
    const double theta_acc =
        (cfg.gravity * sin_t - cos_t * temp) /
        (cfg.pole_half_length * (4.0 / 3.0 - cfg.pole_mass * cos_t * cos_t / total_mass));
    const double x_acc = temp - polemass_length * theta_acc * cos_t / total_mass;

    return {s.x + cfg.dt * s.dx, s.dx + cfg.dt * x_acc, s.theta + cfg.dt * s.dtheta,
            s.dtheta + cfg.dt * theta_acc};
}

namespace {

int spike_count(double v, double range) {
    const int k = static_cast<int>(std::ceil(4.0 * std::abs(v) / range));
    return std::clamp(k, 1, 4);
}

NeuronId require_neuron(const Network& net, const char* name) {
    if (auto id = net.index_of(name)) return *id;
    throw SpecError(fmt::format("network is missing cart-pole interface neuron '{}'", name));
}

}  // namespace

SpikeSchedule encode_observation(const CartPoleState& s, const ObservationRanges& ranges,
                                 const Network& net) {
    const std::array<std::pair<double, double>, 4> obs = {
        std::pair{s.x, ranges.x},
        std::pair{s.dx, ranges.dx},
        std::pair{s.theta, ranges.theta},
        std::pair{s.dtheta, ranges.dtheta},
    };
    SpikeSchedule schedule;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const auto [v, range] = obs[i];
        const char* name = cart_input_names[2 * i + (v >= 0.0 ? 0 : 1)];
        const NeuronId neuron = require_neuron(net, name);
        const int k = spike_count(v, range);
        for (int t = 0; t < k; ++t) schedule.entries.push_back({neuron, t, 1.0});
    }
    return schedule;
}

const char* action_name(Action a) {
    return a == Action::Left ? "left" : "right";
}

Action decode_action(std::int64_t left_count, std::int64_t right_count) {
    return right_count > left_count ? Action::Right : Action::Left;
}

Action decode_action(const SpikeRaster& interval_raster, NeuronId o_l, NeuronId o_r) {
    std::int64_t l = 0, r = 0;
    for (const Fire& f : interval_raster.fires) {
        if (f.neuron == o_l) ++l;
        if (f.neuron == o_r) ++r;
    }
    return decode_action(l, r);
}

int run_episode(const Network& net, CartPoleState state, const EpisodeConfig& cfg,
                const ObservationRanges& ranges, std::vector<IntervalTrace>* trace) {
    if (cfg.dt <= 0.0 || cfg.steps_per_interval < 1 || cfg.max_intervals < 0)
        throw SpecError("bad episode config");
    for (const char* name : cart_input_names) require_neuron(net, name);
    const NeuronId o_l = require_neuron(net, cart_output_names[0]);
    const NeuronId o_r = require_neuron(net, cart_output_names[1]);

    EngineState engine(net);
    int survived = 0;
    std::vector<std::vector<ExternalSpike>> by_offset(
        static_cast<std::size_t>(cfg.steps_per_interval));
    std::vector<NeuronId> fired;

    for (int interval = 0; interval < cfg.max_intervals && alive(state, cfg); ++interval) {
        if (cfg.reset_engine_between_intervals) engine.reset();

        for (auto& batch : by_offset) batch.clear();
        const SpikeSchedule schedule = encode_observation(state, ranges, net);
        for (const SpikeEntry& e : schedule.entries)
            if (e.time < cfg.steps_per_interval)
                by_offset[static_cast<std::size_t>(e.time)].push_back({e.neuron, e.value});

        std::int64_t l = 0, r = 0;
        for (int offset = 0; offset < cfg.steps_per_interval; ++offset) {
            step_into(net, engine, by_offset[static_cast<std::size_t>(offset)], fired);
            for (NeuronId f : fired) {
                if (f == o_l) ++l;
                if (f == o_r) ++r;
            }
        }

        const Action action = decode_action(l, r);
        if (trace) trace->push_back({interval, state.x, state.theta, action, l, r});
        state = physics_step(state, action == Action::Right ? cfg.force_mag : -cfg.force_mag, cfg);
        if (!alive(state, cfg)) break;
        ++survived;
    }
    return survived;
}

}  // namespace risp
