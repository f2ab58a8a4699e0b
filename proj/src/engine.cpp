#include "risp/engine.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

namespace risp {

namespace {

bool is_integer(double v) {
    return std::isfinite(v) && v == std::floor(v);
}

void check_external(const Network& net, NeuronId neuron, double value) {
    if (neuron >= net.size() || !net.is_input(neuron))
        throw SpecError(fmt::format("external spike targets non-input neuron {}", neuron));
    if (net.mode.kind == ValueKind::Discrete && !is_integer(value))
        throw SpecError(fmt::format("external spike value {} is not an integer in discrete mode", value));
}

void check_schedule(const Network& net, const SpikeSchedule& schedule) {
    for (const SpikeEntry& e : schedule.entries) {
        if (e.time < 0)
            throw SpecError(fmt::format("external spike at negative timestep {}", e.time));
        check_external(net, e.neuron, e.value);
    }
}

// Entries stably sorted by timestep; within a timestep schedule order holds.
std::vector<SpikeEntry> sorted_entries(const SpikeSchedule& schedule) {
    std::vector<SpikeEntry> entries = schedule.entries;
    std::stable_sort(entries.begin(), entries.end(),
                     [](const SpikeEntry& a, const SpikeEntry& b) { return a.time < b.time; });
    return entries;
}

std::vector<std::vector<std::uint32_t>> build_outgoing(const Network& net) {
    std::vector<std::vector<std::uint32_t>> out(net.size());
    for (std::size_t s = 0; s < net.synapses.size(); ++s)
        out[net.synapses[s].first].push_back(static_cast<std::uint32_t>(s));
    return out;
}

std::uint32_t max_delay_of(const Network& net) {
    std::uint32_t d = 0;
    for (std::uint32_t v : net.delays) d = std::max(d, v);
    return d;
}

double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

EngineState::EngineState(const Network& net)
    : potentials_(net.size(), 0.0),
      ring_(max_delay_of(net) + 1),
      outgoing_(build_outgoing(net)),
      input_mask_(net.size(), 0),
      touched_mask_(net.size(), 0) {
    for (NeuronId id : net.inputs) input_mask_[id] = 1;
}

void EngineState::reset() {
    std::fill(potentials_.begin(), potentials_.end(), 0.0);
    for (auto& slot : ring_) slot.clear();
    pending_total_ = 0;
    now_ = 0;
    deliveries_ = 0;
}

// Shared core of the streaming step and the event-driven run.
class EventRunner {
public:
    // Applies rules (1)-(5) for timestep t (>= state.now_), appending fired
    // neurons in ascending order. Leaves state.now_ at t + 1.
    static void process_at(const Network& net, EngineState& st, std::int64_t t,
                           std::span<const ExternalSpike> externals,
                           std::vector<NeuronId>& fired) {
        auto& slot = st.ring_[static_cast<std::size_t>(t % ring_size(st))];
        // Canonical summation order: externals first in schedule order, then
        // synaptic deliveries by (source index, synapse index).
        std::sort(slot.begin(), slot.end(), [](const Delivery& a, const Delivery& b) {
            if (a.source != b.source) return a.source < b.source;
            return a.synapse < b.synapse;
        });
        auto& touched = st.touched_;
        touched.clear();
        for (const ExternalSpike& e : externals) {
            st.potentials_[e.neuron] += e.value;
            if (!st.touched_mask_[e.neuron]) {
                st.touched_mask_[e.neuron] = 1;
                touched.push_back(e.neuron);
            }
        }
        for (const Delivery& d : slot) {
            st.potentials_[d.target] += d.weight;
            if (!st.touched_mask_[d.target]) {
                st.touched_mask_[d.target] = 1;
                touched.push_back(d.target);
            }
        }
        st.deliveries_ += externals.size() + slot.size();
        st.pending_total_ -= slot.size();
        slot.clear();

        std::sort(touched.begin(), touched.end());
        for (NeuronId n : touched) {
            st.touched_mask_[n] = 0;
            if (st.potentials_[n] >= net.thresholds[n]) {
                fired.push_back(n);
                st.potentials_[n] = 0.0;
                for (std::uint32_t syn : st.outgoing_[n]) {
                    const auto [from, to] = net.synapses[syn];
                    st.ring_[static_cast<std::size_t>((t + net.delays[syn]) % ring_size(st))]
                        .push_back({static_cast<std::int32_t>(from), syn, to, net.weights[syn]});
                    ++st.pending_total_;
                }
            } else if (net.leaks[n]) {
                st.potentials_[n] = 0.0;
            }
        }
        st.now_ = t + 1;
    }

    static std::int64_t ring_size(const EngineState& st) {
        return static_cast<std::int64_t>(st.ring_.size());
    }

    // Earliest timestep >= now with a pending delivery, or -1 if none. All
    // pending arrivals lie in [now, now + ring size - 1].
    static std::int64_t next_pending(const EngineState& st) {
        if (st.pending_total_ == 0) return -1;
        const std::int64_t r = ring_size(st);
        std::int64_t best = -1;
        for (std::int64_t s = 0; s < r; ++s) {
            if (st.ring_[static_cast<std::size_t>(s)].empty()) continue;
            const std::int64_t offset = ((s - st.now_ % r) % r + r) % r;
            const std::int64_t t = st.now_ + offset;
            if (best < 0 || t < best) best = t;
        }
        return best;
    }

    static std::uint64_t deliveries(const EngineState& st) { return st.deliveries_; }

    static bool consistent(const Network& net, const EngineState& st) {
        return st.potentials_.size() == net.size() && st.outgoing_.size() == net.size();
    }
};

void step_into(const Network& net, EngineState& state, std::span<const ExternalSpike> externals,
               std::vector<NeuronId>& fired) {
    fired.clear();
    if (!EventRunner::consistent(net, state))
        throw SpecError("engine state does not match network");
    for (const ExternalSpike& e : externals) check_external(net, e.neuron, e.value);
    EventRunner::process_at(net, state, state.now(), externals, fired);
}

std::vector<NeuronId> step(const Network& net, EngineState& state,
                           std::span<const ExternalSpike> externals) {
    std::vector<NeuronId> fired;
    step_into(net, state, externals, fired);
    return fired;
}

SpikeRaster run_event_driven(const Network& net, const SpikeSchedule& schedule,
                             std::int64_t horizon, RecordMode record, RunStats* stats) {
    check_schedule(net, schedule);
    const auto entries = sorted_entries(schedule);
    std::vector<std::uint8_t> record_mask(net.size(), record == RecordMode::AllNeurons ? 1 : 0);
    if (record == RecordMode::OutputsOnly)
        for (NeuronId id : net.outputs) record_mask[id] = 1;

    EngineState st(net);
    SpikeRaster raster;
    raster.horizon = horizon;

    std::size_t next_entry = 0;
    std::vector<ExternalSpike> externals;
    std::vector<NeuronId> fired;
    while (true) {
        std::int64_t t = horizon + 1;
        if (next_entry < entries.size()) t = entries[next_entry].time;
        const std::int64_t pending_t = EventRunner::next_pending(st);
        if (pending_t >= 0) t = std::min(t, pending_t);
        if (t > horizon) break;

        externals.clear();
        while (next_entry < entries.size() && entries[next_entry].time == t) {
            externals.push_back({entries[next_entry].neuron, entries[next_entry].value});
            ++next_entry;
        }
        fired.clear();
        EventRunner::process_at(net, st, t, externals, fired);
        for (NeuronId n : fired)
            if (record_mask[n]) raster.fires.push_back({n, t});
    }
    if (stats) stats->deliveries = EventRunner::deliveries(st);
    return raster;
}

SpikeRaster run(const Network& net, const SpikeSchedule& schedule, std::int64_t horizon,
                RecordMode record, RunStats* stats) {
    check_schedule(net, schedule);
    const auto entries = sorted_entries(schedule);
    const std::size_t n = net.size();
    std::vector<std::uint8_t> record_mask(n, record == RecordMode::AllNeurons ? 1 : 0);
    if (record == RecordMode::OutputsOnly)
        for (NeuronId id : net.outputs) record_mask[id] = 1;

    const auto outgoing = build_outgoing(net);
    const std::int64_t ring_size = static_cast<std::int64_t>(max_delay_of(net)) + 1;

    // fired[s % ring_size][i]: neuron i fired at timestep s, for the last
    // ring_size timesteps. All synaptic lookups stay inside that window.
    std::vector<std::vector<std::uint8_t>> fired(static_cast<std::size_t>(ring_size),
                                                 std::vector<std::uint8_t>(n, 0));
    std::vector<double> potentials(n, 0.0);
    std::vector<std::uint8_t> touched(n, 0);
    std::uint64_t deliveries = 0;

    SpikeRaster raster;
    raster.horizon = horizon;

    std::size_t next_entry = 0;
    for (std::int64_t t = 0; t <= horizon; ++t) {
        auto& fired_now = fired[static_cast<std::size_t>(t % ring_size)];
        std::fill(fired_now.begin(), fired_now.end(), 0);

        while (next_entry < entries.size() && entries[next_entry].time == t) {
            const SpikeEntry& e = entries[next_entry];
            potentials[e.neuron] += e.value;
            touched[e.neuron] = 1;
            ++deliveries;
            ++next_entry;
        }
        for (NeuronId u = 0; u < n; ++u) {
            for (std::uint32_t syn : outgoing[u]) {
                const std::int64_t d = net.delays[syn];
                if (d <= t && fired[static_cast<std::size_t>((t - d) % ring_size)][u]) {
                    potentials[net.synapses[syn].second] += net.weights[syn];
                    touched[net.synapses[syn].second] = 1;
                    ++deliveries;
                }
            }
        }
        for (NeuronId i = 0; i < n; ++i) {
            if (!touched[i]) continue;
            touched[i] = 0;
            if (potentials[i] >= net.thresholds[i]) {
                potentials[i] = 0.0;
                fired_now[i] = 1;
                if (record_mask[i]) raster.fires.push_back({i, t});
            } else if (net.leaks[i]) {
                potentials[i] = 0.0;
            }
        }
    }
    if (stats) stats->deliveries = deliveries;
    return raster;
}

SpikeSchedule random_schedule(const Network& net, std::int64_t horizon, const InputModel& model,
                              std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    SpikeSchedule schedule;
    for (std::int64_t t = 0; t <= horizon; ++t)
        for (NeuronId input : net.inputs)
            if (unit_double(rng) < model.fire_probability)
                schedule.entries.push_back({input, t, model.value});
    return schedule;
}

}  // namespace risp
