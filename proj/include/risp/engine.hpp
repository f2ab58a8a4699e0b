#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "risp/model.hpp"

namespace risp {

// Timestep semantics, shared by both engines:
//   (1) an external spike scheduled at timestep t is delivered to its input
//       neuron during timestep t;
//   (2) a neuron firing at the end of timestep t sends, per outgoing synapse
//       (u -> v, w, d), a delivery of w to v during timestep t + d;
//   (3) at the end of a timestep, every neuron that received at least one
//       delivery during it is checked: potential >= threshold fires the
//       neuron and resets its potential to 0; a checked non-firing neuron
//       with leak resets to 0, without leak it retains the potential;
//   (4) neurons receiving no delivery are not checked and keep their
//       potential;
//   (5) potentials are unbounded in both directions between checks.
// Deliveries within a timestep are summed in canonical order: external
// spikes first in schedule order, then synaptic arrivals by (source index,
// synapse index). Both engines use this order, so analog results match
// bit for bit.

struct SpikeEntry {
    NeuronId neuron = 0;
    std::int64_t time = 0;
    double value = 1.0;
};

struct SpikeSchedule {
    std::vector<SpikeEntry> entries;
};

struct Fire {
    NeuronId neuron = 0;
    std::int64_t time = 0;

    bool operator==(const Fire&) const = default;
    auto operator<=>(const Fire&) const = default;
};

// Recorded firings, sorted by (timestep, canonical neuron index).
struct SpikeRaster {
    std::vector<Fire> fires;
    std::int64_t horizon = -1;

    bool operator==(const SpikeRaster&) const = default;
};

enum class RecordMode { OutputsOnly, AllNeurons };

struct Delivery {
    std::int32_t source = -1;   // -1 marks an external spike
    std::uint32_t synapse = 0;  // entry order for externals
    NeuronId target = 0;
    double weight = 0.0;
};

struct ExternalSpike {
    NeuronId neuron = 0;
    double value = 1.0;
};

struct RunStats {
    std::uint64_t deliveries = 0;
};

// Mutable simulation state bound to one network: per-neuron potentials plus
// a ring-buffer calendar of pending deliveries (slot = timestep mod ring
// size; all pending arrivals lie within max_delay of now, so slots are
// unambiguous). Single-owner; independent states over the same shared
// Network may run in parallel.
class EngineState {
public:
    EngineState() = default;
    explicit EngineState(const Network& net);

    void reset();

    std::int64_t now() const { return now_; }
    const std::vector<double>& potentials() const { return potentials_; }
    bool has_pending() const { return pending_total_ > 0; }
    std::size_t pending_deliveries() const { return pending_total_; }

private:
    std::vector<double> potentials_;
    std::vector<std::vector<Delivery>> ring_;
    std::size_t pending_total_ = 0;
    std::int64_t now_ = 0;
    std::vector<std::vector<std::uint32_t>> outgoing_;  // synapse ids per source, ascending
    std::vector<std::uint8_t> input_mask_;
    std::uint64_t deliveries_ = 0;
    std::vector<NeuronId> touched_;         // scratch, reused across steps
    std::vector<std::uint8_t> touched_mask_;

    friend class EventRunner;
};

// Advances the state by one timestep, applying the given external spikes at
// the current timestep. Returns the neurons fired this timestep, ascending.
std::vector<NeuronId> step(const Network& net, EngineState& state,
                           std::span<const ExternalSpike> externals = {});

// Allocation-free variant for streaming loops: fired is cleared and filled.
void step_into(const Network& net, EngineState& state, std::span<const ExternalSpike> externals,
               std::vector<NeuronId>& fired);

// Dense reference simulator: visits every timestep 0..horizon and scans all
// synapses each step. Slow and obviously correct; the testing baseline.
SpikeRaster run(const Network& net, const SpikeSchedule& schedule, std::int64_t horizon,
                RecordMode record = RecordMode::OutputsOnly, RunStats* stats = nullptr);

// Event-driven simulator: skips timesteps with no arriving deliveries.
// Produces a raster identical to run() on every input.
SpikeRaster run_event_driven(const Network& net, const SpikeSchedule& schedule,
                             std::int64_t horizon, RecordMode record = RecordMode::OutputsOnly,
                             RunStats* stats = nullptr);

// Random workload model: each input neuron independently spikes with the
// given probability per timestep.
struct InputModel {
    double fire_probability = 0.5;
    double value = 1.0;
};

SpikeSchedule random_schedule(const Network& net, std::int64_t horizon, const InputModel& model,
                              std::uint64_t seed);

}  // namespace risp
