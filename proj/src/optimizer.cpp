#include "risp/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <random>
#include <set>

#include <fmt/format.h>

namespace risp {

void PassReport::absorb(const PassReport& other) {
    neurons_removed += other.neurons_removed;
    synapses_removed += other.synapses_removed;
    synapses_added += other.synapses_added;
    values_normalized += other.values_normalized;
    details.insert(details.end(), other.details.begin(), other.details.end());
}

const char* pass_name(PassKind kind) {
    switch (kind) {
        case PassKind::Normalize: return "normalize";
        case PassKind::Passthrough: return "passthrough";
        case PassKind::PruneDead: return "prune";
    }
    return "unknown";
}

namespace {

// Rebuilds the network keeping only flagged neurons (canonical order
// preserved); synapses touching removed neurons are dropped.
Network drop_neurons(const Network& net, const std::vector<std::uint8_t>& keep,
                     int* synapses_dropped = nullptr) {
    std::vector<NeuronId> remap(net.size(), 0);
    Network out;
    out.mode = net.mode;
    for (std::size_t i = 0; i < net.size(); ++i) {
        if (!keep[i]) continue;
        remap[i] = static_cast<NeuronId>(out.neurons.size());
        out.neurons.push_back(net.neurons[i]);
        out.thresholds.push_back(net.thresholds[i]);
        out.leaks.push_back(net.leaks[i]);
    }
    int dropped = 0;
    for (std::size_t s = 0; s < net.synapses.size(); ++s) {
        const auto [from, to] = net.synapses[s];
        if (!keep[from] || !keep[to]) {
            ++dropped;
            continue;
        }
        out.synapses.emplace_back(remap[from], remap[to]);
        out.weights.push_back(net.weights[s]);
        out.delays.push_back(net.delays[s]);
    }
    for (NeuronId id : net.inputs) out.inputs.push_back(remap[id]);
    for (NeuronId id : net.outputs) out.outputs.push_back(remap[id]);
    if (synapses_dropped) *synapses_dropped = dropped;
    return out;
}

struct Degrees {
    std::vector<std::vector<std::uint32_t>> in;
    std::vector<std::vector<std::uint32_t>> out;
};

Degrees degrees_of(const Network& net) {
    Degrees d{std::vector<std::vector<std::uint32_t>>(net.size()),
              std::vector<std::vector<std::uint32_t>>(net.size())};
    for (std::size_t s = 0; s < net.synapses.size(); ++s) {
        d.out[net.synapses[s].first].push_back(static_cast<std::uint32_t>(s));
        d.in[net.synapses[s].second].push_back(static_cast<std::uint32_t>(s));
    }
    return d;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::pair<Network, PassReport> eliminate_passthrough(const Network& net) {
    Network current = net;
    PassReport report{.pass = "passthrough"};

    for (;;) {
        const Degrees deg = degrees_of(current);
        bool rewritten = false;
        for (NeuronId b = 0; b < current.size(); ++b) {
            if (current.is_input(b) || current.is_output(b)) continue;
            if (deg.in[b].size() != 1 || deg.out[b].size() != 1) continue;
            const std::uint32_t in_syn = deg.in[b][0];
            const std::uint32_t out_syn = deg.out[b][0];
            const NeuronId u = current.synapses[in_syn].first;
            const NeuronId v = current.synapses[out_syn].second;
            if (u == b || v == b) continue;  // self-loop, not a relay
            if (current.weights[in_syn] < current.thresholds[b]) continue;

            const std::uint32_t merged_delay = current.delays[in_syn] + current.delays[out_syn];
            const double carried_weight = current.weights[out_syn];
            report.details.push_back(fmt::format(
                "relay {}: {} -> {} -> {} replaced by direct synapse (w={}, d={}+{}={})",
                current.neurons[b], current.neurons[u], current.neurons[b], current.neurons[v],
                carried_weight, current.delays[in_syn], current.delays[out_syn], merged_delay));

            std::vector<std::uint8_t> keep(current.size(), 1);
            keep[b] = 0;
            current = drop_neurons(current, keep);
            // removal of b shifts every index above it down by one
            current.synapses.emplace_back(u > b ? u - 1 : u, v > b ? v - 1 : v);
            current.weights.push_back(carried_weight);
            current.delays.push_back(merged_delay);

            report.neurons_removed += 1;
            report.synapses_removed += 2;
            report.synapses_added += 1;
            rewritten = true;
            break;
        }
        if (!rewritten) break;
    }
    return {current, report};
}

std::pair<Network, PassReport> normalize_unit_weights(const Network& net) {
    Network current = net;
    PassReport report{.pass = "normalize"};
    const Degrees deg = degrees_of(current);

    for (NeuronId n = 0; n < current.size(); ++n) {
        if (current.is_input(n)) continue;  // externals bypass synapse weights
        const auto& incoming = deg.in[n];
        if (incoming.empty()) continue;
        const bool qualifies =
            std::all_of(incoming.begin(), incoming.end(), [&](std::uint32_t s) {
                return current.weights[s] > 0.0 && current.weights[s] >= current.thresholds[n];
            });
        if (!qualifies) continue;

        int touched = 0;
        for (std::uint32_t s : incoming) {
            if (current.weights[s] != 1.0) {
                current.weights[s] = 1.0;
                ++touched;
            }
        }
        if (current.thresholds[n] != 1.0) {
            current.thresholds[n] = 1.0;
            ++touched;
        }
        if (touched > 0) {
            report.values_normalized += touched;
            report.details.push_back(fmt::format(
                "neuron {}: {} incoming weights and threshold set to 1 ({} values changed)",
                current.neurons[n], incoming.size(), touched));
        }
    }
    return {current, report};
}

std::pair<Network, PassReport> prune_dead(const Network& net) {
    PassReport report{.pass = "prune"};
    const std::size_t n = net.size();
    const Degrees deg = degrees_of(net);

    // reverse reachability from outputs
    std::vector<std::uint8_t> reaches_output(n, 0);
    std::vector<NeuronId> stack;
    for (NeuronId id : net.outputs)
        if (!reaches_output[id]) {
            reaches_output[id] = 1;
            stack.push_back(id);
        }
    while (!stack.empty()) {
        const NeuronId v = stack.back();
        stack.pop_back();
        for (std::uint32_t s : deg.in[v]) {
            const NeuronId u = net.synapses[s].first;
            if (!reaches_output[u]) {
                reaches_output[u] = 1;
                stack.push_back(u);
            }
        }
    }

    // forward reachability from inputs
    std::vector<std::uint8_t> from_input(n, 0);
    for (NeuronId id : net.inputs)
        if (!from_input[id]) {
            from_input[id] = 1;
            stack.push_back(id);
        }
    while (!stack.empty()) {
        const NeuronId u = stack.back();
        stack.pop_back();
        for (std::uint32_t s : deg.out[u]) {
            const NeuronId v = net.synapses[s].second;
            if (!from_input[v]) {
                from_input[v] = 1;
                stack.push_back(v);
            }
        }
    }

    std::vector<std::uint8_t> keep(n, 1);
    for (NeuronId i = 0; i < n; ++i) {
        if (net.is_input(i) || net.is_output(i)) continue;
        const bool dead_end = !reaches_output[i];
        const bool spike_free = !from_input[i] && net.thresholds[i] > 0.0;
        if (dead_end || spike_free) {
            keep[i] = 0;
            report.details.push_back(fmt::format("removed {} ({})", net.neurons[i],
                                                 dead_end ? "no path to an output"
                                                          : "unreachable from inputs"));
        }
    }

    int dropped = 0;
    Network out = drop_neurons(net, keep, &dropped);
    report.neurons_removed = static_cast<int>(n - out.size());
    report.synapses_removed = dropped;
    if (report.neurons_removed == 0) report.details.clear();
    return {out, report};
}

namespace {

std::vector<std::string> sorted_names(const Network& net, const std::vector<NeuronId>& ids) {
    std::vector<std::string> names;
    for (NeuronId id : ids) names.push_back(net.neurons[id]);
    std::sort(names.begin(), names.end());
    return names;
}

std::vector<NamedSpike> draw_trial_schedule(const std::vector<std::string>& input_names,
                                            std::int64_t horizon, const InputModel& model,
                                            std::uint64_t seed, int trial) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(trial) + 1)));
    std::vector<NamedSpike> spikes;
    for (std::int64_t t = 0; t <= horizon; ++t)
        for (const std::string& name : input_names)
            if (unit_double(rng) < model.fire_probability)
                spikes.push_back({name, t, model.value});
    return spikes;
}

std::vector<NamedFire> output_fires(const Network& net, const std::vector<NamedSpike>& spikes,
                                    std::int64_t horizon) {
    SpikeSchedule schedule;
    for (const NamedSpike& s : spikes)
        schedule.entries.push_back({*net.index_of(s.neuron), s.time, s.value});
    const SpikeRaster raster = run(net, schedule, horizon, RecordMode::OutputsOnly);
    std::vector<NamedFire> fires;
    for (const Fire& f : raster.fires) fires.push_back({net.neurons[f.neuron], f.time});
    std::sort(fires.begin(), fires.end(), [](const NamedFire& a, const NamedFire& b) {
        return std::tie(a.time, a.neuron) < std::tie(b.time, b.neuron);
    });
    return fires;
}

}  // namespace

EquivalenceVerdict check_equivalence(const Network& a, const Network& b, int trials,
                                     std::int64_t horizon, std::uint64_t seed,
                                     const InputModel& input_model) {
    const auto inputs_a = sorted_names(a, a.inputs);
    const auto outputs_a = sorted_names(a, a.outputs);
    if (inputs_a != sorted_names(b, b.inputs) || outputs_a != sorted_names(b, b.outputs))
        throw SpecError("equivalence check requires identical input/output name sets");

    EquivalenceVerdict verdict;
    verdict.trials = trials;
    verdict.horizon = horizon;

    std::atomic<int> first_failure{trials};
#pragma omp parallel for schedule(dynamic)
    for (int trial = 0; trial < trials; ++trial) {
        if (trial > first_failure.load(std::memory_order_relaxed)) continue;
        const auto spikes = draw_trial_schedule(inputs_a, horizon, input_model, seed, trial);
        if (output_fires(a, spikes, horizon) != output_fires(b, spikes, horizon)) {
            int expected = first_failure.load(std::memory_order_relaxed);
            while (trial < expected &&
                   !first_failure.compare_exchange_weak(expected, trial,
                                                        std::memory_order_relaxed)) {
            }
        }
    }

    const int failed = first_failure.load();
    if (failed < trials) {
        verdict.equivalent = false;
        Counterexample ce;
        ce.trial = failed;
        ce.schedule = draw_trial_schedule(inputs_a, horizon, input_model, seed, failed);
        ce.fires_a = output_fires(a, ce.schedule, horizon);
        ce.fires_b = output_fires(b, ce.schedule, horizon);
        verdict.counterexample = std::move(ce);
    }
    return verdict;
}

SimplifyResult simplify(const Network& net, const SimplifyConfig& config) {
    Network current = net;
    PassReport combined{.pass = "simplify"};

    bool changed = true;
    while (changed) {
        changed = false;
        for (PassKind kind : config.passes) {
            auto [next, report] = [&] {
                switch (kind) {
                    case PassKind::Normalize: return normalize_unit_weights(current);
                    case PassKind::Passthrough: return eliminate_passthrough(current);
                    case PassKind::PruneDead: return prune_dead(current);
                }
                throw SpecError("unknown pass");
            }();
            if (report.changed()) {
                changed = true;
                current = std::move(next);
            }
            combined.absorb(report);
        }
    }

    EquivalenceVerdict verdict = check_equivalence(net, current, config.trials, config.horizon,
                                                   config.seed, config.input_model);
    if (!verdict.equivalent) return {net, std::move(combined), std::move(verdict)};
    return {std::move(current), std::move(combined), std::move(verdict)};
}

}  // namespace risp
