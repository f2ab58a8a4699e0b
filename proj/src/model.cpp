#include "risp/model.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <fmt/format.h>

namespace risp {

bool Network::is_input(NeuronId n) const {
    return std::binary_search(inputs.begin(), inputs.end(), n);
}

bool Network::is_output(NeuronId n) const {
    return std::binary_search(outputs.begin(), outputs.end(), n);
}

std::optional<NeuronId> Network::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < neurons.size(); ++i)
        if (neurons[i] == name) return static_cast<NeuronId>(i);
    return std::nullopt;
}

const char* violation_code_name(ViolationCode code) {
    switch (code) {
        case ViolationCode::ArityMismatch: return "ArityMismatch";
        case ViolationCode::BadEndpoint: return "BadEndpoint";
        case ViolationCode::BadDelay: return "BadDelay";
        case ViolationCode::NonIntegerValue: return "NonIntegerValue";
        case ViolationCode::ValueOutOfRange: return "ValueOutOfRange";
        case ViolationCode::BadRange: return "BadRange";
        case ViolationCode::DuplicateName: return "DuplicateName";
        case ViolationCode::UnknownNeuron: return "UnknownNeuron";
    }
    return "Unknown";
}

namespace {

bool is_integer(double v) {
    return std::isfinite(v) && v == std::floor(v);
}

void check_mode(const ValueMode& mode, std::vector<Violation>& out) {
    if (mode.weights.lo > mode.weights.hi || mode.thresholds.lo > mode.thresholds.hi)
        out.push_back({ViolationCode::BadRange, "empty value range"});
    if (!mode.weights.contains(1.0) || !mode.weights.contains(-1.0))
        out.push_back({ViolationCode::BadRange, "weight range must contain -1 and 1"});
    if (!mode.thresholds.contains(1.0))
        out.push_back({ViolationCode::BadRange, "threshold range must contain 1"});
}

}  // namespace

std::vector<Violation> validate(const Network& net) {
    std::vector<Violation> out;
    const std::size_t n = net.neurons.size();
    const std::size_t m = net.synapses.size();

    check_mode(net.mode, out);

    if (net.thresholds.size() != n)
        out.push_back({ViolationCode::ArityMismatch,
                       fmt::format("T has {} entries for {} neurons", net.thresholds.size(), n)});
    if (net.leaks.size() != n)
        out.push_back({ViolationCode::ArityMismatch,
                       fmt::format("L has {} entries for {} neurons", net.leaks.size(), n)});
    if (net.weights.size() != m)
        out.push_back({ViolationCode::ArityMismatch,
                       fmt::format("W has {} entries for {} synapses", net.weights.size(), m)});
    if (net.delays.size() != m)
        out.push_back({ViolationCode::ArityMismatch,
                       fmt::format("D has {} entries for {} synapses", net.delays.size(), m)});

    for (std::size_t i = 0; i < m; ++i) {
        const auto [from, to] = net.synapses[i];
        if (from >= n || to >= n)
            out.push_back({ViolationCode::BadEndpoint,
                           fmt::format("synapse {} endpoint ({} -> {}) outside V", i, from, to)});
    }
    for (std::size_t i = 0; i < net.delays.size() && i < m; ++i) {
        if (net.delays[i] < 1)
            out.push_back({ViolationCode::BadDelay, fmt::format("synapse {} delay < 1", i)});
    }
    for (NeuronId id : net.inputs)
        if (id >= n)
            out.push_back({ViolationCode::BadEndpoint, fmt::format("input {} outside V", id)});
    for (NeuronId id : net.outputs)
        if (id >= n)
            out.push_back({ViolationCode::BadEndpoint, fmt::format("output {} outside V", id)});

    const bool discrete = net.mode.kind == ValueKind::Discrete;
    for (std::size_t i = 0; i < net.thresholds.size() && i < n; ++i) {
        const double t = net.thresholds[i];
        if (discrete && !is_integer(t))
            out.push_back({ViolationCode::NonIntegerValue,
                           fmt::format("threshold of '{}' is {} in discrete mode", net.neurons[i], t)});
        if (!net.mode.thresholds.contains(t))
            out.push_back({ViolationCode::ValueOutOfRange,
                           fmt::format("threshold of '{}' is {} outside [{}, {}]", net.neurons[i], t,
                                       net.mode.thresholds.lo, net.mode.thresholds.hi)});
    }
    for (std::size_t i = 0; i < net.weights.size() && i < m; ++i) {
        const double w = net.weights[i];
        if (discrete && !is_integer(w))
            out.push_back({ViolationCode::NonIntegerValue,
                           fmt::format("weight of synapse {} is {} in discrete mode", i, w)});
        if (!net.mode.weights.contains(w))
            out.push_back({ViolationCode::ValueOutOfRange,
                           fmt::format("weight of synapse {} is {} outside [{}, {}]", i, w,
                                       net.mode.weights.lo, net.mode.weights.hi)});
    }
    return out;
}

Network build_network(const NetworkSpec& spec) {
    std::unordered_map<std::string, NeuronId> index;
    index.reserve(spec.neurons.size());

    Network net;
    net.mode = spec.mode;
    for (const NeuronSpec& ns : spec.neurons) {
        auto [it, inserted] = index.emplace(ns.name, static_cast<NeuronId>(net.neurons.size()));
        if (!inserted)
            throw SpecError(fmt::format("[DuplicateName] neuron '{}' listed twice", ns.name));
        net.neurons.push_back(ns.name);
        net.thresholds.push_back(ns.threshold);
        net.leaks.push_back(ns.leak ? 1 : 0);
    }

    auto resolve = [&](const std::string& name, const char* role) -> NeuronId {
        auto it = index.find(name);
        if (it == index.end())
            throw SpecError(fmt::format("[UnknownNeuron] {} '{}' is not in V", role, name));
        return it->second;
    };

    for (const SynapseSpec& ss : spec.synapses) {
        const NeuronId from = resolve(ss.from, "synapse source");
        const NeuronId to = resolve(ss.to, "synapse target");
        if (ss.delay < 1)
            throw SpecError(fmt::format("[BadDelay] synapse {} -> {}: delay < 1", ss.from, ss.to));
        net.synapses.emplace_back(from, to);
        net.weights.push_back(ss.weight);
        net.delays.push_back(static_cast<std::uint32_t>(ss.delay));
    }

    for (const std::string& name : spec.inputs) net.inputs.push_back(resolve(name, "input"));
    for (const std::string& name : spec.outputs) net.outputs.push_back(resolve(name, "output"));
    std::sort(net.inputs.begin(), net.inputs.end());
    net.inputs.erase(std::unique(net.inputs.begin(), net.inputs.end()), net.inputs.end());
    std::sort(net.outputs.begin(), net.outputs.end());
    net.outputs.erase(std::unique(net.outputs.begin(), net.outputs.end()), net.outputs.end());

    const auto violations = validate(net);
    if (!violations.empty()) {
        std::string msg = "invalid network:";
        for (const auto& v : violations)
            msg += fmt::format("\n  [{}] {}", violation_code_name(v.code), v.message);
        throw SpecError(msg);
    }
    return net;
}

NetworkSpec extract_spec(const Network& net) {
    NetworkSpec spec;
    spec.mode = net.mode;
    for (std::size_t i = 0; i < net.neurons.size(); ++i)
        spec.neurons.push_back({net.neurons[i], net.thresholds[i], net.leaks[i] != 0});
    for (std::size_t i = 0; i < net.synapses.size(); ++i)
        spec.synapses.push_back({net.neurons[net.synapses[i].first],
                                 net.neurons[net.synapses[i].second], net.weights[i],
                                 static_cast<std::int64_t>(net.delays[i])});
    for (NeuronId id : net.inputs) spec.inputs.push_back(net.neurons[id]);
    for (NeuronId id : net.outputs) spec.outputs.push_back(net.neurons[id]);
    return spec;
}

}  // namespace risp
