#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace risp {

// Domain errors (invalid specs, schedule violations, interface mismatches).
class SpecError : public std::runtime_error {
public:
    explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

enum class ValueKind { Analog, Discrete };

struct ValueRange {
    double lo = -1.0;
    double hi = 1.0;

    bool contains(double v) const { return v >= lo && v <= hi; }
    bool operator==(const ValueRange&) const = default;
};

// Value configuration: analog networks carry real weights/thresholds,
// discrete networks integer ones. The weight range must contain -1 and 1
// and the threshold range must contain 1, so unit normalization always
// has room to write its result.
struct ValueMode {
    ValueKind kind = ValueKind::Analog;
    ValueRange weights{-1.0, 1.0};
    ValueRange thresholds{-1.0, 1.0};

    static ValueMode analog() { return {}; }
    static ValueMode analog(ValueRange w, ValueRange t) { return {ValueKind::Analog, w, t}; }
    static ValueMode discrete() { return {ValueKind::Discrete, {-15, 15}, {0, 15}}; }
    static ValueMode discrete(ValueRange w, ValueRange t) { return {ValueKind::Discrete, w, t}; }

    bool operator==(const ValueMode&) const = default;
};

using NeuronId = std::uint32_t;

// A network is eight parallel sets: neurons (display names, whose position
// is the canonical index), per-neuron thresholds and leak flags, synapses
// as ordered (from, to) pairs with per-synapse weights and integer delays,
// and the input/output designations (sorted canonical indices).
struct Network {
    ValueMode mode;
    std::vector<std::string> neurons;
    std::vector<double> thresholds;
    std::vector<std::uint8_t> leaks;
    std::vector<std::pair<NeuronId, NeuronId>> synapses;
    std::vector<double> weights;
    std::vector<std::uint32_t> delays;
    std::vector<NeuronId> inputs;
    std::vector<NeuronId> outputs;

    std::size_t size() const { return neurons.size(); }
    std::size_t synapse_count() const { return synapses.size(); }
    bool is_input(NeuronId n) const;
    bool is_output(NeuronId n) const;
    std::optional<NeuronId> index_of(const std::string& name) const;

    bool operator==(const Network&) const = default;
};

// Raw build description; endpoints and designations refer to neurons by name.
struct NeuronSpec {
    std::string name;
    double threshold = 1.0;
    bool leak = false;
};

struct SynapseSpec {
    std::string from;
    std::string to;
    double weight = 1.0;
    std::int64_t delay = 1;
};

struct NetworkSpec {
    ValueMode mode;
    std::vector<NeuronSpec> neurons;
    std::vector<SynapseSpec> synapses;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
};

enum class ViolationCode {
    ArityMismatch,
    BadEndpoint,
    BadDelay,
    NonIntegerValue,
    ValueOutOfRange,
    BadRange,
    DuplicateName,
    UnknownNeuron,
};

struct Violation {
    ViolationCode code;
    std::string message;
};

const char* violation_code_name(ViolationCode code);

// Returns every invariant violation; empty for a valid network.
std::vector<Violation> validate(const Network& net);

// Builds and validates a network from a raw description. Canonical indices
// follow the order neurons are listed. Throws SpecError on any violation.
Network build_network(const NetworkSpec& spec);

// Re-extract the raw description (inverse of build_network up to set order).
NetworkSpec extract_spec(const Network& net);

}  // namespace risp
