#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "risp/engine.hpp"
#include "risp/model.hpp"

namespace risp {

struct PassReport {
    std::string pass;
    int neurons_removed = 0;
    int synapses_removed = 0;
    int synapses_added = 0;
    int values_normalized = 0;
    std::vector<std::string> details;

    bool changed() const {
        return neurons_removed || synapses_removed || synapses_added || values_normalized;
    }
    void absorb(const PassReport& other);
};

// Deletes hidden relay neurons: a neuron outside I and O with exactly one
// incoming synapse (u -> B, w1, d1) and one outgoing synapse (B -> v, w2, d2)
// where w1 >= threshold(B), so every arriving spike fires it. The pair is
// replaced by (u -> v, w2, d1 + d2); the relay's own check timestep is part
// of the merged delay, so arrival times are preserved exactly. Runs to
// fixpoint, collapsing whole relay chains.
std::pair<Network, PassReport> eliminate_passthrough(const Network& net);

// Sets incoming weights and the threshold to 1 for every non-input neuron
// whose incoming weights are all positive and all >= its threshold: such a
// neuron fires on every check before and after the rewrite. Negative
// incoming weights disqualify a neuron (an inhibitory delivery may clear a
// negative threshold before the rewrite but must not after).
std::pair<Network, PassReport> normalize_unit_weights(const Network& net);

// Removes hidden neurons with no directed path to an output, and hidden
// neurons with threshold > 0 that are unreachable from every input (they
// can never receive a spike, so they can never fire).
std::pair<Network, PassReport> prune_dead(const Network& net);

struct NamedSpike {
    std::string neuron;
    std::int64_t time = 0;
    double value = 1.0;
};

struct NamedFire {
    std::string neuron;
    std::int64_t time = 0;

    bool operator==(const NamedFire&) const = default;
};

struct Counterexample {
    int trial = 0;
    std::vector<NamedSpike> schedule;
    std::vector<NamedFire> fires_a;
    std::vector<NamedFire> fires_b;
};

struct EquivalenceVerdict {
    bool equivalent = true;
    int trials = 0;
    std::int64_t horizon = 0;
    std::optional<Counterexample> counterexample;
};

// Empirical equivalence: both networks must expose identical input/output
// name sets; they are run on `trials` random schedules and their
// output-neuron rasters compared exactly. Trials may execute in parallel;
// the reported counterexample is the lowest-numbered failing trial, so the
// verdict is deterministic for a given seed.
EquivalenceVerdict check_equivalence(const Network& a, const Network& b, int trials,
                                     std::int64_t horizon, std::uint64_t seed,
                                     const InputModel& input_model = {});

enum class PassKind { Normalize, Passthrough, PruneDead };

const char* pass_name(PassKind kind);

struct SimplifyConfig {
    std::vector<PassKind> passes = {PassKind::Normalize, PassKind::Passthrough,
                                    PassKind::PruneDead};
    int trials = 100;
    std::int64_t horizon = 200;
    std::uint64_t seed = 1;
    InputModel input_model;
};

struct SimplifyResult {
    Network network;
    PassReport report;
    EquivalenceVerdict verdict;
};

// Runs the configured passes to fixpoint, then verifies the result against
// the original with check_equivalence. A non-equivalent verdict (a pass
// soundness bug) returns the original network with the counterexample.
SimplifyResult simplify(const Network& net, const SimplifyConfig& config = {});

}  // namespace risp
