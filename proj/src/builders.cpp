#include "risp/builders.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace risp {

GateInfo build_gate(GateKind kind) {
    NetworkSpec spec;
    spec.mode = ValueMode::discrete();
    spec.inputs = {"A", "B"};
    spec.outputs = {"X"};

    switch (kind) {
        case GateKind::And:
            spec.neurons = {{"A", 1, true}, {"B", 1, true}, {"X", 2, true}};
            spec.synapses = {{"A", "X", 1, 1}, {"B", "X", 1, 1}};
            return {build_network(spec), 1};
        case GateKind::Or:
            spec.neurons = {{"A", 1, true}, {"B", 1, true}, {"X", 1, true}};
            spec.synapses = {{"A", "X", 1, 1}, {"B", "X", 1, 1}};
            return {build_network(spec), 1};
        case GateKind::Xor:
            // P detects A|B, Q detects A&B; Q vetoes P at the output.
            spec.neurons = {{"A", 1, true}, {"B", 1, true}, {"P", 1, true},
                            {"Q", 2, true}, {"X", 1, true}};
            spec.synapses = {{"A", "P", 1, 1}, {"B", "P", 1, 1}, {"A", "Q", 1, 1},
                             {"B", "Q", 1, 1}, {"P", "X", 1, 1}, {"Q", "X", -1, 1}};
            return {build_network(spec), 2};
    }
    throw SpecError("unknown gate kind");
}

ComparatorInfo build_comparator(const ComparatorSpec& spec) {
    if (spec.interval < 1)
        throw SpecError(fmt::format("comparator interval must be >= 1, got {}", spec.interval));
    const double t = static_cast<double>(spec.interval);
    const double limit = std::max(15.0, t + 2);

    NetworkSpec ns;
    ns.mode = ValueMode::discrete({-limit, limit}, {0, limit});
    ns.inputs = {"I_X", "I_Y", "Bias"};
    ns.outputs = {"O_X", "O_Y"};
    ns.neurons = {{"I_X", 1, true},      {"I_Y", 1, true},      {"Bias", 1, true},
                  {"ACC_X", t + 1, false}, {"ACC_Y", t + 1, false},
                  {"O_X", 1, true},      {"O_Y", 1, true}};
    ns.synapses = {
        {"I_X", "ACC_X", 1, 1},
        {"I_Y", "ACC_X", -1, 1},
        {"I_Y", "ACC_Y", 1, 1},
        {"I_X", "ACC_Y", -1, 1},
        {"Bias", "ACC_X", t, spec.interval},          // probe
        {"Bias", "ACC_X", t + 1, spec.interval + 1},  // flush
        {"Bias", "ACC_Y", t, spec.interval},
        {"Bias", "ACC_Y", t + 1, spec.interval + 1},
        {"ACC_X", "O_X", 1, 1},
        {"ACC_Y", "O_Y", 1, 1},
        {"Bias", "O_X", -1, spec.interval + 2},  // cancels the flush echo
        {"Bias", "O_Y", -1, spec.interval + 2},
    };
    if (spec.tie_break == TieBreak::FavorX)
        ns.synapses.push_back({"Bias", "ACC_X", 1, spec.interval});
    else if (spec.tie_break == TieBreak::FavorY)
        ns.synapses.push_back({"Bias", "ACC_Y", 1, spec.interval});

    return {build_network(ns), "Bias", spec.interval + 1};
}

}  // namespace risp
