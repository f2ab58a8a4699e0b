#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "risp/model.hpp"

using namespace risp;

namespace {

NetworkSpec and_spec() {
    NetworkSpec spec;
    spec.mode = ValueMode::discrete();
    spec.neurons = {{"A", 1, true}, {"B", 1, true}, {"X", 2, true}};
    spec.synapses = {{"A", "X", 1, 1}, {"B", "X", 1, 1}};
    spec.inputs = {"A", "B"};
    spec.outputs = {"X"};
    return spec;
}

bool has_code(const std::vector<Violation>& vs, ViolationCode code) {
    return std::any_of(vs.begin(), vs.end(), [&](const Violation& v) { return v.code == code; });
}

}  // namespace

TEST_CASE("AND spec builds a valid 3-neuron network") {
    const Network net = build_network(and_spec());
    CHECK(net.size() == 3);
    CHECK(net.synapse_count() == 2);
    CHECK(net.neurons == std::vector<std::string>{"A", "B", "X"});
    CHECK(net.thresholds[2] == 2.0);
    CHECK(net.leaks[2] == 1);
    CHECK(net.inputs == std::vector<NeuronId>{0, 1});
    CHECK(net.outputs == std::vector<NeuronId>{2});
    CHECK(validate(net).empty());
}

TEST_CASE("empty spec builds a valid empty network") {
    NetworkSpec spec;
    const Network net = build_network(spec);
    CHECK(net.size() == 0);
    CHECK(net.synapse_count() == 0);
    CHECK(validate(net).empty());
}

TEST_CASE("delay below one is rejected") {
    NetworkSpec spec = and_spec();
    spec.synapses[0].delay = 0;
    CHECK_THROWS_WITH_AS(build_network(spec), doctest::Contains("delay < 1"), SpecError);
}

TEST_CASE("unknown synapse endpoint is rejected") {
    NetworkSpec spec = and_spec();
    spec.synapses[0].from = "Q";
    CHECK_THROWS_AS(build_network(spec), SpecError);
}

TEST_CASE("duplicate neuron names are rejected") {
    NetworkSpec spec = and_spec();
    spec.neurons.push_back({"A", 1, false});
    CHECK_THROWS_AS(build_network(spec), SpecError);
}

TEST_CASE("validate reports arity mismatches") {
    Network net = build_network(and_spec());
    net.weights.pop_back();
    CHECK(has_code(validate(net), ViolationCode::ArityMismatch));
}

TEST_CASE("validate reports non-integer values in discrete mode") {
    Network net = build_network(and_spec());
    net.weights[0] = 0.5;
    CHECK(has_code(validate(net), ViolationCode::NonIntegerValue));
}

TEST_CASE("validate reports out-of-range values") {
    Network net = build_network(and_spec());
    net.weights[0] = 99;
    CHECK(has_code(validate(net), ViolationCode::ValueOutOfRange));

    NetworkSpec analog = and_spec();
    analog.mode = ValueMode::analog();
    analog.neurons[2].threshold = 1.5;
    CHECK_THROWS_AS(build_network(analog), SpecError);
}

TEST_CASE("value ranges must leave room for unit normalization") {
    Network net = build_network(and_spec());
    net.mode.weights = {2, 15};
    CHECK(has_code(validate(net), ViolationCode::BadRange));
    net.mode.weights = {-15, 15};
    net.mode.thresholds = {2, 15};
    CHECK(has_code(validate(net), ViolationCode::BadRange));
}

TEST_CASE("bad endpoints are reported by validate") {
    Network net = build_network(and_spec());
    net.synapses[0].second = 17;
    CHECK(has_code(validate(net), ViolationCode::BadEndpoint));
}

TEST_CASE("self-loops and duplicate synapses are permitted") {
    NetworkSpec spec = and_spec();
    spec.synapses.push_back({"X", "X", 1, 1});
    spec.synapses.push_back({"A", "X", 1, 1});  // duplicate pair
    const Network net = build_network(spec);
    CHECK(validate(net).empty());
    CHECK(net.synapse_count() == 4);
}

TEST_CASE("round trip through extract_spec preserves the eight sets") {
    const NetworkSpec spec = and_spec();
    const Network net = build_network(spec);
    const NetworkSpec back = extract_spec(net);
    const Network again = build_network(back);
    CHECK(net == again);
    CHECK(back.neurons.size() == spec.neurons.size());
    CHECK(back.synapses.size() == spec.synapses.size());
}

TEST_CASE("canonical indexing is deterministic") {
    const Network a = build_network(and_spec());
    const Network b = build_network(and_spec());
    CHECK(a == b);

    // input order in the description does not change the canonical sets
    NetworkSpec swapped = and_spec();
    std::swap(swapped.inputs[0], swapped.inputs[1]);
    CHECK(build_network(swapped) == a);
}

TEST_CASE("validate accepts whatever build_network accepts") {
    for (const auto& spec : {and_spec(), NetworkSpec{}}) {
        const Network net = build_network(spec);
        CHECK(validate(net).empty());
    }
}
