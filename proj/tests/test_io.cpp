#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "generators.hpp"
#include "risp/builders.hpp"
#include "risp/engine.hpp"
#include "risp/io.hpp"

using namespace risp;

namespace {

Network and_network() {
    return build_gate(GateKind::And).network;
}

}  // namespace

TEST_CASE("network documents round trip losslessly") {
    const Network net = and_network();
    const std::string text = write_network(net);
    CHECK(read_network(text) == net);
    CHECK(write_network(read_network(text)) == text);
}

TEST_CASE("writing is byte-deterministic") {
    const Network net = and_network();
    CHECK(write_network(net) == write_network(net));
}

TEST_CASE("analog values survive the round trip bit for bit") {
    NetworkSpec spec;
    spec.mode = ValueMode::analog();
    spec.neurons = {{"a", 0.1 + 0.2, true}, {"b", -0.66, false}};
    spec.synapses = {{"a", "b", 0.65, 2}, {"a", "b", 1.0 / 3.0, 7}};
    spec.inputs = {"a"};
    spec.outputs = {"b"};
    const Network net = build_network(spec);
    const Network back = read_network(write_network(net));
    CHECK(back.thresholds[0] == 0.1 + 0.2);
    CHECK(back.thresholds[1] == -0.66);
    CHECK(back.weights[0] == 0.65);
    CHECK(back.weights[1] == 1.0 / 3.0);
}

TEST_CASE("documents with missing or unknown keys are rejected") {
    const std::string text = write_network(and_network());

    std::string missing_delay = text;
    const auto pos = missing_delay.find("\"delay\"");
    REQUIRE(pos != std::string::npos);
    missing_delay.replace(pos, 7, "\"delay_\"");
    CHECK_THROWS_AS(read_network(missing_delay), ParseError);

    CHECK_THROWS_WITH_AS(
        read_network(R"({"value_mode":"analog","ranges":{"weight":[-1,1],"threshold":[-1,1]},)"
                     R"("neurons":[],"synapses":[],"inputs":[],"outputs":[],"color":3})"),
        doctest::Contains("unknown key"), ParseError);
}

TEST_CASE("parse errors carry line and column") {
    try {
        read_network("{\n  \"value_mode\": oops\n}");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(doctest::String(e.what()).size() > 0);
    }
}

TEST_CASE("paper-style analog values are accepted") {
    const std::string doc = R"({
  "value_mode": "analog",
  "ranges": {"weight": [-1.0, 1.0], "threshold": [-1.0, 1.0]},
  "neurons": [
    {"id": "2", "threshold": 1.0, "leak": false},
    {"id": "B", "threshold": -0.66, "leak": false},
    {"id": "8", "threshold": -0.21, "leak": false}
  ],
  "synapses": [
    {"from": "2", "to": "B", "weight": 0.65, "delay": 2},
    {"from": "B", "to": "8", "weight": 0.5, "delay": 2}
  ],
  "inputs": ["2"],
  "outputs": ["8"]
})";
    const Network net = read_network(doc);
    CHECK(net.thresholds[1] == -0.66);
    CHECK(net.weights[0] == 0.65);
}

TEST_CASE("fuzzed inputs produce structured errors, never crashes") {
    std::mt19937_64 rng(13);
    const std::string valid = write_network(and_network());
    for (int i = 0; i < 300; ++i) {
        std::string text;
        if (i % 2 == 0) {
            const std::size_t len = static_cast<std::size_t>(testgen::pick(rng, 0, 200));
            for (std::size_t k = 0; k < len; ++k)
                text += static_cast<char>(testgen::pick(rng, 1, 255));
        } else {
            text = valid;
            const std::size_t flips = static_cast<std::size_t>(testgen::pick(rng, 1, 8));
            for (std::size_t k = 0; k < flips && !text.empty(); ++k)
                text[static_cast<std::size_t>(testgen::pick(
                    rng, 0, static_cast<std::int64_t>(text.size()) - 1))] =
                    static_cast<char>(testgen::pick(rng, 32, 126));
        }
        try {
            (void)read_network(text);
        } catch (const ParseError&) {
        } catch (const SpecError&) {
        }
    }
}

TEST_CASE("schedule text round trip") {
    const Network net = and_network();
    const SpikeSchedule schedule = read_schedule("apply A 0 1\napply B 0 1\n", net);
    REQUIRE(schedule.entries.size() == 2);
    CHECK(schedule.entries[0].neuron == 0);
    CHECK(schedule.entries[1].neuron == 1);
    CHECK(schedule.entries[0].value == 1.0);
    CHECK(read_schedule(write_schedule(schedule, net), net).entries.size() == 2);

    CHECK(read_schedule("", net).entries.empty());
    CHECK(read_schedule("\n\n  \n", net).entries.empty());

    CHECK_THROWS_AS(read_schedule("apply A zero 1", net), ParseError);
    CHECK_THROWS_AS(read_schedule("apply X 0 1", net), ParseError);  // not an input
    CHECK_THROWS_AS(read_schedule("poke A 0 1", net), ParseError);
    CHECK_THROWS_AS(read_schedule("apply A 0", net), ParseError);
}

TEST_CASE("raster text matches the AND narrative") {
    const Network net = and_network();
    const SpikeSchedule schedule = read_schedule("apply A 0 1\napply B 0 1", net);
    const SpikeRaster raster = run(net, schedule, 3, RecordMode::AllNeurons);
    CHECK(write_raster(raster, net) == "fire A 0\nfire B 0\nfire X 1\n");

    const SpikeRaster back = read_raster(write_raster(raster, net), net);
    CHECK(back.fires == raster.fires);
}

TEST_CASE("dot export") {
    const std::string dot = to_dot(and_network());
    CHECK(dot == to_dot(and_network()));
    CHECK(dot.find("\"A\" [label=\"A / 1 / leak\" peripheries=2]") != std::string::npos);
    CHECK(dot.find("\"X\" [label=\"X / 2 / leak\" style=bold penwidth=2]") != std::string::npos);
    CHECK(dot.find("\"A\" -> \"X\" [label=\"1, d=1\"]") != std::string::npos);

    NetworkSpec empty;
    CHECK(to_dot(build_network(empty)) == "digraph risp {\n  rankdir=LR;\n}\n");

    const ComparatorInfo cmp = build_comparator({4, TieBreak::None});
    const std::string cmp_dot = to_dot(cmp.network);
    std::size_t nodes = 0;
    for (std::size_t pos = 0; (pos = cmp_dot.find("label=\"", pos)) != std::string::npos; ++pos)
        ++nodes;
    // one label per neuron plus one per synapse
    CHECK(nodes == cmp.network.size() + cmp.network.synapse_count());
}
