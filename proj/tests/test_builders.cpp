#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <vector>

#include "generators.hpp"
#include "risp/builders.hpp"
#include "risp/engine.hpp"

using namespace risp;

namespace {

bool truth(GateKind kind, bool a, bool b) {
    switch (kind) {
        case GateKind::And: return a && b;
        case GateKind::Or: return a || b;
        case GateKind::Xor: return a != b;
    }
    return false;
}

// Runs back-to-back gate trials spaced latency+1 apart and returns the
// timesteps at which X fired.
std::vector<std::int64_t> gate_fire_times(const GateInfo& gate,
                                          const std::vector<std::pair<bool, bool>>& trials) {
    const Network& net = gate.network;
    const NeuronId a = *net.index_of("A");
    const NeuronId b = *net.index_of("B");
    SpikeSchedule schedule;
    const std::int64_t spacing = gate.latency + 1;
    for (std::size_t k = 0; k < trials.size(); ++k) {
        const std::int64_t t0 = static_cast<std::int64_t>(k) * spacing;
        if (trials[k].first) schedule.entries.push_back({a, t0, 1});
        if (trials[k].second) schedule.entries.push_back({b, t0, 1});
    }
    const std::int64_t horizon = static_cast<std::int64_t>(trials.size()) * spacing + 2;
    std::vector<std::int64_t> times;
    for (const Fire& f : run(net, schedule, horizon).fires) times.push_back(f.time);
    return times;
}

void check_gate(GateKind kind) {
    const GateInfo gate = build_gate(kind);
    // single trials, all four combinations
    for (bool a : {false, true})
        for (bool b : {false, true}) {
            const auto times = gate_fire_times(gate, {{a, b}});
            if (truth(kind, a, b)) {
                REQUIRE(times == std::vector<std::int64_t>{gate.latency});
            } else {
                REQUIRE(times.empty());
            }
        }
    // three consecutive trials stay independent
    const std::vector<std::pair<bool, bool>> trials = {{true, true}, {true, false}, {false, true}};
    std::vector<std::int64_t> want;
    for (std::size_t k = 0; k < trials.size(); ++k)
        if (truth(kind, trials[k].first, trials[k].second))
            want.push_back(static_cast<std::int64_t>(k) * (gate.latency + 1) + gate.latency);
    CHECK(gate_fire_times(gate, trials) == want);
}

struct TrialOutcome {
    std::vector<std::int64_t> x_times;
    std::vector<std::int64_t> y_times;
};

// Back-to-back comparator trials: trial k starts at k*(t+1) with its own
// bias spike; placements are relative to the trial start.
TrialOutcome run_comparator_trials(const ComparatorInfo& cmp, std::int64_t t,
                                   const std::vector<std::vector<std::int64_t>>& x_placements,
                                   const std::vector<std::vector<std::int64_t>>& y_placements) {
    const Network& net = cmp.network;
    const NeuronId ix = *net.index_of("I_X");
    const NeuronId iy = *net.index_of("I_Y");
    const NeuronId bias = *net.index_of(cmp.bias);
    const NeuronId ox = *net.index_of("O_X");

    SpikeSchedule schedule;
    const std::size_t n_trials = x_placements.size();
    for (std::size_t k = 0; k < n_trials; ++k) {
        const std::int64_t base = static_cast<std::int64_t>(k) * (t + 1);
        schedule.entries.push_back({bias, base, 1});
        for (std::int64_t s : x_placements[k]) schedule.entries.push_back({ix, base + s, 1});
        for (std::int64_t s : y_placements[k]) schedule.entries.push_back({iy, base + s, 1});
    }
    const std::int64_t horizon = static_cast<std::int64_t>(n_trials) * (t + 1) + t + 4;
    const SpikeRaster raster = run(net, schedule, horizon);

    TrialOutcome out;
    for (const Fire& f : raster.fires)
        (f.neuron == ox ? out.x_times : out.y_times).push_back(f.time);
    return out;
}

void check_contract(const TrialOutcome& got, std::int64_t t, std::size_t n_trials,
                    const std::vector<std::size_t>& a, const std::vector<std::size_t>& b,
                    TieBreak tie) {
    std::vector<std::int64_t> want_x, want_y;
    for (std::size_t k = 0; k < n_trials; ++k) {
        const std::int64_t fire_at = static_cast<std::int64_t>(k) * (t + 1) + t + 1;
        const bool x_wins = a[k] > b[k] || (a[k] == b[k] && tie == TieBreak::FavorX);
        const bool y_wins = b[k] > a[k] || (a[k] == b[k] && tie == TieBreak::FavorY);
        if (x_wins) want_x.push_back(fire_at);
        if (y_wins) want_y.push_back(fire_at);
    }
    REQUIRE(got.x_times == want_x);
    REQUIRE(got.y_times == want_y);
}

std::vector<std::int64_t> subset_bits(std::uint64_t bits, std::int64_t t) {
    std::vector<std::int64_t> out;
    for (std::int64_t s = 0; s < t; ++s)
        if (bits & (1ull << s)) out.push_back(s);
    return out;
}

}  // namespace

TEST_CASE("gate truth tables hold across back-to-back trials") {
    check_gate(GateKind::And);
    check_gate(GateKind::Or);
    check_gate(GateKind::Xor);
}

TEST_CASE("AND fires at t=1 only for (1,1)") {
    const GateInfo gate = build_gate(GateKind::And);
    CHECK(gate.latency == 1);
    CHECK(gate_fire_times(gate, {{true, true}}) == std::vector<std::int64_t>{1});
    CHECK(gate_fire_times(gate, {{true, false}}).empty());
    CHECK(gate_fire_times(gate, {{false, true}}).empty());
    CHECK(gate_fire_times(gate, {{false, false}}).empty());
}

TEST_CASE("comparator: exhaustive over all placements for small t") {
    for (std::int64_t t : {1, 2, 3}) {
        const ComparatorInfo cmp = build_comparator({t, TieBreak::None});
        CHECK(cmp.output_time == t + 1);
        for (std::uint64_t xa = 0; xa < (1ull << t); ++xa)
            for (std::uint64_t yb = 0; yb < (1ull << t); ++yb) {
                const auto xs = subset_bits(xa, t);
                const auto ys = subset_bits(yb, t);
                const auto got = run_comparator_trials(cmp, t, {xs}, {ys});
                check_contract(got, t, 1, {xs.size()}, {ys.size()}, TieBreak::None);
            }
    }
}

TEST_CASE("comparator: spec examples") {
    {
        const ComparatorInfo cmp = build_comparator({4, TieBreak::None});
        const auto got = run_comparator_trials(cmp, 4, {{0, 1, 2}}, {{2}});
        CHECK(got.x_times == std::vector<std::int64_t>{5});
        CHECK(got.y_times.empty());
    }
    {
        const ComparatorInfo cmp = build_comparator({3, TieBreak::None});
        const auto got = run_comparator_trials(cmp, 3, {{}}, {{1}});
        CHECK(got.x_times.empty());
        CHECK(got.y_times == std::vector<std::int64_t>{4});
    }
}

TEST_CASE("comparator: ties obey the tie-break setting") {
    for (auto tie : {TieBreak::None, TieBreak::FavorX, TieBreak::FavorY}) {
        const std::int64_t t = 3;
        const ComparatorInfo cmp = build_comparator({t, tie});
        for (std::uint64_t xa = 0; xa < (1ull << t); ++xa)
            for (std::uint64_t yb = 0; yb < (1ull << t); ++yb) {
                const auto xs = subset_bits(xa, t);
                const auto ys = subset_bits(yb, t);
                const auto got = run_comparator_trials(cmp, t, {xs}, {ys});
                check_contract(got, t, 1, {xs.size()}, {ys.size()}, tie);
            }
    }
}

TEST_CASE("comparator: consecutive trials are independent") {
    std::mt19937_64 rng(17);
    for (std::int64_t t : {2, 3, 4, 6}) {
        const ComparatorInfo cmp = build_comparator({t, TieBreak::None});
        for (int rep = 0; rep < 100; ++rep) {
            const auto xs1 = subset_bits(rng() & ((1ull << t) - 1), t);
            const auto ys1 = subset_bits(rng() & ((1ull << t) - 1), t);
            const auto xs2 = subset_bits(rng() & ((1ull << t) - 1), t);
            const auto ys2 = subset_bits(rng() & ((1ull << t) - 1), t);

            const auto paired = run_comparator_trials(cmp, t, {xs1, xs2}, {ys1, ys2});
            check_contract(paired, t, 2, {xs1.size(), xs2.size()}, {ys1.size(), ys2.size()},
                           TieBreak::None);

            // same per-trial answers as isolated runs
            const auto solo1 = run_comparator_trials(cmp, t, {xs1}, {ys1});
            const auto solo2 = run_comparator_trials(cmp, t, {xs2}, {ys2});
            std::vector<std::int64_t> x_merged = solo1.x_times;
            for (std::int64_t v : solo2.x_times) x_merged.push_back(v + t + 1);
            CHECK(paired.x_times == x_merged);
        }
    }
}

TEST_CASE("comparator rejects a non-positive interval") {
    CHECK_THROWS_AS(build_comparator({0, TieBreak::None}), SpecError);
}
