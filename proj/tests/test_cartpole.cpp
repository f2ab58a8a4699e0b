#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "generators.hpp"
#include "risp/cartpole.hpp"
#include "risp/evolve.hpp"

using namespace risp;

namespace {

// Independent formulation of the same dynamics: the coupled equations
//   (mc+mp)·x'' + mp·l·(th''·cos - th'^2·sin) = F
//   mp·l·x''·cos + (4/3)·mp·l^2·th'' = mp·l·g·sin
// solved as a 2x2 linear system, then the same explicit Euler update.
CartPoleState oracle_step(const CartPoleState& s, double force, const EpisodeConfig& c) {
    const double mc = c.cart_mass, mp = c.pole_mass, l = c.pole_half_length, g = c.gravity;
    const double cos = std::cos(s.theta), sin = std::sin(s.theta);
    const double a11 = mc + mp, a12 = mp * l * cos;
    const double a21 = mp * l * cos, a22 = (4.0 / 3.0) * mp * l * l;
    const double b1 = force + mp * l * s.dtheta * s.dtheta * sin;
    const double b2 = mp * l * g * sin;
    const double det = a11 * a22 - a12 * a21;
    const double x_acc = (b1 * a22 - a12 * b2) / det;
    const double theta_acc = (a11 * b2 - a21 * b1) / det;
    return {s.x + c.dt * s.dx, s.dx + c.dt * x_acc, s.theta + c.dt * s.dtheta,
            s.dtheta + c.dt * theta_acc};
}

Network pd_controller() {
    // bang-bang on pole angle and angular velocity
    NetworkSpec spec = extract_spec(seed_genome({Variant::RispAL}));
    spec.synapses = {{"I_T+", "O_R", 1, 1},
                     {"I_T-", "O_L", 1, 1},
                     {"I_DT+", "O_R", 1, 1},
                     {"I_DT-", "O_L", 1, 1}};
    return build_network(spec);
}

}  // namespace

TEST_CASE("physics matches an independently formulated oracle") {
    const EpisodeConfig cfg;
    std::mt19937_64 rng(3);
    CartPoleState s{0.1, -0.3, 0.05, 0.2};
    for (int i = 0; i < 500; ++i) {
        const double force = (rng() & 1) ? cfg.force_mag : -cfg.force_mag;
        const CartPoleState mine = physics_step(s, force, cfg);
        const CartPoleState ref = oracle_step(s, force, cfg);
        CHECK(mine.x == doctest::Approx(ref.x).epsilon(1e-12));
        CHECK(mine.dx == doctest::Approx(ref.dx).epsilon(1e-12));
        CHECK(mine.theta == doctest::Approx(ref.theta).epsilon(1e-12));
        CHECK(mine.dtheta == doctest::Approx(ref.dtheta).epsilon(1e-12));
        s = mine;
        if (!alive(s, cfg)) s = {0, 0, 0.01, 0};
    }
}

TEST_CASE("first push from rest: frozen trajectory values") {
    const EpisodeConfig cfg;
    const CartPoleState s1 = physics_step({0, 0, 0, 0}, 10.0, cfg);
    // exact rationals: dx = 8/41, dtheta = -12/41
    CHECK(s1.x == 0.0);
    CHECK(s1.theta == 0.0);
    CHECK(s1.dx == doctest::Approx(0.1951219512195122).epsilon(1e-14));
    CHECK(s1.dtheta == doctest::Approx(-0.29268292682926828).epsilon(1e-14));
    CHECK(s1.dx > 0.0);

    const CartPoleState s2 = physics_step(s1, 10.0, cfg);
    CHECK(s2.x == doctest::Approx(0.0039024390243902443).epsilon(1e-12));
    CHECK(s2.dx == doctest::Approx(0.3902439024390244).epsilon(1e-12));
    CHECK(s2.theta == doctest::Approx(-0.0058536585365853658).epsilon(1e-12));
    CHECK(s2.dtheta == doctest::Approx(-0.58536585365853655).epsilon(1e-12));
    CHECK(s2.theta < 0.0);  // pole rotates opposite the push
}

TEST_CASE("equilibrium is a fixed point under zero force") {
    const CartPoleState s = physics_step({0, 0, 0, 0}, 0.0, {});
    CHECK(s == CartPoleState{0, 0, 0, 0});
}

TEST_CASE("dynamics are left-right symmetric") {
    const EpisodeConfig cfg;
    std::mt19937_64 rng(9);
    for (int i = 0; i < 200; ++i) {
        const CartPoleState s{testgen::unit(rng) * 2 - 1, testgen::unit(rng) * 2 - 1,
                              (testgen::unit(rng) * 2 - 1) * 0.2,
                              (testgen::unit(rng) * 2 - 1) * 2};
        const double force = (testgen::unit(rng) * 2 - 1) * cfg.force_mag;
        const CartPoleState fwd = physics_step(s, force, cfg);
        const CartPoleState mirrored =
            physics_step({-s.x, -s.dx, -s.theta, -s.dtheta}, -force, cfg);
        CHECK(mirrored.x == doctest::Approx(-fwd.x).epsilon(1e-12));
        CHECK(mirrored.dx == doctest::Approx(-fwd.dx).epsilon(1e-12));
        CHECK(mirrored.theta == doctest::Approx(-fwd.theta).epsilon(1e-12));
        CHECK(mirrored.dtheta == doctest::Approx(-fwd.dtheta).epsilon(1e-12));
    }
}

TEST_CASE("encoding follows the one-to-four binning rule") {
    const Network net = seed_genome({Variant::RispAL});
    ObservationRanges ranges;
    ranges.x = 1.0;

    auto spikes_for = [&](const CartPoleState& s) {
        const SpikeSchedule schedule = encode_observation(s, ranges, net);
        std::map<std::string, std::vector<std::int64_t>> by_name;
        for (const SpikeEntry& e : schedule.entries) {
            CHECK(e.value == 1.0);
            by_name[net.neurons[e.neuron]].push_back(e.time);
        }
        return by_name;
    };

    const auto a = spikes_for({0.6, 0, 0, 0});
    CHECK(a.at("I_X+") == std::vector<std::int64_t>{0, 1, 2});  // ceil(4*0.6) = 3
    CHECK(a.at("I_DX+") == std::vector<std::int64_t>{0});       // zero routes positive
    CHECK(a.count("I_X-") == 0);

    const auto b = spikes_for({-9.9, 0, 0, 0});
    CHECK(b.at("I_X-") == std::vector<std::int64_t>{0, 1, 2, 3});  // clamped to 4

    // totality: every finite state spikes exactly 4 neurons, 1..4 times each
    std::mt19937_64 rng(21);
    for (int i = 0; i < 200; ++i) {
        const auto m = spikes_for({(testgen::unit(rng) * 2 - 1) * 10,
                                   (testgen::unit(rng) * 2 - 1) * 10,
                                   (testgen::unit(rng) * 2 - 1) * 10,
                                   (testgen::unit(rng) * 2 - 1) * 10});
        CHECK(m.size() == 4);
        for (const auto& [name, times] : m) {
            CHECK(times.size() >= 1);
            CHECK(times.size() <= 4);
        }
    }
}

TEST_CASE("decode compares spike counts with ties pushing left") {
    CHECK(decode_action(3, 5) == Action::Right);
    CHECK(decode_action(2, 2) == Action::Left);
    CHECK(decode_action(0, 0) == Action::Left);
    CHECK(decode_action(5, 3) == Action::Left);

    SpikeRaster raster;
    raster.fires = {{1, 0}, {1, 3}, {0, 5}};
    CHECK(decode_action(raster, 0, 1) == Action::Right);
}

TEST_CASE("an empty network drifts off the road") {
    const Network net = seed_genome({Variant::RispAL});
    EpisodeConfig cfg;
    cfg.max_intervals = 2000;
    std::vector<IntervalTrace> trace;
    const int survived = run_episode(net, {0, 0, 0, 0}, cfg, {}, &trace);
    CHECK(survived < cfg.max_intervals);
    for (const IntervalTrace& t : trace) CHECK(t.action == Action::Left);  // 0-0 ties
}

TEST_CASE("episodes are deterministic") {
    const Network net = pd_controller();
    EpisodeConfig cfg;
    cfg.max_intervals = 500;
    const CartPoleState start{0.1, 0, 0.02, 0};
    CHECK(run_episode(net, start, cfg) == run_episode(net, start, cfg));
}

TEST_CASE("surviving the cap means five simulated minutes at defaults") {
    const EpisodeConfig cfg;
    CHECK(cfg.max_intervals * cfg.dt == 300.0);

    // a hand controller easily survives a short cap from upright
    EpisodeConfig capped;
    capped.max_intervals = 50;
    const int survived = run_episode(pd_controller(), {0, 0, 0, 0}, capped);
    CHECK(survived == 50);
}

TEST_CASE("pending deliveries can cross interval boundaries") {
    NetworkSpec spec = extract_spec(seed_genome({Variant::RispAL}));
    spec.synapses = {{"I_T+", "O_R", 1, 60}};  // longer than one 50-step interval
    const Network net = build_network(spec);

    EpisodeConfig cfg;
    cfg.max_intervals = 3;
    std::vector<IntervalTrace> persistent, isolated;
    run_episode(net, {0, 0, 0, 0}, cfg, {}, &persistent);
    cfg.reset_engine_between_intervals = true;
    run_episode(net, {0, 0, 0, 0}, cfg, {}, &isolated);

    REQUIRE(persistent.size() >= 2);
    REQUIRE(isolated.size() >= 2);
    CHECK(persistent[1].r_count == 1);  // the delayed spike lands in interval 1
    CHECK(isolated[1].r_count == 0);    // reset drops it
    CHECK(persistent[1].action == Action::Right);
    CHECK(isolated[1].action == Action::Left);
}

TEST_CASE("networks without the interface are rejected") {
    NetworkSpec spec;
    spec.mode = ValueMode::analog();
    spec.neurons = {{"a", 1, true}};
    spec.inputs = {"a"};
    spec.outputs = {"a"};
    CHECK_THROWS_AS(run_episode(build_network(spec), {0, 0, 0, 0}, {}), SpecError);
}
