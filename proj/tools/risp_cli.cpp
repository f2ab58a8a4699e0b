// risp: command-line front end for the RISP toolchain.
//
// Subcommands: sim, simplify, viz, gates, comparator, episode, train, test,
// bench. Non-interactive; exit code 0 on success, 1 on domain errors
// (missing files, malformed documents, interface mismatches), 2 on usage
// errors. All randomness comes from explicit --seed flags.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "risp/bench.hpp"
#include "risp/builders.hpp"
#include "risp/cartpole.hpp"
#include "risp/engine.hpp"
#include "risp/evolve.hpp"
#include "risp/io.hpp"
#include "risp/model.hpp"
#include "risp/optimizer.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw risp::SpecError(fmt::format("cannot open '{}'", path));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw risp::SpecError(fmt::format("cannot write '{}'", path));
    out << text;
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
}

risp::Network load_network(const std::string& path) {
    return risp::read_network(read_file(path));
}

struct SimArgs {
    std::string network, schedule, out, engine = "event";
    std::int64_t horizon = 0;
    bool all_neurons = false;
};

struct SimplifyArgs {
    std::string network, out, passes = "normalize,passthrough,prune";
    int trials = 100;
    std::int64_t horizon = 200;
    std::uint64_t seed = 1;
    double prob = 0.5;
};

struct EpisodeArgs {
    std::string network, trace;
    double x = 0, dx = 0, theta = 0, dtheta = 0;
    int max_intervals = 15000;
    int steps_per_interval = 50;
    double dt = 0.02;
    bool reset_engine = false;
};

struct TrainArgs {
    std::string variant, out_network, out_history;
    int population = 100;
    int epochs = 150;
    int episodes = 10;
    std::uint64_t seed = 1;
    int threads = 0;
    int max_hidden = 8;
    bool paper_scale = false;
};

struct TestArgs {
    std::string network;
    int tests = 100;
    std::uint64_t seed = 1;
};

struct BenchArgs {
    std::string network, engine = "both", csv;
    std::int64_t horizon = 10000;
    int repetitions = 5;
    std::uint64_t seed = 1;
    double prob = 0.1;
};

std::vector<risp::PassKind> parse_passes(const std::string& list) {
    std::vector<risp::PassKind> passes;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "normalize")
            passes.push_back(risp::PassKind::Normalize);
        else if (item == "passthrough")
            passes.push_back(risp::PassKind::Passthrough);
        else if (item == "prune")
            passes.push_back(risp::PassKind::PruneDead);
        else
            throw risp::SpecError(fmt::format("unknown pass '{}'", item));
    }
    if (passes.empty()) throw risp::SpecError("empty pass list");
    return passes;
}

int run_sim(const SimArgs& args) {
    const risp::Network net = load_network(args.network);
    const risp::SpikeSchedule schedule = risp::read_schedule(read_file(args.schedule), net);
    const auto record = args.all_neurons ? risp::RecordMode::AllNeurons
                                         : risp::RecordMode::OutputsOnly;
    const risp::SpikeRaster raster =
        args.engine == "ref" ? risp::run(net, schedule, args.horizon, record)
                             : risp::run_event_driven(net, schedule, args.horizon, record);
    emit(args.out, risp::write_raster(raster, net));
    return 0;
}

int run_simplify(const SimplifyArgs& args) {
    const risp::Network net = load_network(args.network);
    risp::SimplifyConfig config;
    config.passes = parse_passes(args.passes);
    config.trials = args.trials;
    config.horizon = args.horizon;
    config.seed = args.seed;
    config.input_model.fire_probability = args.prob;
    const risp::SimplifyResult result = risp::simplify(net, config);

    write_file(args.out, risp::write_network(result.network));
    std::cout << fmt::format(
        "pass report:\n  neurons removed: {}\n  synapses removed: {}\n"
        "  synapses added: {}\n  values normalized: {}\n",
        result.report.neurons_removed, result.report.synapses_removed,
        result.report.synapses_added, result.report.values_normalized);
    for (const std::string& line : result.report.details)
        std::cout << "  - " << line << "\n";
    if (result.verdict.equivalent) {
        std::cout << fmt::format("verdict: equivalent (trials={}, horizon={})\n",
                                 result.verdict.trials, result.verdict.horizon);
    } else {
        const auto& ce = *result.verdict.counterexample;
        std::cout << fmt::format(
            "verdict: NOT equivalent (trial {}); original network written unchanged\n", ce.trial);
    }
    return 0;
}

int run_train(const TrainArgs& args, const CLI::App* cmd) {
    risp::VariantConfig variant = risp::VariantConfig::parse(args.variant);
    risp::EvolutionConfig config;
    config.population = args.population;
    config.epochs = args.epochs;
    if (args.paper_scale) {
        if (cmd->count("--population") == 0) config.population = 500;
        if (cmd->count("--epochs") == 0) config.epochs = 100;
    }
    config.episodes_per_eval = args.episodes;
    config.seed = args.seed;
    config.threads = args.threads;
    config.max_hidden = args.max_hidden;

    const auto t0 = std::chrono::steady_clock::now();
    const risp::EvolveResult result = risp::evolve(variant, config);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (!args.out_network.empty()) write_file(args.out_network, risp::write_network(result.best));
    if (!args.out_history.empty()) {
        std::string csv = "epoch,best,mean,evaluations\n";
        for (const risp::EpochStats& e : result.history)
            csv += fmt::format("{},{},{},{}\n", e.epoch, e.best, e.mean, e.evaluations);
        write_file(args.out_history, csv);
    }

    std::cout << fmt::format("variant {}\npopulation {}\nepochs_run {}\nbest_fitness {}\n",
                             variant.name(), config.population, result.history.size(),
                             result.best_fitness);
    std::cout << fmt::format("perfect_fitness {}\n", result.perfect_fitness);
    if (result.epochs_to_perfect)
        std::cout << fmt::format("epochs_to_perfect {}\n", *result.epochs_to_perfect);
    std::cerr << fmt::format("wall seconds: {:.1f}\n", wall);
    return 0;
}

int run_bench(const BenchArgs& args) {
    const risp::Network net = load_network(args.network);
    risp::InputModel model;
    model.fire_probability = args.prob;

    std::vector<risp::BenchReport> reports;
    if (args.engine == "ref" || args.engine == "both")
        reports.push_back(risp::run_benchmark(net, model, args.horizon,
                                              risp::EngineKind::Reference, args.repetitions,
                                              args.seed));
    if (args.engine == "event" || args.engine == "both")
        reports.push_back(risp::run_benchmark(net, model, args.horizon,
                                              risp::EngineKind::EventDriven, args.repetitions,
                                              args.seed));
    std::string csv = risp::bench_csv_header();
    for (const auto& r : reports) {
        std::cout << risp::format_report(r) << "\n";
        csv += risp::bench_csv_row(r);
    }
    if (!args.csv.empty()) write_file(args.csv, csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RISP spiking-processor toolchain"};
    app.require_subcommand(1);

    SimArgs sim;
    auto* sim_cmd = app.add_subcommand("sim", "simulate a network over a spike schedule");
    sim_cmd->add_option("--network", sim.network, "network document")->required();
    sim_cmd->add_option("--schedule", sim.schedule, "spike schedule file")->required();
    sim_cmd->add_option("--horizon", sim.horizon, "last simulated timestep")->required();
    sim_cmd->add_flag("--all-neurons", sim.all_neurons, "record every neuron, not just outputs");
    sim_cmd->add_option("--engine", sim.engine, "engine: ref or event (default event)")
        ->check(CLI::IsMember({"ref", "event"}));
    sim_cmd->add_option("--out", sim.out, "write raster here instead of stdout");

    SimplifyArgs simp;
    auto* simp_cmd = app.add_subcommand("simplify", "run simplification passes with an equivalence check");
    simp_cmd->add_option("--network", simp.network, "network document")->required();
    simp_cmd->add_option("--out", simp.out, "output network document")->required();
    simp_cmd->add_option("--passes", simp.passes, "comma list: normalize,passthrough,prune");
    simp_cmd->add_option("--trials", simp.trials, "equivalence trials (default 100)");
    simp_cmd->add_option("--horizon", simp.horizon, "equivalence horizon (default 200)");
    simp_cmd->add_option("--seed", simp.seed, "equivalence seed (default 1)");
    simp_cmd->add_option("--prob", simp.prob, "per-timestep input spike probability");

    std::string viz_network, viz_out;
    auto* viz_cmd = app.add_subcommand("viz", "export a network as a dot graph");
    viz_cmd->add_option("--network", viz_network, "network document")->required();
    viz_cmd->add_option("--out", viz_out, "write dot text here instead of stdout");

    std::string gate_kind, gate_out;
    auto* gates_cmd = app.add_subcommand("gates", "emit a hand-built logic gate network");
    gates_cmd->add_option("--kind", gate_kind, "and, or, xor")
        ->required()
        ->check(CLI::IsMember({"and", "or", "xor"}));
    gates_cmd->add_option("--out", gate_out, "write network here instead of stdout");

    std::int64_t cmp_t = 4;
    std::string cmp_tie = "none", cmp_out;
    auto* cmp_cmd = app.add_subcommand("comparator", "emit the spike-count comparator network");
    cmp_cmd->add_option("--t", cmp_t, "interval length in timesteps (>= 1)")->required();
    cmp_cmd->add_option("--tie-break", cmp_tie, "none, favor-x, favor-y")
        ->check(CLI::IsMember({"none", "favor-x", "favor-y"}));
    cmp_cmd->add_option("--out", cmp_out, "write network here instead of stdout");

    EpisodeArgs ep;
    auto* ep_cmd = app.add_subcommand("episode", "run one closed-loop cart-pole episode");
    ep_cmd->add_option("--network", ep.network, "network document")->required();
    ep_cmd->add_option("--x", ep.x, "start cart position");
    ep_cmd->add_option("--dx", ep.dx, "start cart velocity");
    ep_cmd->add_option("--theta", ep.theta, "start pole angle (rad)");
    ep_cmd->add_option("--dtheta", ep.dtheta, "start pole angular velocity");
    ep_cmd->add_option("--max-intervals", ep.max_intervals, "interval cap (default 15000)");
    ep_cmd->add_option("--steps-per-interval", ep.steps_per_interval, "engine timesteps per interval");
    ep_cmd->add_option("--dt", ep.dt, "control interval seconds");
    ep_cmd->add_flag("--reset-engine", ep.reset_engine, "reset engine state between intervals");
    ep_cmd->add_option("--trace", ep.trace, "write per-interval CSV trace here");

    TrainArgs tr;
    auto* tr_cmd = app.add_subcommand("train", "evolve a cart-pole controller");
    tr_cmd->add_option("--variant", tr.variant, "risp-a, risp-d, risp-a-l, risp-d-l")->required();
    tr_cmd->add_option("--population", tr.population, "population size (default 100)");
    tr_cmd->add_option("--epochs", tr.epochs, "epoch budget (default 150)");
    tr_cmd->add_option("--episodes", tr.episodes, "training episodes per evaluation (default 10)");
    tr_cmd->add_option("--seed", tr.seed, "run seed");
    tr_cmd->add_option("--threads", tr.threads, "evaluation worker count (default: machine)");
    tr_cmd->add_option("--max-hidden", tr.max_hidden, "hidden neuron cap (default 8)");
    tr_cmd->add_flag("--paper-scale", tr.paper_scale, "population 500, 100 epochs");
    tr_cmd->add_option("--out-network", tr.out_network, "write the best network document here");
    tr_cmd->add_option("--out-history", tr.out_history, "write per-epoch history CSV here");

    TestArgs ts;
    auto* ts_cmd = app.add_subcommand("test", "measure generalization of a trained network");
    ts_cmd->add_option("--network", ts.network, "network document")->required();
    ts_cmd->add_option("--tests", ts.tests, "number of test episodes (default 100)");
    ts_cmd->add_option("--seed", ts.seed, "start-state seed");

    BenchArgs bn;
    auto* bn_cmd = app.add_subcommand("bench", "measure simulation throughput");
    bn_cmd->add_option("--network", bn.network, "network document")->required();
    bn_cmd->add_option("--horizon", bn.horizon, "timesteps per run (default 10000)");
    bn_cmd->add_option("--engine", bn.engine, "ref, event, both (default both)")
        ->check(CLI::IsMember({"ref", "event", "both"}));
    bn_cmd->add_option("--repetitions", bn.repetitions, "timing repetitions (default 5)");
    bn_cmd->add_option("--seed", bn.seed, "workload seed");
    bn_cmd->add_option("--prob", bn.prob, "per-timestep input spike probability");
    bn_cmd->add_option("--csv", bn.csv, "write the report as CSV here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sim_cmd->parsed()) return run_sim(sim);
        if (simp_cmd->parsed()) return run_simplify(simp);
        if (viz_cmd->parsed()) {
            emit(viz_out, risp::to_dot(load_network(viz_network)));
            return 0;
        }
        if (gates_cmd->parsed()) {
            const risp::GateKind kind = gate_kind == "and"  ? risp::GateKind::And
                                        : gate_kind == "or" ? risp::GateKind::Or
                                                            : risp::GateKind::Xor;
            const risp::GateInfo info = risp::build_gate(kind);
            emit(gate_out, risp::write_network(info.network));
            std::cerr << fmt::format("latency: {}\n", info.latency);
            return 0;
        }
        if (cmp_cmd->parsed()) {
            risp::ComparatorSpec spec;
            spec.interval = cmp_t;
            spec.tie_break = cmp_tie == "favor-x"   ? risp::TieBreak::FavorX
                             : cmp_tie == "favor-y" ? risp::TieBreak::FavorY
                                                    : risp::TieBreak::None;
            const risp::ComparatorInfo info = risp::build_comparator(spec);
            emit(cmp_out, risp::write_network(info.network));
            std::cerr << fmt::format("bias: {}\noutput_time: {}\nneurons: {}\n", info.bias,
                                     info.output_time, info.network.size());
            return 0;
        }
        if (ep_cmd->parsed()) {
            const risp::Network net = load_network(ep.network);
            risp::EpisodeConfig config;
            config.max_intervals = ep.max_intervals;
            config.steps_per_interval = ep.steps_per_interval;
            config.dt = ep.dt;
            config.reset_engine_between_intervals = ep.reset_engine;
            std::vector<risp::IntervalTrace> trace;
            const int survived =
                risp::run_episode(net, {ep.x, ep.dx, ep.theta, ep.dtheta}, config, {},
                                  ep.trace.empty() ? nullptr : &trace);
            if (!ep.trace.empty()) {
                std::string csv = "interval,x,theta,action,l_count,r_count\n";
                for (const auto& t : trace)
                    csv += fmt::format("{},{},{},{},{},{}\n", t.interval, t.x, t.theta,
                                       risp::action_name(t.action), t.l_count, t.r_count);
                write_file(ep.trace, csv);
            }
            std::cout << fmt::format("intervals {}\nseconds {}\n", survived,
                                     static_cast<double>(survived) * config.dt);
            return 0;
        }
        if (tr_cmd->parsed()) return run_train(tr, tr_cmd);
        if (ts_cmd->parsed()) {
            const risp::Network net = load_network(ts.network);
            const double seconds = risp::test_generalization(net, ts.tests, ts.seed, {});
            std::cout << fmt::format("mean_seconds {}\n", seconds);
            return 0;
        }
        if (bn_cmd->parsed()) return run_bench(bn);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
