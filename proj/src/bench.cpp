#include "risp/bench.hpp"

#include <algorithm>
#include <chrono>
#include <vector>

#include <fmt/format.h>

namespace risp {

const char* engine_kind_name(EngineKind kind) {
    return kind == EngineKind::Reference ? "reference" : "event-driven";
}

BenchReport run_benchmark(const Network& net, const InputModel& input_model, std::int64_t horizon,
                          EngineKind kind, int repetitions, std::uint64_t seed) {
    if (repetitions < 1) throw SpecError("repetitions must be >= 1");
    const SpikeSchedule schedule = random_schedule(net, horizon, input_model, seed);

    BenchReport report;
    report.engine = kind;
    report.neurons = net.size();
    report.synapses = net.synapse_count();
    report.horizon = horizon;
    report.repetitions = repetitions;

    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(repetitions));
    for (int rep = 0; rep < repetitions; ++rep) {
        RunStats stats;
        const auto t0 = std::chrono::steady_clock::now();
        const SpikeRaster raster = kind == EngineKind::Reference
                                       ? run(net, schedule, horizon, RecordMode::OutputsOnly, &stats)
                                       : run_event_driven(net, schedule, horizon,
                                                          RecordMode::OutputsOnly, &stats);
        const auto t1 = std::chrono::steady_clock::now();
        (void)raster;
        report.deliveries = stats.deliveries;
        times.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    std::sort(times.begin(), times.end());
    report.seconds = times[times.size() / 2];
    report.deliveries_per_second =
        report.seconds > 0.0 ? static_cast<double>(report.deliveries) / report.seconds : 0.0;
    return report;
}

std::string format_report(const BenchReport& report) {
    return fmt::format(
        "engine: {}\nneurons: {}\nsynapses: {}\nhorizon: {}\nrepetitions: {}\n"
        "deliveries: {}\nwall seconds (median): {:.6f}\ndeliveries/second: {:.0f}\n",
        engine_kind_name(report.engine), report.neurons, report.synapses, report.horizon,
        report.repetitions, report.deliveries, report.seconds, report.deliveries_per_second);
}

std::string bench_csv_header() {
    return "engine,neurons,synapses,horizon,repetitions,deliveries,seconds,deliveries_per_second\n";
}

std::string bench_csv_row(const BenchReport& r) {
    return fmt::format("{},{},{},{},{},{},{},{}\n", engine_kind_name(r.engine), r.neurons,
                       r.synapses, r.horizon, r.repetitions, r.deliveries, r.seconds,
                       r.deliveries_per_second);
}

}  // namespace risp
