#pragma once

#include <cstdint>
#include <string>

#include "risp/engine.hpp"
#include "risp/model.hpp"

namespace risp {

enum class EngineKind { Reference, EventDriven };

const char* engine_kind_name(EngineKind kind);

struct BenchReport {
    EngineKind engine = EngineKind::Reference;
    std::size_t neurons = 0;
    std::size_t synapses = 0;
    std::int64_t horizon = 0;
    int repetitions = 0;
    std::uint64_t deliveries = 0;  // identical across engines for one workload
    double seconds = 0.0;          // median over repetitions
    double deliveries_per_second = 0.0;
};

// Times one engine over a seeded random workload; repetitions run
// sequentially and the median wall time is reported. Throughput is
// synaptic+external deliveries per second, an engine-independent count.
BenchReport run_benchmark(const Network& net, const InputModel& input_model, std::int64_t horizon,
                          EngineKind kind, int repetitions, std::uint64_t seed);

std::string format_report(const BenchReport& report);

std::string bench_csv_header();
std::string bench_csv_row(const BenchReport& report);

}  // namespace risp
