#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "risp/cartpole.hpp"
#include "risp/model.hpp"

namespace risp {

enum class Variant { RispA, RispD, RispAL, RispDL };

// Processor variant: value mode plus a leak flag forced on every neuron.
struct VariantConfig {
    Variant variant = Variant::RispAL;

    ValueMode mode() const;
    bool forced_leak() const;
    const char* name() const;
    static VariantConfig parse(std::string_view name);
};

struct MutationRates {
    double add_neuron = 0.20;
    double delete_neuron = 0.10;
    double add_synapse = 0.60;
    double delete_synapse = 0.25;
    double perturb_value = 0.70;
};

struct EvolutionConfig {
    int population = 100;
    int epochs = 150;
    int episodes_per_eval = 10;
    std::uint64_t seed = 1;
    int tournament = 3;
    int elitism = 2;
    double crossover_prob = 0.5;
    int max_hidden = 8;
    std::uint32_t max_delay = 15;
    int initial_mutations = 6;
    int immigrants = 5;  // fresh random genomes injected per epoch
    MutationRates rates;
    int threads = 0;  // 0 = machine parallelism
    EpisodeConfig episode;
    ObservationRanges ranges;
};

// A genome is a network whose cart-pole interface neurons are fixed
// (existence, names, threshold 1, variant leak); hidden neurons and all
// synapses evolve.
using Genome = Network;

struct FitnessRecord {
    std::int64_t total = 0;
    std::vector<int> per_episode;
};

Genome seed_genome(const VariantConfig& variant);

std::vector<CartPoleState> draw_starts(int n, std::uint64_t seed);

FitnessRecord evaluate(const Genome& genome, std::span<const CartPoleState> starts,
                       const EvolutionConfig& config);

Genome mutate(const Genome& genome, std::mt19937_64& rng, const VariantConfig& variant,
              const EvolutionConfig& config);

// Interface from either parent; hidden neurons aligned by name and merged
// with per-element coin flips; synapses aligned by (from, to) position.
Genome crossover(const Genome& a, const Genome& b, std::mt19937_64& rng);

struct EpochStats {
    int epoch = 0;
    std::int64_t best = 0;
    double mean = 0.0;
    std::int64_t evaluations = 0;  // cumulative
};

struct EvolveResult {
    Genome best;
    std::int64_t best_fitness = 0;
    std::int64_t perfect_fitness = 0;
    std::vector<EpochStats> history;
    std::optional<int> epochs_to_perfect;
    std::vector<CartPoleState> training_starts;
};

// Tournament selection with elitism; runs until the epoch budget or perfect
// fitness. Fitness evaluations within a generation may run concurrently;
// selection is sequential and seed-driven, so the result is identical
// regardless of evaluation parallelism.
EvolveResult evolve(const VariantConfig& variant, const EvolutionConfig& config);

// Mean survived time in simulated seconds over n fresh seeded starts.
double test_generalization(const Genome& genome, int n_tests, std::uint64_t seed,
                           const EvolutionConfig& config);

}  // namespace risp
