#include "risp/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <fmt/format.h>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace risp {

ValueMode VariantConfig::mode() const {
    switch (variant) {
        case Variant::RispA:
        case Variant::RispAL: return ValueMode::analog();
        case Variant::RispD:
        case Variant::RispDL: return ValueMode::discrete();
    }
    return ValueMode::analog();
}

bool VariantConfig::forced_leak() const {
    return variant == Variant::RispAL || variant == Variant::RispDL;
}

const char* VariantConfig::name() const {
    switch (variant) {
        case Variant::RispA: return "risp-a";
        case Variant::RispD: return "risp-d";
        case Variant::RispAL: return "risp-a-l";
        case Variant::RispDL: return "risp-d-l";
    }
    return "unknown";
}

VariantConfig VariantConfig::parse(std::string_view name) {
    if (name == "risp-a") return {Variant::RispA};
    if (name == "risp-d") return {Variant::RispD};
    if (name == "risp-a-l") return {Variant::RispAL};
    if (name == "risp-d-l") return {Variant::RispDL};
    throw SpecError(fmt::format("unknown variant '{}'", name));
}

namespace {

double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform_in(std::mt19937_64& rng, double lo, double hi) {
    return lo + unit_double(rng) * (hi - lo);
}

std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

double gaussian(std::mt19937_64& rng, double sigma) {
    const double u1 = std::max(unit_double(rng), 0x1.0p-60);
    const double u2 = unit_double(rng);
    return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

double random_value(std::mt19937_64& rng, const ValueMode& mode, const ValueRange& range) {
    if (mode.kind == ValueKind::Discrete)
        return static_cast<double>(
            uniform_int(rng, static_cast<std::int64_t>(range.lo),
                        static_cast<std::int64_t>(range.hi)));
    return uniform_in(rng, range.lo, range.hi);
}

double perturb_value(std::mt19937_64& rng, double value, const ValueMode& mode,
                     const ValueRange& range) {
    double next = value;
    if (mode.kind == ValueKind::Discrete) {
        std::int64_t delta = uniform_int(rng, -2, 2);
        if (delta == 0) delta = 1;
        next = value + static_cast<double>(delta);
    } else {
        next = value + gaussian(rng, 0.15 * (range.hi - range.lo));
    }
    return std::clamp(next, range.lo, range.hi);
}

std::vector<NeuronId> hidden_ids(const Genome& g) {
    std::vector<NeuronId> ids;
    for (NeuronId i = 0; i < g.size(); ++i)
        if (!g.is_input(i) && !g.is_output(i)) ids.push_back(i);
    return ids;
}

Genome drop_neuron(const Genome& g, NeuronId victim) {
    Genome out;
    out.mode = g.mode;
    std::vector<NeuronId> remap(g.size(), 0);
    for (NeuronId i = 0; i < g.size(); ++i) {
        if (i == victim) continue;
        remap[i] = static_cast<NeuronId>(out.neurons.size());
        out.neurons.push_back(g.neurons[i]);
        out.thresholds.push_back(g.thresholds[i]);
        out.leaks.push_back(g.leaks[i]);
    }
    for (std::size_t s = 0; s < g.synapses.size(); ++s) {
        const auto [from, to] = g.synapses[s];
        if (from == victim || to == victim) continue;
        out.synapses.emplace_back(remap[from], remap[to]);
        out.weights.push_back(g.weights[s]);
        out.delays.push_back(g.delays[s]);
    }
    for (NeuronId id : g.inputs) out.inputs.push_back(remap[id]);
    for (NeuronId id : g.outputs) out.outputs.push_back(remap[id]);
    return out;
}

std::string fresh_hidden_name(const Genome& g) {
    int max_id = 0;
    for (const std::string& name : g.neurons)
        if (name.size() > 1 && name[0] == 'H') {
            int v = 0;
            bool numeric = true;
            for (std::size_t i = 1; i < name.size(); ++i) {
                if (name[i] < '0' || name[i] > '9') {
                    numeric = false;
                    break;
                }
                v = v * 10 + (name[i] - '0');
            }
            if (numeric) max_id = std::max(max_id, v);
        }
    return fmt::format("H{}", max_id + 1);
}

void add_random_synapse(Genome& g, std::mt19937_64& rng, const EvolutionConfig& cfg) {
    const NeuronId from = static_cast<NeuronId>(uniform_int(rng, 0, g.size() - 1));
    const NeuronId to = static_cast<NeuronId>(uniform_int(rng, 0, g.size() - 1));
    g.synapses.emplace_back(from, to);
    g.weights.push_back(random_value(rng, g.mode, g.mode.weights));
    g.delays.push_back(static_cast<std::uint32_t>(uniform_int(rng, 1, cfg.max_delay)));
}

}  // namespace

Genome seed_genome(const VariantConfig& variant) {
    NetworkSpec spec;
    spec.mode = variant.mode();
    const bool leak = variant.forced_leak();
    // analog outputs use a half-unit threshold so a single mid-range synapse
    // can already drive them; discrete values make 1 the natural floor
    const double out_threshold = spec.mode.kind == ValueKind::Analog ? 0.5 : 1.0;
    for (const char* name : cart_input_names) {
        spec.neurons.push_back({name, 1.0, leak});
        spec.inputs.push_back(name);
    }
    for (const char* name : cart_output_names) {
        spec.neurons.push_back({name, out_threshold, leak});
        spec.outputs.push_back(name);
    }
    return build_network(spec);
}

std::vector<CartPoleState> draw_starts(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<CartPoleState> starts;
    starts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        CartPoleState s;
        s.x = uniform_in(rng, -0.5, 0.5);
        s.dx = uniform_in(rng, -0.25, 0.25);
        s.theta = uniform_in(rng, -0.05235987755982988, 0.05235987755982988);  // 3 degrees
        s.dtheta = uniform_in(rng, -0.25, 0.25);
        starts.push_back(s);
    }
    return starts;
}

FitnessRecord evaluate(const Genome& genome, std::span<const CartPoleState> starts,
                       const EvolutionConfig& config) {
    FitnessRecord record;
    for (const CartPoleState& start : starts) {
        const int survived = run_episode(genome, start, config.episode, config.ranges);
        record.per_episode.push_back(survived);
        record.total += survived;
    }
    return record;
}

Genome mutate(const Genome& genome, std::mt19937_64& rng, const VariantConfig& variant,
              const EvolutionConfig& config) {
    Genome g = genome;
    const ValueMode mode = g.mode;

    // destructive and value-level operators run before additive ones, so a
    // freshly added element is never destroyed within the same call and the
    // empty genome can only grow
    int applied = 0;
    for (int attempt = 0; attempt < 32 && applied == 0; ++attempt) {
        if (unit_double(rng) < config.rates.perturb_value) {
            const auto hidden = hidden_ids(g);
            const std::size_t slots = g.synapses.size() + hidden.size();
            if (slots > 0) {
                const std::size_t pick = static_cast<std::size_t>(
                    uniform_int(rng, 0, static_cast<std::int64_t>(slots) - 1));
                if (pick < g.synapses.size()) {
                    g.weights[pick] = perturb_value(rng, g.weights[pick], mode, mode.weights);
                } else {
                    const NeuronId n = hidden[pick - g.synapses.size()];
                    g.thresholds[n] = perturb_value(rng, g.thresholds[n], mode, mode.thresholds);
                }
                ++applied;
            }
        }
        if (unit_double(rng) < config.rates.delete_synapse && !g.synapses.empty()) {
            const std::size_t victim = static_cast<std::size_t>(
                uniform_int(rng, 0, static_cast<std::int64_t>(g.synapses.size()) - 1));
            g.synapses.erase(g.synapses.begin() + static_cast<std::ptrdiff_t>(victim));
            g.weights.erase(g.weights.begin() + static_cast<std::ptrdiff_t>(victim));
            g.delays.erase(g.delays.begin() + static_cast<std::ptrdiff_t>(victim));
            ++applied;
        }
        if (unit_double(rng) < config.rates.delete_neuron) {
            const auto hidden = hidden_ids(g);
            if (!hidden.empty()) {
                g = drop_neuron(g, hidden[static_cast<std::size_t>(uniform_int(
                                       rng, 0, static_cast<std::int64_t>(hidden.size()) - 1))]);
                ++applied;
            }
        }
        if (unit_double(rng) < config.rates.add_neuron &&
            hidden_ids(g).size() < static_cast<std::size_t>(config.max_hidden)) {
            // new hidden neurons arrive wired: one incoming, one outgoing
            const std::string name = fresh_hidden_name(g);
            const NeuronId id = static_cast<NeuronId>(g.size());
            g.neurons.push_back(name);
            g.thresholds.push_back(random_value(rng, mode, mode.thresholds));
            g.leaks.push_back(variant.forced_leak() ? 1 : 0);
            const NeuronId src = static_cast<NeuronId>(uniform_int(rng, 0, id - 1));
            const NeuronId dst = static_cast<NeuronId>(uniform_int(rng, 0, id - 1));
            g.synapses.emplace_back(src, id);
            g.weights.push_back(random_value(rng, mode, mode.weights));
            g.delays.push_back(static_cast<std::uint32_t>(uniform_int(rng, 1, config.max_delay)));
            g.synapses.emplace_back(id, dst);
            g.weights.push_back(random_value(rng, mode, mode.weights));
            g.delays.push_back(static_cast<std::uint32_t>(uniform_int(rng, 1, config.max_delay)));
            ++applied;
        }
        if (unit_double(rng) < config.rates.add_synapse) {
            add_random_synapse(g, rng, config);
            ++applied;
        }
    }
    return g;
}

Genome crossover(const Genome& a, const Genome& b, std::mt19937_64& rng) {
    auto coin = [&] { return (rng() & 1) != 0; };

    // hidden neurons: a's in order, then b's extras in order
    struct HiddenPick {
        std::string name;
        double threshold;
        std::uint8_t leak;
    };
    std::vector<HiddenPick> picked;
    std::vector<std::string> a_hidden_names;
    for (NeuronId i = 0; i < a.size(); ++i) {
        if (a.is_input(i) || a.is_output(i)) continue;
        a_hidden_names.push_back(a.neurons[i]);
        const auto in_b = b.index_of(a.neurons[i]);
        if (in_b) {
            if (coin())
                picked.push_back({a.neurons[i], a.thresholds[i], a.leaks[i]});
            else
                picked.push_back({a.neurons[i], b.thresholds[*in_b], b.leaks[*in_b]});
        } else if (coin()) {
            picked.push_back({a.neurons[i], a.thresholds[i], a.leaks[i]});
        }
    }
    for (NeuronId i = 0; i < b.size(); ++i) {
        if (b.is_input(i) || b.is_output(i)) continue;
        if (std::find(a_hidden_names.begin(), a_hidden_names.end(), b.neurons[i]) !=
            a_hidden_names.end())
            continue;
        if (coin()) picked.push_back({b.neurons[i], b.thresholds[i], b.leaks[i]});
    }

    NetworkSpec spec;
    spec.mode = a.mode;
    for (const char* name : cart_input_names) {
        const NeuronId id = *a.index_of(name);
        spec.neurons.push_back({name, a.thresholds[id], a.leaks[id] != 0});
        spec.inputs.push_back(name);
    }
    for (const char* name : cart_output_names) {
        const NeuronId id = *a.index_of(name);
        spec.neurons.push_back({name, a.thresholds[id], a.leaks[id] != 0});
        spec.outputs.push_back(name);
    }
    for (const HiddenPick& h : picked) spec.neurons.push_back({h.name, h.threshold, h.leak != 0});

    auto has_neuron = [&](const std::string& name) {
        return std::any_of(spec.neurons.begin(), spec.neurons.end(),
                           [&](const NeuronSpec& n) { return n.name == name; });
    };

    // synapses aligned positionally per (from, to) pair
    using Key = std::pair<std::string, std::string>;
    std::map<Key, std::vector<std::size_t>> b_by_key;
    for (std::size_t s = 0; s < b.synapses.size(); ++s)
        b_by_key[{b.neurons[b.synapses[s].first], b.neurons[b.synapses[s].second]}].push_back(s);

    std::map<Key, std::size_t> matched;
    for (std::size_t s = 0; s < a.synapses.size(); ++s) {
        const Key key{a.neurons[a.synapses[s].first], a.neurons[a.synapses[s].second]};
        const std::size_t position = matched[key]++;
        const auto it = b_by_key.find(key);
        double weight = a.weights[s];
        std::uint32_t delay = a.delays[s];
        bool include = true;
        if (it != b_by_key.end() && position < it->second.size()) {
            if (!coin()) {
                weight = b.weights[it->second[position]];
                delay = b.delays[it->second[position]];
            }
        } else {
            include = coin();
        }
        if (include && has_neuron(key.first) && has_neuron(key.second))
            spec.synapses.push_back({key.first, key.second, weight,
                                     static_cast<std::int64_t>(delay)});
    }
    for (const auto& [key, indices] : b_by_key) {
        const std::size_t already = matched.count(key) ? matched[key] : 0;
        for (std::size_t p = already; p < indices.size(); ++p) {
            if (!coin()) continue;
            if (!has_neuron(key.first) || !has_neuron(key.second)) continue;
            spec.synapses.push_back({key.first, key.second, b.weights[indices[p]],
                                     static_cast<std::int64_t>(b.delays[indices[p]])});
        }
    }

    return build_network(spec);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

int effective_threads(int configured) {
#ifdef _OPENMP
    return configured > 0 ? configured : omp_get_max_threads();
#else
    (void)configured;
    return 1;
#endif
}

}  // namespace

EvolveResult evolve(const VariantConfig& variant, const EvolutionConfig& config) {
    if (config.population < 2) throw SpecError("population must be >= 2");
    if (config.episodes_per_eval < 1) throw SpecError("episodes_per_eval must be >= 1");
    if (config.epochs < 1) throw SpecError("epochs must be >= 1");

    std::mt19937_64 rng(config.seed);
    const auto starts =
        draw_starts(config.episodes_per_eval, splitmix64(config.seed ^ 0x7261697374617274ull));

    std::vector<Genome> population;
    population.reserve(static_cast<std::size_t>(config.population));
    for (int i = 0; i < config.population; ++i) {
        Genome g = seed_genome(variant);
        for (int k = 0; k < config.initial_mutations; ++k) g = mutate(g, rng, variant, config);
        population.push_back(std::move(g));
    }

    const std::int64_t perfect =
        static_cast<std::int64_t>(config.episodes_per_eval) * config.episode.max_intervals;
    std::vector<std::int64_t> fitness(population.size(), -1);
    const int threads = effective_threads(config.threads);

    EvolveResult result;
    result.perfect_fitness = perfect;
    result.training_starts = starts;
    std::int64_t total_evaluations = 0;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::int64_t evaluated_now = 0;
#pragma omp parallel for schedule(dynamic) num_threads(threads) reduction(+ : evaluated_now)
        for (std::size_t i = 0; i < population.size(); ++i) {
            if (fitness[i] >= 0) continue;  // elites keep their score
            fitness[i] = evaluate(population[i], starts, config).total;
            ++evaluated_now;
        }
        total_evaluations += evaluated_now;

        std::vector<std::size_t> order(population.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t l, std::size_t r) { return fitness[l] > fitness[r]; });

        const std::int64_t best = fitness[order[0]];
        const double mean =
            static_cast<double>(std::accumulate(fitness.begin(), fitness.end(), std::int64_t{0})) /
            static_cast<double>(population.size());
        result.history.push_back({epoch, best, mean, total_evaluations});

        if (best >= perfect && !result.epochs_to_perfect) {
            result.epochs_to_perfect = epoch + 1;
            result.best = population[order[0]];
            result.best_fitness = best;
            return result;
        }
        if (epoch == config.epochs - 1) {
            result.best = population[order[0]];
            result.best_fitness = best;
            return result;
        }

        auto tournament = [&]() -> std::size_t {
            std::size_t winner = static_cast<std::size_t>(
                uniform_int(rng, 0, static_cast<std::int64_t>(population.size()) - 1));
            for (int k = 1; k < config.tournament; ++k) {
                const std::size_t challenger = static_cast<std::size_t>(
                    uniform_int(rng, 0, static_cast<std::int64_t>(population.size()) - 1));
                if (fitness[challenger] > fitness[winner] ||
                    (fitness[challenger] == fitness[winner] && challenger < winner))
                    winner = challenger;
            }
            return winner;
        };

        std::vector<Genome> next;
        std::vector<std::int64_t> next_fitness;
        next.reserve(population.size());
        const int elites = std::min<int>(config.elitism, static_cast<int>(population.size()));
        for (int e = 0; e < elites; ++e) {
            next.push_back(population[order[static_cast<std::size_t>(e)]]);
            next_fitness.push_back(fitness[order[static_cast<std::size_t>(e)]]);
        }
        const std::size_t immigrants = static_cast<std::size_t>(
            std::clamp<int>(config.immigrants, 0, static_cast<int>(population.size()) - elites));
        while (next.size() < population.size() - immigrants) {
            const std::size_t p1 = tournament();
            Genome child = population[p1];
            if (unit_double(rng) < config.crossover_prob) {
                const std::size_t p2 = tournament();
                child = crossover(population[p1], population[p2], rng);
            }
            child = mutate(child, rng, variant, config);
            next.push_back(std::move(child));
            next_fitness.push_back(-1);
        }
        while (next.size() < population.size()) {
            Genome g = seed_genome(variant);
            for (int k = 0; k < config.initial_mutations; ++k) g = mutate(g, rng, variant, config);
            next.push_back(std::move(g));
            next_fitness.push_back(-1);
        }
        population = std::move(next);
        fitness = std::move(next_fitness);
    }

    return result;  // not reached; loop returns on the last epoch
}

double test_generalization(const Genome& genome, int n_tests, std::uint64_t seed,
                           const EvolutionConfig& config) {
    const auto starts = draw_starts(n_tests, seed);
    std::vector<int> survived(starts.size(), 0);
    const int threads = effective_threads(config.threads);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::size_t i = 0; i < starts.size(); ++i)
        survived[i] = run_episode(genome, starts[i], config.episode, config.ranges);

    double total_seconds = 0.0;
    for (int s : survived) total_seconds += static_cast<double>(s) * config.episode.dt;
    return total_seconds / static_cast<double>(starts.size());
}

}  // namespace risp
