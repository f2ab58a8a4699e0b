#include "risp/io.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace risp {

using ordered_json = nlohmann::ordered_json;

namespace {

std::pair<std::size_t, std::size_t> position_at(std::string_view text, std::size_t byte) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

[[noreturn]] void fail_at(std::string_view text, std::size_t byte, const std::string& msg) {
    auto [line, column] = position_at(text, byte);
    throw ParseError(fmt::format("{} (line {}, column {})", msg, line, column), line, column);
}

void reject_unknown_keys(const ordered_json& obj, std::initializer_list<const char*> allowed,
                         const char* where) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* k) { return key == k; }) == allowed.end())
            throw ParseError(fmt::format("unknown key '{}' in {}", key, where), 0, 0);
    }
}

const ordered_json& require(const ordered_json& obj, const char* key, const char* where) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw ParseError(fmt::format("{} is missing '{}'", where, key), 0, 0);
    return *it;
}

double number_of(const ordered_json& v, const char* what) {
    if (!v.is_number())
        throw ParseError(fmt::format("{} must be a number", what), 0, 0);
    return v.get<double>();
}

ValueRange range_of(const ordered_json& v, const char* what) {
    if (!v.is_array() || v.size() != 2)
        throw ParseError(fmt::format("{} must be a two-element array", what), 0, 0);
    return {number_of(v[0], what), number_of(v[1], what)};
}

}  // namespace

Network read_network(std::string_view text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail_at(text, e.byte > 0 ? e.byte - 1 : 0, "network document is not valid JSON");
    }
    if (!doc.is_object()) throw ParseError("network document must be a JSON object", 1, 1);

    reject_unknown_keys(doc, {"value_mode", "ranges", "neurons", "synapses", "inputs", "outputs"},
                        "network document");

    NetworkSpec spec;
    const auto& mode = require(doc, "value_mode", "network document");
    if (mode == "analog") {
        spec.mode.kind = ValueKind::Analog;
    } else if (mode == "discrete") {
        spec.mode.kind = ValueKind::Discrete;
    } else {
        throw ParseError("value_mode must be \"analog\" or \"discrete\"", 0, 0);
    }

    const auto& ranges = require(doc, "ranges", "network document");
    if (!ranges.is_object()) throw ParseError("'ranges' must be an object", 0, 0);
    reject_unknown_keys(ranges, {"weight", "threshold"}, "ranges");
    spec.mode.weights = range_of(require(ranges, "weight", "ranges"), "weight range");
    spec.mode.thresholds = range_of(require(ranges, "threshold", "ranges"), "threshold range");

    const auto& neurons = require(doc, "neurons", "network document");
    if (!neurons.is_array()) throw ParseError("'neurons' must be an array", 0, 0);
    for (const auto& n : neurons) {
        if (!n.is_object()) throw ParseError("neuron entries must be objects", 0, 0);
        reject_unknown_keys(n, {"id", "threshold", "leak"}, "neuron");
        const auto& id = require(n, "id", "neuron");
        if (!id.is_string()) throw ParseError("neuron 'id' must be a string", 0, 0);
        const auto& leak = require(n, "leak", "neuron");
        if (!leak.is_boolean()) throw ParseError("neuron 'leak' must be a boolean", 0, 0);
        spec.neurons.push_back({id.get<std::string>(),
                                number_of(require(n, "threshold", "neuron"), "neuron 'threshold'"),
                                leak.get<bool>()});
    }

    const auto& synapses = require(doc, "synapses", "network document");
    if (!synapses.is_array()) throw ParseError("'synapses' must be an array", 0, 0);
    for (const auto& s : synapses) {
        if (!s.is_object()) throw ParseError("synapse entries must be objects", 0, 0);
        reject_unknown_keys(s, {"from", "to", "weight", "delay"}, "synapse");
        const auto& from = require(s, "from", "synapse");
        const auto& to = require(s, "to", "synapse");
        if (!from.is_string() || !to.is_string())
            throw ParseError("synapse 'from'/'to' must be strings", 0, 0);
        const auto& delay = require(s, "delay", "synapse");
        if (!delay.is_number_integer())
            throw ParseError("synapse 'delay' must be an integer", 0, 0);
        spec.synapses.push_back({from.get<std::string>(), to.get<std::string>(),
                                 number_of(require(s, "weight", "synapse"), "synapse 'weight'"),
                                 delay.get<std::int64_t>()});
    }

    for (const char* key : {"inputs", "outputs"}) {
        const auto& list = require(doc, key, "network document");
        if (!list.is_array()) throw ParseError(fmt::format("'{}' must be an array", key), 0, 0);
        for (const auto& name : list) {
            if (!name.is_string())
                throw ParseError(fmt::format("'{}' entries must be strings", key), 0, 0);
            auto& dst = key == std::string_view("inputs") ? spec.inputs : spec.outputs;
            dst.push_back(name.get<std::string>());
        }
    }

    return build_network(spec);
}

std::string write_network(const Network& net) {
    ordered_json doc;
    doc["value_mode"] = net.mode.kind == ValueKind::Analog ? "analog" : "discrete";
    doc["ranges"]["weight"] = {net.mode.weights.lo, net.mode.weights.hi};
    doc["ranges"]["threshold"] = {net.mode.thresholds.lo, net.mode.thresholds.hi};

    doc["neurons"] = ordered_json::array();
    for (std::size_t i = 0; i < net.neurons.size(); ++i) {
        ordered_json n;
        n["id"] = net.neurons[i];
        n["threshold"] = net.thresholds[i];
        n["leak"] = net.leaks[i] != 0;
        doc["neurons"].push_back(std::move(n));
    }

    std::vector<std::size_t> order(net.synapses.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto ka = std::tuple(net.synapses[a].first, net.synapses[a].second, net.delays[a],
                                   net.weights[a]);
        const auto kb = std::tuple(net.synapses[b].first, net.synapses[b].second, net.delays[b],
                                   net.weights[b]);
        return ka < kb;
    });
    doc["synapses"] = ordered_json::array();
    for (std::size_t s : order) {
        ordered_json j;
        j["from"] = net.neurons[net.synapses[s].first];
        j["to"] = net.neurons[net.synapses[s].second];
        j["weight"] = net.weights[s];
        j["delay"] = net.delays[s];
        doc["synapses"].push_back(std::move(j));
    }

    doc["inputs"] = ordered_json::array();
    for (NeuronId id : net.inputs) doc["inputs"].push_back(net.neurons[id]);
    doc["outputs"] = ordered_json::array();
    for (NeuronId id : net.outputs) doc["outputs"].push_back(net.neurons[id]);

    return doc.dump(2) + "\n";
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) tokens.push_back(line.substr(start, i - start));
    }
    return tokens;
}

std::int64_t parse_i64(std::string_view tok, std::size_t line_no, const char* what) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
        throw ParseError(fmt::format("line {}: bad {} '{}'", line_no, what, tok), line_no, 1);
    return v;
}

double parse_f64(std::string_view tok, std::size_t line_no, const char* what) {
    double v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
        throw ParseError(fmt::format("line {}: bad {} '{}'", line_no, what, tok), line_no, 1);
    return v;
}

NeuronId resolve_name(const Network& net, std::string_view name, std::size_t line_no) {
    auto id = net.index_of(std::string(name));
    if (!id)
        throw ParseError(fmt::format("line {}: unknown neuron '{}'", line_no, name), line_no, 1);
    return *id;
}

template <typename LineFn>
void for_each_line(std::string_view text, LineFn&& fn) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        ++line_no;
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        fn(text.substr(pos, end - pos), line_no);
        pos = end + 1;
        if (end == text.size()) break;
    }
}

}  // namespace

SpikeSchedule read_schedule(std::string_view text, const Network& net) {
    SpikeSchedule schedule;
    for_each_line(text, [&](std::string_view line, std::size_t line_no) {
        const auto tokens = split_ws(line);
        if (tokens.empty()) return;
        if (tokens[0] != "apply" || tokens.size() != 4)
            throw ParseError(fmt::format("line {}: expected 'apply <neuron> <timestep> <value>'",
                                         line_no),
                             line_no, 1);
        const NeuronId neuron = resolve_name(net, tokens[1], line_no);
        const std::int64_t time = parse_i64(tokens[2], line_no, "timestep");
        const double value = parse_f64(tokens[3], line_no, "value");
        if (!net.is_input(neuron))
            throw ParseError(fmt::format("line {}: '{}' is not an input neuron", line_no,
                                         tokens[1]),
                             line_no, 1);
        if (time < 0)
            throw ParseError(fmt::format("line {}: negative timestep", line_no), line_no, 1);
        schedule.entries.push_back({neuron, time, value});
    });
    return schedule;
}

std::string write_schedule(const SpikeSchedule& schedule, const Network& net) {
    std::string out;
    for (const SpikeEntry& e : schedule.entries)
        out += fmt::format("apply {} {} {}\n", net.neurons[e.neuron], e.time, e.value);
    return out;
}

std::string write_raster(const SpikeRaster& raster, const Network& net) {
    std::string out;
    for (const Fire& f : raster.fires)
        out += fmt::format("fire {} {}\n", net.neurons[f.neuron], f.time);
    return out;
}

SpikeRaster read_raster(std::string_view text, const Network& net) {
    SpikeRaster raster;
    for_each_line(text, [&](std::string_view line, std::size_t line_no) {
        const auto tokens = split_ws(line);
        if (tokens.empty()) return;
        if (tokens[0] != "fire" || tokens.size() != 3)
            throw ParseError(fmt::format("line {}: expected 'fire <neuron> <timestep>'", line_no),
                             line_no, 1);
        const NeuronId neuron = resolve_name(net, tokens[1], line_no);
        raster.fires.push_back({neuron, parse_i64(tokens[2], line_no, "timestep")});
    });
    std::sort(raster.fires.begin(), raster.fires.end(),
              [](const Fire& a, const Fire& b) { return std::tie(a.time, a.neuron) <
                                                        std::tie(b.time, b.neuron); });
    for (const Fire& f : raster.fires) raster.horizon = std::max(raster.horizon, f.time);
    return raster;
}

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

}  // namespace

std::string to_dot(const Network& net) {
    std::string out = "digraph risp {\n  rankdir=LR;\n";
    for (std::size_t i = 0; i < net.neurons.size(); ++i) {
        const auto id = static_cast<NeuronId>(i);
        std::string attrs = fmt::format("label=\"{} / {} / {}\"", dot_escape(net.neurons[i]),
                                        net.thresholds[i], net.leaks[i] ? "leak" : "no-leak");
        if (net.is_input(id)) attrs += " peripheries=2";
        if (net.is_output(id)) attrs += " style=bold penwidth=2";
        out += fmt::format("  \"{}\" [{}];\n", dot_escape(net.neurons[i]), attrs);
    }
    for (std::size_t s = 0; s < net.synapses.size(); ++s) {
        out += fmt::format("  \"{}\" -> \"{}\" [label=\"{}, d={}\"];\n",
                           dot_escape(net.neurons[net.synapses[s].first]),
                           dot_escape(net.neurons[net.synapses[s].second]), net.weights[s],
                           net.delays[s]);
    }
    out += "}\n";
    return out;
}

}  // namespace risp
