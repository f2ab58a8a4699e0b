#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "risp/engine.hpp"
#include "risp/model.hpp"

namespace risp {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t line, std::size_t column)
        : std::runtime_error(msg), line_(line), column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

// Network document: a JSON object with keys value_mode, ranges, neurons,
// synapses, inputs, outputs. Unknown keys are rejected. Writing is
// canonical (fixed key order, synapses sorted), so equal networks produce
// byte-identical text, and numbers round-trip exactly.
Network read_network(std::string_view text);
std::string write_network(const Network& net);

// Schedule lines: "apply <neuron> <timestep> <value>".
SpikeSchedule read_schedule(std::string_view text, const Network& net);
std::string write_schedule(const SpikeSchedule& schedule, const Network& net);

// Raster lines: "fire <neuron> <timestep>", sorted by (timestep, neuron).
std::string write_raster(const SpikeRaster& raster, const Network& net);
SpikeRaster read_raster(std::string_view text, const Network& net);

// Graphviz export: inputs get a doubled border, outputs a bold one.
std::string to_dot(const Network& net);

}  // namespace risp
