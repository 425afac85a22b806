#pragma once

// CSV persistence for traces: first column t, then one column per channel.
// Values are written with 17 significant digits so a read-back reproduces
// every sample bit-exactly.

#include <string>

#include "ftsim/integrate.hpp"

namespace ftsim {

// Refuses (std::invalid_argument) an empty trace. I/O failures surface as
// std::runtime_error with the underlying message.
void export_csv(const SimTrace& trace, const std::string& path);

SimTrace read_csv(const std::string& path);

}  // namespace ftsim
