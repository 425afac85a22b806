#pragma once

// Minimal arithmetic grammar for time-varying scenario signals (fault
// schedules, disturbances, references): numbers, 't', + - * /, unary minus,
// parentheses, and sin/cos/exp.

#include <functional>
#include <memory>
#include <string>

namespace ftsim {

using TimeFunction = std::function<double(double)>;

// Parses an expression of the single variable t, e.g. "0.2*sin(t)+0.4".
// Throws std::invalid_argument with a column position on malformed input.
TimeFunction parse_time_expr(const std::string& text);

}  // namespace ftsim
