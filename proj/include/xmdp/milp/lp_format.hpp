#pragma once

#include "xmdp/milp/model.hpp"

#include <string>

namespace xmdp::milp {

/// Writes the model in CPLEX-style LP format with a fixed section order
/// (Minimize, Subject To, Bounds, Binaries, End). Every variable gets an
/// explicit bounds line in declaration order, which also makes the file
/// self-describing for parse_lp. Deterministic output.
std::string export_lp(const MilpModel& model);

/// Parses LP-format text back into a model. Files produced by export_lp are
/// reproduced exactly (variable order is taken from the Bounds section);
/// variables met only in other sections are appended in first-use order.
MilpModel parse_lp(const std::string& text);

} // namespace xmdp::milp
