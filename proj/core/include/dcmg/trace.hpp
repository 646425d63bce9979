#pragma once

#include "dcmg/engine.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace dcmg {

/// Shortest text that reads back to the same double; "nan" for NaN.
std::string format_number(double v);

std::vector<std::string> trace_columns(const TraceSchema& schema);

/// One CSV row per record. Links absent at a step are written as nan.
void write_trace_header(std::ostream& out, const TraceSchema& schema);
void write_trace_row(std::ostream& out, const StepRecord& record);
void write_trace_csv(std::ostream& out, const TraceSchema& schema, const std::vector<StepRecord>& records);

/// Key-value document with final sharing errors, residual maxima and alarm times.
void write_summary(std::ostream& out, const RunSummary& summary);

}  // namespace dcmg
