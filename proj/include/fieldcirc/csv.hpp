#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace fieldcirc {

/// Plot-ready trace: a time column plus named value columns.
/// CSV header is `t,<label>,<label>,...`; values are written as plain
/// decimals with 12 significant digits, which is the round-trip contract.
struct TraceTable {
    std::vector<std::string> labels;
    Eigen::VectorXd t;
    Eigen::MatrixXd values; // rows = t.size(), cols = labels.size()
};

std::string format_trace_csv(const TraceTable& table);
void write_trace_csv(const std::string& path, const TraceTable& table);
TraceTable read_trace_csv(const std::string& path);

} // namespace fieldcirc
