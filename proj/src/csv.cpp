#include "fieldcirc/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "fieldcirc/errors.hpp"

namespace fieldcirc {

std::string format_trace_csv(const TraceTable& table) {
    if (table.values.rows() != table.t.size() ||
        table.values.cols() != static_cast<Eigen::Index>(table.labels.size())) {
        throw std::invalid_argument("trace table: inconsistent shape");
    }
    std::ostringstream out;
    out << "t";
    for (const auto& label : table.labels) out << "," << label;
    out << "\n";
    char buf[48];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        out << buf;
    };
    for (int r = 0; r < table.t.size(); ++r) {
        put(table.t(r));
        for (int c = 0; c < table.values.cols(); ++c) {
            out << ",";
            put(table.values(r, c));
        }
        out << "\n";
    }
    return out.str();
}

void write_trace_csv(const std::string& path, const TraceTable& table) {
    std::ofstream f(path);
    if (!f) throw ParseError("cannot write CSV file: " + path);
    f << format_trace_csv(table);
    if (!f) throw ParseError("CSV write failed: " + path);
}

TraceTable read_trace_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open CSV file: " + path);
    std::string line;
    if (!std::getline(f, line)) throw ParseError("empty CSV file: " + path);

    TraceTable table;
    {
        std::istringstream hs(line);
        std::string cell;
        bool first = true;
        while (std::getline(hs, cell, ',')) {
            if (first) {
                if (cell != "t") throw ParseError("CSV header must start with 't'");
                first = false;
            } else {
                table.labels.push_back(cell);
            }
        }
        if (first) throw ParseError("CSV header must start with 't'");
    }

    std::vector<std::vector<double>> rows;
    int lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ParseError("bad CSV value '" + cell + "'", lineno);
            }
        }
        if (row.size() != table.labels.size() + 1) {
            throw ParseError("CSV row has wrong column count", lineno);
        }
        rows.push_back(std::move(row));
    }

    table.t.resize(static_cast<Eigen::Index>(rows.size()));
    table.values.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(table.labels.size()));
    for (size_t r = 0; r < rows.size(); ++r) {
        table.t(static_cast<Eigen::Index>(r)) = rows[r][0];
        for (size_t c = 0; c + 1 < rows[r].size(); ++c) {
            table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c + 1];
        }
    }
    return table;
}

} // namespace fieldcirc
