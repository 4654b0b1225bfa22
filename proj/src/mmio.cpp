#include "fieldcirc/mmio.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "fieldcirc/errors.hpp"

namespace fieldcirc {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

} // namespace

Eigen::SparseMatrix<double> read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open matrix file: " + path);

    std::string header;
    if (!std::getline(in, header)) throw ModelError("empty matrix file: " + path);
    std::istringstream hs(lower(header));
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%matrixmarket" || object != "matrix" || format != "coordinate" ||
        field != "real") {
        throw ModelError("unsupported MatrixMarket header in " + path + ": " + header);
    }
    bool symmetric = (symmetry == "symmetric");
    if (!symmetric && symmetry != "general") {
        throw ModelError("unsupported MatrixMarket symmetry in " + path + ": " + symmetry);
    }

    std::string line;
    long rows = -1, cols = -1, nnz = -1;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '%') continue;
        std::istringstream ls(line);
        if (!(ls >> rows >> cols >> nnz)) {
            throw ModelError("bad size line in " + path + ": " + line);
        }
        break;
    }
    if (rows < 0) throw ModelError("missing size line in " + path);

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<size_t>(symmetric ? 2 * nnz : nnz));
    long count = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '%') continue;
        std::istringstream ls(line);
        long i, j;
        double v;
        if (!(ls >> i >> j >> v)) throw ModelError("bad entry in " + path + ": " + line);
        if (i < 1 || i > rows || j < 1 || j > cols) {
            throw ModelError("entry out of range in " + path + ": " + line);
        }
        trips.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1), v);
        if (symmetric && i != j) {
            trips.emplace_back(static_cast<int>(j - 1), static_cast<int>(i - 1), v);
        }
        ++count;
    }
    if (count != nnz) throw ModelError("entry count mismatch in " + path);

    Eigen::SparseMatrix<double> m(static_cast<int>(rows), static_cast<int>(cols));
    m.setFromTriplets(trips.begin(), trips.end());
    m.makeCompressed();
    return m;
}

void write_matrix_market(const std::string& path, const Eigen::SparseMatrix<double>& m) {
    std::ofstream out(path);
    if (!out) throw ModelError("cannot write matrix file: " + path);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
    char buf[64];
    for (int k = 0; k < m.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
            std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", static_cast<int>(it.row()) + 1,
                          static_cast<int>(it.col()) + 1, it.value());
            out << buf;
        }
    }
    if (!out) throw ModelError("write failed: " + path);
}

void write_matrix_market(const std::string& path, const Eigen::MatrixXd& m) {
    write_matrix_market(path, Eigen::SparseMatrix<double>(m.sparseView()));
}

} // namespace fieldcirc
