#include "mixsel/simdata.hpp"

#include <cmath>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "mixsel/errors.hpp"

namespace mixsel {

namespace {

Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

Matrix mat2(double a11, double a12, double a21, double a22) {
    Matrix m(2, 2);
    m << a11, a12, a21, a22;
    return m;
}

}  // namespace

DatasetSpec example1_spec(int n, std::uint64_t seed) {
    Vector weights(3);
    weights << 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0;
    std::vector<Component> components{
        {vec2(-1.0, 1.0), mat2(0.65, 0.7794, 0.7794, 1.55)},
        {vec2(1.0, 1.0), mat2(0.65, -0.7794, -0.7794, 1.55)},
        {vec2(0.0, -std::sqrt(2.0)), mat2(2.0, 0.0, 0.0, 0.2)},
    };
    return DatasetSpec{MixtureModel(std::move(weights), std::move(components)), n, seed};
}

DatasetSpec example2_spec(int n, std::uint64_t seed) {
    Vector weights(4);
    weights << 0.3, 0.3, 0.3, 0.1;
    std::vector<Component> components{
        {vec2(-2.0, -2.0), mat2(0.1, 0.0, 0.0, 0.2)},
        {vec2(-2.0, -2.0), mat2(2.0, 2.0, 2.0, 7.0)},
        {vec2(2.0, 0.0), mat2(0.5, 0.0, 0.0, 4.0)},
        {vec2(1.0, -4.0), mat2(0.125, 0.0, 0.0, 0.125)},
    };
    return DatasetSpec{MixtureModel(std::move(weights), std::move(components)), n, seed};
}

DatasetSpec single_gaussian_spec(int n, std::uint64_t seed) {
    Vector weights(1);
    weights << 1.0;
    std::vector<Component> components{{vec2(0.0, 0.0), mat2(2.0, 0.0, 0.0, 0.2)}};
    return DatasetSpec{MixtureModel(std::move(weights), std::move(components)), n, seed};
}

Matrix generate(const DatasetSpec& spec) {
    if (spec.n < 1) throw DimensionMismatch("generate: n must be >= 1");
    Rng rng(spec.seed);
    return sample_mixture(spec.truth, spec.n, rng);
}

namespace {

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || begin == end) {
        throw ParseError(row, col,
                         "row " + std::to_string(row) + ", column " + std::to_string(col) +
                             ": cannot parse '" + cell + "' as a number");
    }
    return value;
}

}  // namespace

Matrix load_csv(std::istream& in, bool has_header, const std::vector<int>& columns) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    bool header_pending = has_header;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (header_pending) {
            header_pending = false;
            continue;
        }
        if (line.empty()) continue;
        std::vector<double> cells;
        std::stringstream ss(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(ss, cell, ',')) {
            ++col;
            cells.push_back(parse_cell(cell, lineno, col));
        }
        if (width == 0) {
            width = cells.size();
        } else if (cells.size() != width) {
            throw ParseError(lineno, cells.size(),
                             "row " + std::to_string(lineno) + " has " +
                                 std::to_string(cells.size()) + " cells, expected " +
                                 std::to_string(width));
        }
        rows.push_back(std::move(cells));
    }
    if (rows.empty()) throw EmptyFile("no data rows");

    std::vector<int> selected = columns;
    if (selected.empty()) {
        selected.resize(width);
        for (std::size_t j = 0; j < width; ++j) selected[j] = static_cast<int>(j);
    }
    for (int j : selected) {
        if (j < 0 || static_cast<std::size_t>(j) >= width) {
            throw ParseError(0, static_cast<std::size_t>(j) + 1,
                             "column index " + std::to_string(j) + " out of range");
        }
    }
    Matrix out(rows.size(), selected.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < selected.size(); ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                rows[i][static_cast<std::size_t>(selected[j])];
        }
    }
    return out;
}

Matrix load_csv(const std::string& path, bool has_header, const std::vector<int>& columns) {
    std::ifstream in(path);
    if (!in) throw EmptyFile("cannot open " + path);
    return load_csv(in, has_header, columns);
}

void save_csv(const Matrix& data, std::ostream& out) {
    out.precision(17);
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        for (Eigen::Index j = 0; j < data.cols(); ++j) {
            if (j > 0) out << ',';
            out << data(i, j);
        }
        out << '\n';
    }
}

void save_csv(const Matrix& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    save_csv(data, out);
}

}  // namespace mixsel
