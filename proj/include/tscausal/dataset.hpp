#pragma once

// Observation data model: CSV ingestion, standardization, and construction of
// the time-aligned lagged sample arrays every conditional-independence test
// consumes.

#include <Eigen/Dense>
#include <charconv>
#include <compare>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tscausal/errors.hpp"

namespace tscausal {

struct LaggedVariable {
    int var_index = 0;
    int lag = 0;
    friend auto operator<=>(const LaggedVariable&, const LaggedVariable&) = default;
};

class TimeSeriesDataset {
public:
    TimeSeriesDataset(Eigen::MatrixXd values, std::vector<std::string> names)
        : values_(std::move(values)), names_(std::move(names)) {
        if (static_cast<Eigen::Index>(names_.size()) != values_.cols())
            throw contract_error("TimeSeriesDataset: name count != column count");
    }

    int T() const { return static_cast<int>(values_.rows()); }
    int N() const { return static_cast<int>(values_.cols()); }
    const Eigen::MatrixXd& values() const { return values_; }
    const std::vector<std::string>& names() const { return names_; }

    // zero mean / unit sample sd per column, in place
    void standardize() {
        for (Eigen::Index c = 0; c < values_.cols(); ++c) {
            Eigen::VectorXd col = values_.col(c);
            const double m = col.mean();
            const double sd =
                col.size() > 1
                    ? std::sqrt((col.array() - m).square().sum() / double(col.size() - 1))
                    : 0.0;
            if (!(sd > 0.0) || !std::isfinite(sd))
                throw degenerate_data_error("standardize: column '" + names_[size_t(c)] +
                                            "' has zero variance");
            values_.col(c) = (col.array() - m) / sd;
        }
    }

private:
    Eigen::MatrixXd values_;
    std::vector<std::string> names_;
};

namespace detail {

inline double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
    // row/col are 1-based in messages; row counts the header as row 1
    std::size_t begin = cell.find_first_not_of(" \t\r");
    if (begin == std::string::npos)
        throw missing_data_error("missing cell at row " + std::to_string(row) + ", column " +
                                 std::to_string(col));
    std::size_t end = cell.find_last_not_of(" \t\r");
    const std::string tok = cell.substr(begin, end - begin + 1);
    if (tok == "nan" || tok == "NaN" || tok == "NA")
        throw missing_data_error("missing cell (" + tok + ") at row " + std::to_string(row) +
                                 ", column " + std::to_string(col));
    double out = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last)
        throw parse_error("non-numeric cell '" + tok + "' at row " + std::to_string(row) +
                          ", column " + std::to_string(col));
    return out;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace detail

inline TimeSeriesDataset load_csv(const std::string& path, bool standardize = true) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw parse_error("'" + path + "': empty file");
    std::vector<std::string> names = detail::split_csv_line(line);
    const std::size_t ncols = names.size();
    if (ncols == 0 || (ncols == 1 && names[0].empty()))
        throw parse_error("'" + path + "': empty header row");

    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() && in.peek() == std::ifstream::traits_type::eof()) break;
        std::vector<std::string> cells = detail::split_csv_line(line);
        if (cells.size() != ncols)
            throw missing_data_error("row " + std::to_string(lineno) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(ncols));
        std::vector<double> vals(ncols);
        for (std::size_t c = 0; c < ncols; ++c)
            vals[c] = detail::parse_cell(cells[c], lineno, c + 1);
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw parse_error("'" + path + "': no data rows");

    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(ncols));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < ncols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];

    TimeSeriesDataset ds(std::move(m), std::move(names));
    if (standardize) ds.standardize();
    return ds;
}

// shortest round-trip formatting, so load(write(ds)) is bit-exact
inline void write_csv(const TimeSeriesDataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path + "'");
    for (int c = 0; c < ds.N(); ++c) out << (c ? "," : "") << ds.names()[size_t(c)];
    out << "\n";
    for (int r = 0; r < ds.T(); ++r) {
        for (int c = 0; c < ds.N(); ++c) {
            if (c) out << ',';
            out << detail::format_double(ds.values()(r, c));
        }
        out << "\n";
    }
    if (!out) throw io_error("write failure on '" + path + "'");
}

struct LaggedSampleArrays {
    Eigen::VectorXd x;
    Eigen::VectorXd y;
    Eigen::MatrixXd z;  // n x D_Z
    int n = 0;
};

// One shared window per run: row k corresponds to target time t = tau_max + k.
inline LaggedSampleArrays build_lagged_arrays(const TimeSeriesDataset& ds, LaggedVariable x,
                                              LaggedVariable y,
                                              const std::vector<LaggedVariable>& conds,
                                              int tau_max) {
    auto check = [&](LaggedVariable v) {
        if (v.lag < 0 || v.lag > tau_max)
            throw contract_error("build_lagged_arrays: lag " + std::to_string(v.lag) +
                                 " outside [0, tau_max=" + std::to_string(tau_max) + "]");
        if (v.var_index < 0 || v.var_index >= ds.N())
            throw contract_error("build_lagged_arrays: variable index out of range");
    };
    check(x);
    check(y);
    for (auto c : conds) check(c);

    const int n = ds.T() - tau_max;
    const int dz = static_cast<int>(conds.size());
    if (n <= dz + 2)
        throw insufficient_samples_error("n=" + std::to_string(n) + " samples for D_Z=" +
                                         std::to_string(dz) + " conditions");

    LaggedSampleArrays out;
    out.n = n;
    out.x.resize(n);
    out.y.resize(n);
    out.z.resize(n, dz);
    const auto& v = ds.values();
    for (int k = 0; k < n; ++k) {
        const int t = tau_max + k;
        out.x[k] = v(t - x.lag, x.var_index);
        out.y[k] = v(t - y.lag, y.var_index);
        for (int c = 0; c < dz; ++c) out.z(k, c) = v(t - conds[size_t(c)].lag, conds[size_t(c)].var_index);
    }
    return out;
}

}  // namespace tscausal
