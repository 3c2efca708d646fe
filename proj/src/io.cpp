#include "qireg/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qireg {

namespace {

// strips comments and whitespace; empty result means "skip this line"
std::string clean_line(const std::string& raw) {
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = line.find_last_not_of(" \t\r\n");
    return line.substr(first, last - first + 1);
}

double parse_double(const std::string& token, const std::string& origin, std::size_t lineno) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(token, &pos);
        if (pos != token.size()) throw std::invalid_argument(token);
        if (!std::isfinite(v)) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": bad numeric value '" +
                                 token + "'");
    }
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::string tok;
    std::istringstream ss(line);
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    return out;
}

}  // namespace

DenseMatrix read_matrix_stream(std::istream& in, const std::string& origin) {
    std::string raw;
    std::size_t lineno = 0;

    // first data line decides the format
    std::string first;
    std::size_t first_lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        first = clean_line(raw);
        if (!first.empty()) {
            first_lineno = lineno;
            break;
        }
    }
    if (first.empty()) throw std::runtime_error(origin + ": no data");

    if (first.find(',') != std::string::npos) {
        // dense CSV
        std::vector<std::vector<double>> rows;
        std::string line = first;
        std::size_t at = first_lineno;
        for (;;) {
            std::vector<double> row;
            for (const auto& tok : split_commas(line)) row.push_back(parse_double(tok, origin, at));
            if (!rows.empty() && row.size() != rows.front().size()) {
                throw std::runtime_error(origin + ":" + std::to_string(at) + ": ragged CSV row");
            }
            rows.push_back(std::move(row));
            line.clear();
            while (std::getline(in, raw)) {
                ++lineno;
                line = clean_line(raw);
                if (!line.empty()) break;
            }
            if (line.empty()) break;
            at = lineno;
        }
        DenseMatrix a(rows.size(), rows.front().size());
        for (std::size_t i = 0; i < a.rows; ++i) {
            for (std::size_t j = 0; j < a.cols; ++j) a.at(i, j) = rows[i][j];
        }
        return a;
    }

    // coordinate format
    std::istringstream header(first);
    long long m = 0, n = 0, nnz = 0;
    if (!(header >> m >> n >> nnz) || m <= 0 || n <= 0 || nnz < 0) {
        throw std::runtime_error(origin + ":" + std::to_string(first_lineno) +
                                 ": expected header 'm n nnz'");
    }
    std::string trailing;
    if (header >> trailing) {
        throw std::runtime_error(origin + ":" + std::to_string(first_lineno) +
                                 ": trailing tokens after header");
    }
    DenseMatrix a(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
    long long seen = 0;
    while (seen < nnz) {
        if (!std::getline(in, raw)) {
            throw std::runtime_error(origin + ": expected " + std::to_string(nnz) +
                                     " entries, found " + std::to_string(seen));
        }
        ++lineno;
        const std::string line = clean_line(raw);
        if (line.empty()) continue;
        std::istringstream ss(line);
        long long i = 0, j = 0;
        std::string vtok;
        if (!(ss >> i >> j >> vtok)) {
            throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                     ": expected 'i j value'");
        }
        if (i < 0 || i >= m || j < 0 || j >= n) {
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": index out of range");
        }
        a.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
            parse_double(vtok, origin, lineno);
        ++seen;
    }
    return a;
}

DenseMatrix read_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open matrix file '" + path + "'");
    return read_matrix_stream(in, path);
}

std::vector<double> read_vector_stream(std::istream& in, const std::string& origin) {
    std::vector<double> out;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = clean_line(raw);
        if (line.empty()) continue;
        out.push_back(parse_double(line, origin, lineno));
    }
    if (out.empty()) throw std::runtime_error(origin + ": no data");
    return out;
}

std::vector<double> read_vector(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open vector file '" + path + "'");
    return read_vector_stream(in, path);
}

void write_matrix_coord(const std::string& path, const DenseMatrix& a) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    std::size_t nnz = 0;
    for (double v : a.data) nnz += v != 0.0;
    out.precision(17);
    out << a.rows << ' ' << a.cols << ' ' << nnz << '\n';
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = 0; j < a.cols; ++j) {
            if (a.at(i, j) != 0.0) out << i << ' ' << j << ' ' << a.at(i, j) << '\n';
        }
    }
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

void write_vector(const std::string& path, const std::vector<double>& v) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out.precision(17);
    for (double x : v) out << x << '\n';
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace qireg
