#include "rotorlab/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rotorlab/errors.hpp"

namespace rotorlab {

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string fnv1a64_hex(const std::string& content) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(content.data(), content.size())));
    return std::string(buf);
}

void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot open for writing: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw DataError("short write: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string render_table(const std::vector<std::string>& names,
                         const std::vector<const std::vector<double>*>& cols) {
    if (names.size() != cols.size() || cols.empty())
        throw DataError("render_table: mismatched columns");
    const std::size_t rows = cols[0]->size();
    for (const auto* c : cols)
        if (c->size() != rows) throw DataError("render_table: ragged columns");
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += '\t';
        out += names[i];
    }
    out += '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (i) out += '\t';
            out += format_double((*cols[i])[r]);
        }
        out += '\n';
    }
    return out;
}

std::string render_series(const TimeSeries& series) {
    std::vector<std::string> names;
    std::vector<const std::vector<double>*> cols;
    names.push_back("t");
    cols.push_back(&series.t);
    for (std::size_t i = 0; i < series.names.size(); ++i) {
        names.push_back(series.names[i]);
        cols.push_back(&series.cols[i]);
    }
    return render_table(names, cols);
}

TimeSeries parse_series(const std::string& content) {
    TimeSeries s;
    std::istringstream in(content);
    std::string line;
    if (!std::getline(in, line)) throw DataError("parse_series: empty input");
    std::vector<std::string> names;
    {
        std::istringstream hs(line);
        std::string tok;
        while (std::getline(hs, tok, '\t')) names.push_back(tok);
    }
    if (names.empty() || names[0] != "t") throw DataError("parse_series: first column must be t");
    for (std::size_t i = 1; i < names.size(); ++i) s.add_column(names[i]);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        std::size_t idx = 0;
        while (std::getline(ls, tok, '\t')) {
            double v = 0.0;
            auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (res.ec != std::errc{}) throw DataError("parse_series: bad number '" + tok + "'");
            if (idx == 0)
                s.t.push_back(v);
            else if (idx - 1 < s.cols.size())
                s.cols[idx - 1].push_back(v);
            ++idx;
        }
        if (idx != names.size()) throw DataError("parse_series: ragged row");
    }
    return s;
}

} // namespace rotorlab
