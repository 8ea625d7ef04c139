#include "wasabi/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "wasabi/errors.hpp"

namespace wasabi {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

std::string row_error(std::size_t row, const std::string& msg) { return "row " + std::to_string(row) + ": " + msg; }

std::string fmt_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

LoadedDraws read_draws(std::istream& in) {
    std::vector<Partition> parts;
    std::vector<int64_t> labels;
    bool relabeled = false;
    std::size_t width = 0;
    std::size_t row = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        labels.clear();
        for (std::string_view f : split(line)) {
            int64_t v = 0;
            const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
            if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size()) {
                throw DataError(row_error(row, "label '" + std::string(f) + "' is not an integer"));
            }
            labels.push_back(v);
        }
        if (width == 0) {
            width = labels.size();
        } else if (labels.size() != width) {
            throw DataError(row_error(row, "expected " + std::to_string(width) + " labels, found " +
                                               std::to_string(labels.size())));
        }
        Partition p = Partition::canonicalize(labels);
        for (std::size_t i = 0; i < labels.size() && !relabeled; ++i) relabeled = labels[i] != p[i];
        parts.push_back(std::move(p));
    }
    if (parts.empty()) throw DataError("draws file contains no rows");
    return {SampleSet(std::move(parts)), relabeled};
}

LoadedDraws read_draws_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    return read_draws(in);
}

void write_partitions(std::ostream& out, std::span<const Partition> parts) {
    std::string buf;
    for (const Partition& p : parts) {
        buf.clear();
        for (std::size_t i = 0; i < p.n(); ++i) {
            if (i) buf += ',';
            buf += std::to_string(p[i]);
        }
        buf += '\n';
        out << buf;
    }
}

Dataset read_data(std::istream& in) {
    Dataset data;
    std::size_t row = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto fields = split(line);
        if (data.dims == 0) {
            data.dims = fields.size();
        } else if (fields.size() != data.dims) {
            throw DataError(row_error(row, "expected " + std::to_string(data.dims) + " values, found " +
                                               std::to_string(fields.size())));
        }
        for (std::string_view f : fields) {
            double v = 0.0;
            const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
            if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size()) {
                throw DataError(row_error(row, "value '" + std::string(f) + "' is not a number"));
            }
            data.values.push_back(v);
        }
        ++data.n;
    }
    if (data.n == 0) throw DataError("data file contains no rows");
    return data;
}

void write_data(std::ostream& out, const Dataset& data) {
    for (std::size_t i = 0; i < data.n; ++i) {
        for (std::size_t d = 0; d < data.dims; ++d) {
            if (d) out << ',';
            out << fmt_double(data(i, d));
        }
        out << '\n';
    }
}

void write_matrix(std::ostream& out, std::span<const double> values, std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (c) out << ',';
            out << fmt_double(values[r * cols + c]);
        }
        out << '\n';
    }
}

uint64_t fnv1a(std::string_view bytes, uint64_t h) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string format_digest(uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    uint64_t h = 0xcbf29ce484222325ULL;
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        h = fnv1a(std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())), h);
    }
    return format_digest(h);
}

}  // namespace wasabi
