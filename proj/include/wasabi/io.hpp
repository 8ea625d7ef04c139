#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wasabi/partition.hpp"
#include "wasabi/sample_set.hpp"
#include "wasabi/simulator.hpp"

namespace wasabi {

struct LoadedDraws {
    SampleSet draws;
    /// True when at least one input row was not already canonical.
    bool relabeled = false;
};

/// Headerless CSV, one draw per row, n integer labels per row. Blank lines
/// are skipped. Throws DataError naming the 1-based row on ragged rows or
/// non-integer labels.
LoadedDraws read_draws(std::istream& in);
LoadedDraws read_draws_file(const std::string& path);

void write_partitions(std::ostream& out, std::span<const Partition> parts);

/// Headerless CSV of n rows with dims real values each.
Dataset read_data(std::istream& in);
void write_data(std::ostream& out, const Dataset& data);

/// Dense matrix as CSV with round-trippable doubles.
void write_matrix(std::ostream& out, std::span<const double> values, std::size_t rows, std::size_t cols);

/// FNV-1a 64 of the file bytes as 16 hex digits.
std::string file_digest(const std::string& path);
std::string format_digest(uint64_t h);
uint64_t fnv1a(std::string_view bytes, uint64_t h = 0xcbf29ce484222325ULL);

}  // namespace wasabi
