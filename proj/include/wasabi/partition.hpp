#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace wasabi {

using Label = std::int32_t;

// Absolute tolerance (bits) used when deciding that two partitions are at
// distance zero.
inline constexpr double kZeroDistanceTol = 1e-9;

/// A set partition of n items stored as canonical labels: cluster ids are
/// 0..k-1 in order of first occurrence, so two label vectors inducing the
/// same set partition compare equal.
class Partition {
public:
    Partition() = default;

    /// Relabels `raw` by first occurrence. Throws std::invalid_argument on
    /// empty input.
    static Partition canonicalize(std::span<const Label> raw);
    static Partition canonicalize(std::span<const int64_t> raw);

    std::size_t n() const { return labels_.size(); }
    std::size_t k() const { return sizes_.size(); }
    const std::vector<Label>& labels() const { return labels_; }
    const std::vector<std::size_t>& sizes() const { return sizes_; }
    Label operator[](std::size_t i) const { return labels_[i]; }

    // Cluster ids are canonical, so label equality is set-partition equality.
    friend bool operator==(const Partition& a, const Partition& b) { return a.labels_ == b.labels_; }

private:
    std::vector<Label> labels_;
    std::vector<std::size_t> sizes_;
};

/// Cross-tabulation n_{j1,j2} of two partitions over the same items.
class ContingencyTable {
public:
    ContingencyTable(const Partition& a, const Partition& b);

    std::size_t rows() const { return row_margins_.size(); }
    std::size_t cols() const { return col_margins_.size(); }
    std::size_t n() const { return n_; }
    std::size_t count(std::size_t row, std::size_t col) const { return counts_[row * cols() + col]; }
    const std::vector<std::size_t>& row_margins() const { return row_margins_; }
    const std::vector<std::size_t>& col_margins() const { return col_margins_; }

    struct Cell {
        Label row;
        Label col;
        std::size_t count;
    };
    /// Nonempty cells in row-major order. These are the clusters of the meet.
    std::vector<Cell> nonempty_cells() const;

private:
    std::vector<std::size_t> counts_;
    std::vector<std::size_t> row_margins_;
    std::vector<std::size_t> col_margins_;
    std::size_t n_ = 0;
};

// All information quantities below are in bits.

double entropy(const Partition& p);
double mutual_information(const Partition& a, const Partition& b);

/// Variation of information H(a) + H(b) - 2 MI(a, b), via the contingency table.
double vi_distance(const Partition& a, const Partition& b);

/// Per-item decomposition of vi_distance. Entries are constant within each
/// cluster of meet(a, b) and sum to vi_distance(a, b).
std::vector<double> vi_contribution(const Partition& a, const Partition& b);

/// Aggregate of vi_contribution over each nonempty contingency cell (j1, j2).
std::map<std::pair<Label, Label>, double> vi_contribution_by_group(const Partition& a,
                                                                    const Partition& b);

/// Repeated vi_distance evaluations against one fixed reference partition,
/// reusing scratch buffers. Results are bitwise identical to vi_distance.
class ViEvaluator {
public:
    explicit ViEvaluator(const Partition& reference);
    double operator()(const Partition& other);
    const Partition& reference() const { return *reference_; }

private:
    const Partition* reference_;
    std::vector<double> xlogx_;
    std::vector<std::size_t> counts_;
    double reference_margin_ = 0.0;
};

/// Every set partition of n items (Bell(n) of them) in restricted-growth
/// order. Intended for n <= 10.
std::vector<Partition> enumerate_partitions(std::size_t n);

/// Coarsest partition refining every input. Throws on an empty list or
/// mismatched lengths.
Partition meet(std::span<const Partition> parts);
Partition meet(const Partition& a, const Partition& b);

}  // namespace wasabi
