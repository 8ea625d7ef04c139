#include "wasabi/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace wasabi {

namespace {

template <typename Int>
void canonicalize_impl(std::span<const Int> raw, std::vector<Label>& labels,
                            std::vector<std::size_t>& sizes) {
    if (raw.empty()) {
        throw std::invalid_argument("cannot canonicalize an empty label vector");
    }
    labels.resize(raw.size());
    sizes.clear();

    const auto [lo_it, hi_it] = std::minmax_element(raw.begin(), raw.end());
    const auto lo = static_cast<int64_t>(*lo_it);
    const auto hi = static_cast<int64_t>(*hi_it);
    const auto span_width = static_cast<uint64_t>(hi - lo);

    if (span_width < 4 * raw.size() + 16) {
        std::vector<Label> lookup(span_width + 1, -1);
        for (std::size_t i = 0; i < raw.size(); ++i) {
            Label& slot = lookup[static_cast<std::size_t>(static_cast<int64_t>(raw[i]) - lo)];
            if (slot < 0) {
                slot = static_cast<Label>(sizes.size());
                sizes.push_back(0);
            }
            labels[i] = slot;
            ++sizes[static_cast<std::size_t>(slot)];
        }
    } else {
        std::unordered_map<int64_t, Label> lookup;
        for (std::size_t i = 0; i < raw.size(); ++i) {
            auto [it, inserted] = lookup.try_emplace(static_cast<int64_t>(raw[i]), static_cast<Label>(sizes.size()));
            if (inserted) sizes.push_back(0);
            labels[i] = it->second;
            ++sizes[static_cast<std::size_t>(it->second)];
        }
    }
}

void require_same_n(const Partition& a, const Partition& b) {
    if (a.n() != b.n()) {
        throw std::invalid_argument("partitions cover different item counts (" + std::to_string(a.n()) +
                                    " vs " + std::to_string(b.n()) + ")");
    }
}

double xlog2x(std::size_t x) {
    if (x == 0) return 0.0;
    const auto d = static_cast<double>(x);
    return d * std::log2(d);
}

}  // namespace

Partition Partition::canonicalize(std::span<const Label> raw) {
    Partition p;
    canonicalize_impl(raw, p.labels_, p.sizes_);
    return p;
}

Partition Partition::canonicalize(std::span<const int64_t> raw) {
    Partition p;
    canonicalize_impl(raw, p.labels_, p.sizes_);
    return p;
}

ContingencyTable::ContingencyTable(const Partition& a, const Partition& b)
    : counts_(a.k() * b.k(), 0), row_margins_(a.sizes()), col_margins_(b.sizes()), n_(a.n()) {
    require_same_n(a, b);
    const std::size_t width = b.k();
    const auto& la = a.labels();
    const auto& lb = b.labels();
    for (std::size_t i = 0; i < n_; ++i) {
        ++counts_[static_cast<std::size_t>(la[i]) * width + static_cast<std::size_t>(lb[i])];
    }
}

std::vector<ContingencyTable::Cell> ContingencyTable::nonempty_cells() const {
    std::vector<Cell> cells;
    for (std::size_t r = 0; r < rows(); ++r) {
        for (std::size_t c = 0; c < cols(); ++c) {
            if (const std::size_t v = count(r, c); v > 0) {
                cells.push_back({static_cast<Label>(r), static_cast<Label>(c), v});
            }
        }
    }
    return cells;
}

double entropy(const Partition& p) {
    const double n = static_cast<double>(p.n());
    double acc = 0.0;
    for (const std::size_t s : p.sizes()) acc += xlog2x(s);
    return std::max(0.0, std::log2(n) - acc / n);
}

double mutual_information(const Partition& a, const Partition& b) {
    const ContingencyTable table(a, b);
    const double n = static_cast<double>(table.n());
    double acc = 0.0;
    for (const auto& cell : table.nonempty_cells()) {
        acc += xlog2x(cell.count);
    }
    for (const std::size_t s : a.sizes()) acc -= xlog2x(s);
    for (const std::size_t s : b.sizes()) acc -= xlog2x(s);
    return std::max(0.0, acc / n + std::log2(n));
}

double vi_distance(const Partition& a, const Partition& b) {
    const ContingencyTable table(a, b);
    double joint = 0.0;
    for (const auto& cell : table.nonempty_cells()) joint += xlog2x(cell.count);
    double margins = 0.0;
    for (const std::size_t s : a.sizes()) margins += xlog2x(s);
    for (const std::size_t s : b.sizes()) margins += xlog2x(s);
    return std::max(0.0, (margins - 2.0 * joint) / static_cast<double>(table.n()));
}

ViEvaluator::ViEvaluator(const Partition& reference) : reference_(&reference), xlogx_(reference.n() + 1) {
    for (std::size_t x = 0; x <= reference.n(); ++x) xlogx_[x] = xlog2x(x);
    for (const std::size_t s : reference.sizes()) reference_margin_ += xlogx_[s];
}

double ViEvaluator::operator()(const Partition& other) {
    const Partition& ref = *reference_;
    require_same_n(ref, other);
    const std::size_t width = other.k();
    counts_.assign(ref.k() * width, 0);
    const Label* la = ref.labels().data();
    const Label* lb = other.labels().data();
    for (std::size_t i = 0; i < ref.n(); ++i) {
        ++counts_[static_cast<std::size_t>(la[i]) * width + static_cast<std::size_t>(lb[i])];
    }
    double joint = 0.0;
    for (const std::size_t c : counts_) {
        if (c > 0) joint += xlogx_[c];
    }
    double margins = reference_margin_;
    for (const std::size_t s : other.sizes()) margins += xlogx_[s];
    return std::max(0.0, (margins - 2.0 * joint) / static_cast<double>(ref.n()));
}

namespace {

// Per-item contribution for an item in cell (row, col): only integer counts
// enter the logs, so every item of a cell gets a bitwise identical value.
double cell_item_contribution(const ContingencyTable& table, const ContingencyTable::Cell& cell) {
    const double v = std::log2(static_cast<double>(table.row_margins()[static_cast<std::size_t>(cell.row)])) +
                     std::log2(static_cast<double>(table.col_margins()[static_cast<std::size_t>(cell.col)])) -
                     2.0 * std::log2(static_cast<double>(cell.count));
    return std::max(0.0, v) / static_cast<double>(table.n());
}

}  // namespace

std::vector<double> vi_contribution(const Partition& a, const Partition& b) {
    const ContingencyTable table(a, b);
    std::vector<double> per_cell(table.rows() * table.cols(), 0.0);
    for (const auto& cell : table.nonempty_cells()) {
        per_cell[static_cast<std::size_t>(cell.row) * table.cols() + static_cast<std::size_t>(cell.col)] =
            cell_item_contribution(table, cell);
    }
    std::vector<double> out(a.n());
    for (std::size_t i = 0; i < a.n(); ++i) {
        out[i] = per_cell[static_cast<std::size_t>(a[i]) * table.cols() + static_cast<std::size_t>(b[i])];
    }
    return out;
}

std::map<std::pair<Label, Label>, double> vi_contribution_by_group(const Partition& a, const Partition& b) {
    const ContingencyTable table(a, b);
    std::map<std::pair<Label, Label>, double> out;
    for (const auto& cell : table.nonempty_cells()) {
        out.emplace(std::pair{cell.row, cell.col},
                    static_cast<double>(cell.count) * cell_item_contribution(table, cell));
    }
    return out;
}

Partition meet(const Partition& a, const Partition& b) {
    require_same_n(a, b);
    const std::size_t width = b.k();
    std::vector<Label> ids(a.k() * width, -1);
    std::vector<Label> raw(a.n());
    Label next = 0;
    for (std::size_t i = 0; i < a.n(); ++i) {
        Label& slot = ids[static_cast<std::size_t>(a[i]) * width + static_cast<std::size_t>(b[i])];
        if (slot < 0) slot = next++;
        raw[i] = slot;
    }
    return Partition::canonicalize(raw);
}

Partition meet(std::span<const Partition> parts) {
    if (parts.empty()) {
        throw std::invalid_argument("meet of an empty list of partitions");
    }
    Partition acc = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) {
        acc = meet(acc, parts[i]);
    }
    return acc;
}

std::vector<Partition> enumerate_partitions(std::size_t n) {
    if (n == 0) throw std::invalid_argument("cannot enumerate partitions of zero items");
    std::vector<Partition> out;
    std::vector<Label> rgs(n, 0);
    std::vector<Label> prefix_max(n, 0);
    while (true) {
        out.push_back(Partition::canonicalize(rgs));
        // Rightmost position that can still grow: rgs[i] <= max(rgs[0..i-1]).
        std::size_t i = n - 1;
        while (i > 0 && rgs[i] > prefix_max[i - 1]) --i;
        if (i == 0) break;
        ++rgs[i];
        prefix_max[i] = std::max(prefix_max[i - 1], rgs[i]);
        for (std::size_t j = i + 1; j < n; ++j) {
            rgs[j] = 0;
            prefix_max[j] = prefix_max[i];
        }
    }
    return out;
}

}  // namespace wasabi
