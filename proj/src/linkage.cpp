#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "wasabi/search.hpp"

namespace wasabi {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// Dissimilarity matrix with a per-row nearest-neighbour cache over larger
// indices. Merged clusters keep the smaller index.
class Agglomerator {
public:
    Agglomerator(const Psm& m, Linkage method)
        : n_(m.dim()), method_(method), dist_(n_ * n_), size_(n_, 1), active_(n_, true), nn_(n_, kNone),
          nn_dist_(n_, std::numeric_limits<double>::infinity()) {
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) dist_[i * n_ + j] = 1.0 - m(i, j);
        }
        for (std::size_t i = 0; i < n_; ++i) refresh(i);
    }

    std::vector<Merge> run() {
        std::vector<Merge> merges;
        merges.reserve(n_ > 0 ? n_ - 1 : 0);
        for (std::size_t step = 1; step < n_; ++step) {
            std::size_t a = kNone;
            for (std::size_t i = 0; i < n_; ++i) {
                if (active_[i] && nn_[i] != kNone && (a == kNone || nn_dist_[i] < nn_dist_[a])) a = i;
            }
            const std::size_t b = nn_[a];
            merges.push_back({a, b, nn_dist_[a]});
            join(a, b);
        }
        return merges;
    }

private:
    double& d(std::size_t i, std::size_t j) { return dist_[i * n_ + j]; }

    void refresh(std::size_t i) {
        nn_[i] = kNone;
        nn_dist_[i] = std::numeric_limits<double>::infinity();
        for (std::size_t j = i + 1; j < n_; ++j) {
            if (active_[j] && d(i, j) < nn_dist_[i]) {
                nn_dist_[i] = d(i, j);
                nn_[i] = j;
            }
        }
    }

    void join(std::size_t a, std::size_t b) {
        const auto sa = static_cast<double>(size_[a]);
        const auto sb = static_cast<double>(size_[b]);
        active_[b] = false;
        for (std::size_t k = 0; k < n_; ++k) {
            if (!active_[k] || k == a) continue;
            const double merged = method_ == Linkage::average ? (sa * d(a, k) + sb * d(b, k)) / (sa + sb)
                                                               : std::max(d(a, k), d(b, k));
            d(a, k) = merged;
            d(k, a) = merged;
        }
        size_[a] += size_[b];

        for (std::size_t k = 0; k < n_; ++k) {
            if (!active_[k]) continue;
            if (k == a || nn_[k] == a || nn_[k] == b) {
                refresh(k);
            } else if (k < a && (d(k, a) < nn_dist_[k] || (d(k, a) == nn_dist_[k] && a < nn_[k]))) {
                nn_dist_[k] = d(k, a);
                nn_[k] = a;
            }
        }
    }

    std::size_t n_;
    Linkage method_;
    std::vector<double> dist_;
    std::vector<std::size_t> size_;
    std::vector<bool> active_;
    std::vector<std::size_t> nn_;
    std::vector<double> nn_dist_;
};

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    return x;
}

}  // namespace

std::vector<Merge> agglomerate(const Psm& m, Linkage method) {
    if (m.level() != PsmLevel::item) {
        throw std::invalid_argument("hierarchical clustering needs an item-level PSM");
    }
    return Agglomerator(m, method).run();
}

std::vector<Partition> linkage_candidates(const Psm& m, Linkage method, std::size_t k_max) {
    if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
    const auto merges = agglomerate(m, method);
    const std::size_t n = m.dim();
    const std::size_t top = std::min(k_max, n);

    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    std::vector<Partition> cuts(top);
    auto snapshot = [&](std::size_t clusters) {
        std::vector<Label> raw(n);
        for (std::size_t i = 0; i < n; ++i) raw[i] = static_cast<Label>(find_root(parent, i));
        cuts[clusters - 1] = Partition::canonicalize(raw);
    };

    std::size_t clusters = n;
    if (clusters <= top) snapshot(clusters);
    for (const auto& merge : merges) {
        parent[find_root(parent, merge.b)] = find_root(parent, merge.a);
        --clusters;
        if (clusters <= top) snapshot(clusters);
    }
    return cuts;
}

}  // namespace wasabi
