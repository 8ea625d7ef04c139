#include "wasabi/sample_set.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "wasabi/parallel.hpp"

namespace wasabi {

namespace {

struct LabelsHash {
    std::size_t operator()(const std::vector<Label>* labels) const {
        uint64_t h = 1469598103934665603ULL;
        for (const Label l : *labels) {
            h ^= static_cast<uint64_t>(static_cast<uint32_t>(l));
            h *= 1099511628211ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

struct LabelsEqual {
    bool operator()(const std::vector<Label>* a, const std::vector<Label>* b) const { return *a == *b; }
};

void require_nonempty(const SampleSet& s) {
    if (s.empty()) throw std::invalid_argument("sample set holds no draws");
}

void require_dimension(const Partition& p, const SampleSet& s) {
    if (p.n() != s.n()) {
        throw std::invalid_argument("partition has " + std::to_string(p.n()) + " items but draws have " +
                                    std::to_string(s.n()));
    }
}

}  // namespace

SampleSet::SampleSet(std::vector<Partition> draws) : draws_(std::move(draws)) {
    if (draws_.empty()) return;
    n_ = draws_.front().n();
    std::unordered_map<const std::vector<Label>*, std::size_t, LabelsHash, LabelsEqual> seen;
    seen.reserve(draws_.size());
    unique_of_.resize(draws_.size());
    for (std::size_t t = 0; t < draws_.size(); ++t) {
        if (draws_[t].n() != n_) {
            throw std::invalid_argument("draw " + std::to_string(t) + " has " + std::to_string(draws_[t].n()) +
                                        " items, expected " + std::to_string(n_));
        }
        auto [it, inserted] = seen.try_emplace(&draws_[t].labels(), unique_draw_.size());
        if (inserted) {
            unique_draw_.push_back(t);
            multiplicity_.push_back(0);
        }
        ++multiplicity_[it->second];
        unique_of_[t] = it->second;
    }
}

std::size_t SampleSet::max_clusters() const {
    std::size_t k = 0;
    for (const auto& d : draws_) k = std::max(k, d.k());
    return k;
}

SampleSet SampleSet::subset(std::span<const std::size_t> indices) const {
    std::vector<Partition> picked;
    picked.reserve(indices.size());
    for (const std::size_t t : indices) picked.push_back(draws_.at(t));
    return SampleSet(std::move(picked));
}

SampleSet SampleSet::thinned(std::size_t stride) const {
    if (stride == 0) throw std::invalid_argument("thinning stride must be positive");
    std::vector<Partition> picked;
    for (std::size_t t = 0; t < draws_.size(); t += stride) picked.push_back(draws_[t]);
    return SampleSet(std::move(picked));
}

Psm psm(const SampleSet& s) {
    require_nonempty(s);
    const std::size_t n = s.n();
    // Integer co-clustering counts per distinct draw chunk, summed in chunk
    // order, so the result is independent of the thread schedule.
    const std::size_t chunks = std::min<std::size_t>(thread_count(), s.unique_count());
    std::vector<std::vector<uint64_t>> partial(chunks);
    parallel_for(chunks, [&](std::size_t c) {
        auto& counts = partial[c];
        counts.assign(n * n, 0);
        std::vector<std::vector<std::size_t>> members;
        for (std::size_t u = c; u < s.unique_count(); u += chunks) {
            const Partition& p = s.unique_partition(u);
            const uint64_t m = s.multiplicity(u);
            members.assign(p.k(), {});
            for (std::size_t i = 0; i < n; ++i) members[static_cast<std::size_t>(p[i])].push_back(i);
            for (const auto& cluster : members) {
                for (const std::size_t i : cluster) {
                    uint64_t* row = counts.data() + i * n;
                    for (const std::size_t j : cluster) row[j] += m;
                }
            }
        }
    });
    std::vector<uint64_t> total(n * n, 0);
    for (const auto& counts : partial) {
        for (std::size_t x = 0; x < total.size(); ++x) total[x] += counts[x];
    }
    Psm out(n, PsmLevel::item);
    const double denom = static_cast<double>(s.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) out.at(i, j) = static_cast<double>(total[i * n + j]) / denom;
    }
    return out;
}

double expected_vi(const Partition& p, const SampleSet& s) {
    require_nonempty(s);
    require_dimension(p, s);
    std::vector<double> per_unique(s.unique_count());
    ViEvaluator vi(p);
    for (std::size_t u = 0; u < s.unique_count(); ++u) {
        per_unique[u] = vi(s.unique_partition(u)) * static_cast<double>(s.multiplicity(u));
    }
    double acc = 0.0;
    for (const double v : per_unique) acc += v;
    return acc / static_cast<double>(s.size());
}

std::vector<double> evi_contribution_mcmc(const Partition& p, const SampleSet& s) {
    require_nonempty(s);
    require_dimension(p, s);
    std::vector<double> out(s.n(), 0.0);
    for (std::size_t u = 0; u < s.unique_count(); ++u) {
        const auto vic = vi_contribution(p, s.unique_partition(u));
        const auto m = static_cast<double>(s.multiplicity(u));
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += m * vic[i];
    }
    const auto denom = static_cast<double>(s.size());
    for (double& v : out) v /= denom;
    return out;
}

SampleSet subsample(const SampleSet& s, std::size_t batch, uint64_t seed) {
    if (batch < 1 || batch > s.size()) {
        throw std::invalid_argument("subsample size " + std::to_string(batch) + " outside [1, " +
                                    std::to_string(s.size()) + "]");
    }
    std::vector<std::size_t> idx(s.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < batch; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(batch);
    return s.subset(idx);
}

}  // namespace wasabi
