#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "wasabi/partition.hpp"

namespace wasabi {

/// T posterior partition draws over the same n items, each weighted 1/T.
/// Draws are canonical, and identical draws are indexed once so that
/// distance sweeps can run over distinct partitions with multiplicities.
class SampleSet {
public:
    SampleSet() = default;
    /// Throws std::invalid_argument if the draws disagree on n.
    explicit SampleSet(std::vector<Partition> draws);

    std::size_t size() const { return draws_.size(); }
    std::size_t n() const { return n_; }
    bool empty() const { return draws_.empty(); }
    const std::vector<Partition>& draws() const { return draws_; }
    const Partition& operator[](std::size_t t) const { return draws_[t]; }

    std::size_t unique_count() const { return unique_draw_.size(); }
    /// Index of the first draw equal to distinct partition u.
    std::size_t unique_draw(std::size_t u) const { return unique_draw_[u]; }
    const Partition& unique_partition(std::size_t u) const { return draws_[unique_draw_[u]]; }
    std::size_t multiplicity(std::size_t u) const { return multiplicity_[u]; }
    /// Distinct-partition index of draw t.
    std::size_t unique_of(std::size_t t) const { return unique_of_[t]; }

    std::size_t max_clusters() const;

    SampleSet subset(std::span<const std::size_t> indices) const;
    /// Every stride-th draw starting at 0.
    SampleSet thinned(std::size_t stride) const;

private:
    std::vector<Partition> draws_;
    std::size_t n_ = 0;
    std::vector<std::size_t> unique_draw_;
    std::vector<std::size_t> multiplicity_;
    std::vector<std::size_t> unique_of_;
};

enum class PsmLevel { item, meet_cluster };

/// Symmetric co-clustering probability matrix, dense row-major.
class Psm {
public:
    Psm(std::size_t dim, PsmLevel level) : dim_(dim), level_(level), values_(dim * dim, 0.0) {}

    std::size_t dim() const { return dim_; }
    PsmLevel level() const { return level_; }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * dim_ + j]; }
    double& at(std::size_t i, std::size_t j) { return values_[i * dim_ + j]; }
    const std::vector<double>& values() const { return values_; }

private:
    std::size_t dim_;
    PsmLevel level_;
    std::vector<double> values_;
};

/// Item-level PSM: fraction of draws in which items i and j share a cluster.
Psm psm(const SampleSet& s);

/// Posterior expected VI of p, i.e. the mean VI from p to each draw.
double expected_vi(const Partition& p, const SampleSet& s);

/// Per-item decomposition of expected_vi (mean of the per-draw VI
/// contributions).
std::vector<double> evi_contribution_mcmc(const Partition& p, const SampleSet& s);

/// B draws without replacement, deterministic given seed.
SampleSet subsample(const SampleSet& s, std::size_t batch, uint64_t seed);

}  // namespace wasabi
