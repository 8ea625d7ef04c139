#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wasabi/partition.hpp"
#include "wasabi/sample_set.hpp"

namespace wasabi {

struct SearchConfig {
    /// Cap on clusters; unset means (max clusters across the draws) + 10.
    std::optional<std::size_t> k_max;
    /// Restarts. Run 0 starts from the lowest-EVI draw, the rest from
    /// sequential allocation over a random item order.
    std::size_t runs = 8;
    std::size_t max_sweeps = 100;
    uint64_t seed = 0;
    /// Distinct draws scored when picking the draw seed for run 0. When the
    /// sample holds more distinct draws, an evenly spaced subset is scored.
    std::size_t seed_candidates = 64;
    /// When n is at most this, every set partition is scored and the exact
    /// minimizer returned instead of running the greedy search.
    std::size_t exhaustive_up_to = 0;
};

std::size_t resolve_k_max(const SearchConfig& cfg, const SampleSet& s);

struct SearchResult {
    Partition partition;
    double expected_vi = 0.0;
    /// Index of the winning restart. Warm starts are numbered after the
    /// regular runs.
    std::size_t run = 0;
    /// Expected VI after allocation and after every sweep of the winning run.
    std::vector<double> trace;
};

/// Greedy minimizer of posterior expected VI: sequential allocation followed
/// by single-item reallocation sweeps until no move improves. Extra warm
/// starts are swept from the given partitions.
SearchResult minvi_search(const SampleSet& s, const SearchConfig& cfg,
                          std::span<const Partition> warm_starts = {});

Partition greedy_minvi(const SampleSet& s, const SearchConfig& cfg);

/// Reallocation sweeps only, starting from `start`.
SearchResult sweeten(const SampleSet& s, const Partition& start, const SearchConfig& cfg);

enum class Linkage { average, complete };

/// One agglomerative merge: clusters `a` < `b` (indexed by their smallest
/// original item) joined at `height`.
struct Merge {
    std::size_t a;
    std::size_t b;
    double height;
};

/// Full merge sequence of agglomerative clustering on 1 - PSM. Equal heights
/// are resolved toward the smallest (a, b) pair.
std::vector<Merge> agglomerate(const Psm& m, Linkage method);

/// Tree cuts at 1..min(k_max, n) clusters, in that order. Throws for a
/// meet-cluster-level PSM.
std::vector<Partition> linkage_candidates(const Psm& m, Linkage method, std::size_t k_max);

/// The `count` candidates with the smallest expected VI, ascending; ties keep
/// input order.
std::vector<Partition> top_candidates_by_evi(std::span<const Partition> candidates, const SampleSet& s,
                                             std::size_t count);

}  // namespace wasabi
