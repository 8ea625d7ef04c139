#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wasabi/partition.hpp"
#include "wasabi/rng.hpp"
#include "wasabi/sample_set.hpp"
#include "wasabi/search.hpp"

namespace wasabi {

enum class InitMethod { average, complete, plusplus, topvi, fixed };

struct WasabiConfig {
    std::size_t particles = 2;
    InitMethod init = InitMethod::average;
    /// Initial particles for InitMethod::fixed, or extra candidates for topvi.
    std::vector<Partition> fixed;
    /// Convergence threshold on |change of W| in bits; unset means
    /// 0.0001 * log2(n).
    std::optional<double> epsilon;
    std::size_t max_iter = 100;
    /// Independent starts. Start 0 uses `init`; later starts use k-means++
    /// seeding with their own random stream.
    std::size_t runs = 8;
    /// Mini-batch size. When set, iterations run on fresh subsamples of this
    /// size, then min(5, max_iter) iterations on the full sample finish.
    std::optional<std::size_t> minibatch;
    /// Thinning stride for the draws scored during initialization.
    std::size_t init_thin = 10;
    bool outlier_check = true;
    /// Inner minVI solver. Its `runs` counts restarts in addition to the warm
    /// start from the current particle.
    SearchConfig search{.k_max = std::nullopt, .runs = 2};
    uint64_t seed = 0;
};

double resolve_epsilon(const WasabiConfig& cfg, std::size_t n);

struct WasabiPosterior {
    std::vector<Partition> particles;
    std::vector<double> weights;
    /// Region (particle index) of every draw.
    std::vector<std::size_t> assignments;
    /// Expected VI of each particle over its own region.
    std::vector<double> per_particle_evi;
    double wasserstein = 0.0;
    /// W after every iteration, mini-batch iterations first.
    std::vector<double> trace;
    std::size_t minibatch_iterations = 0;
    bool converged = false;
    /// Start that produced this result.
    std::size_t run = 0;
    std::vector<std::string> warnings;

    std::size_t size() const { return particles.size(); }
};

/// Initial particles for `cfg.init`. Throws when the method cannot supply
/// cfg.particles distinct candidates, or a fixed list is malformed.
std::vector<Partition> initialize(const SampleSet& s, const WasabiConfig& cfg, Rng& rng);

/// k-means++ style seeding: first particle uniform over the draws, each
/// further one drawn with probability proportional to its VI to the nearest
/// particle already chosen. Starts from `chosen`.
std::vector<Partition> plusplus_seed(const SampleSet& pool, std::vector<Partition> chosen, std::size_t count,
                                     Rng& rng);

struct NUpdateResult {
    std::vector<std::size_t> assignments;
    /// Particles whose empty region forced a replacement by a draw.
    std::vector<std::size_t> refilled;
    std::size_t outlier_swaps = 0;
};

/// Assigns every draw to its nearest particle (exact ties uniformly at
/// random), refills particles with empty regions and, when enabled, tries
/// one outlier swap for every singleton region. May replace particles.
NUpdateResult n_update(const SampleSet& s, std::vector<Partition>& particles, Rng& rng, bool outlier_check = true);

struct VISearchResult {
    std::vector<Partition> particles;
    std::vector<double> per_particle_evi;
};

/// Replaces every particle by the minVI partition of its region. Every
/// region must be nonempty.
VISearchResult vi_search_step(const SampleSet& s, std::span<const Partition> particles,
                              std::span<const std::size_t> assignments, const SearchConfig& cfg);

WasabiPosterior run(const SampleSet& s, const WasabiConfig& cfg);

/// Sum over draws of VI to their assigned particle, divided by T.
double assigned_cost(const SampleSet& s, std::span<const Partition> particles,
                     std::span<const std::size_t> assignments);

struct ElbowEntry {
    std::size_t particles;
    double wasserstein;
    WasabiPosterior posterior;
};

/// One run per value in `particle_counts` (ascending). Each count after the
/// first also runs a start seeded with the previous solution plus one
/// k-means++ particle, so the reported W never increases.
std::vector<ElbowEntry> elbow(const SampleSet& s, std::span<const std::size_t> particle_counts,
                              const WasabiConfig& cfg);

}  // namespace wasabi
