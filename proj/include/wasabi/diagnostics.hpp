#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "wasabi/algorithm.hpp"
#include "wasabi/partition.hpp"
#include "wasabi/sample_set.hpp"

namespace wasabi {

struct MeetDecomposition {
    Partition meet;
    /// cluster_map[l][m]: cluster of particle l containing meet cluster m.
    std::vector<std::vector<Label>> cluster_map;
    std::vector<std::size_t> meet_sizes;
};

MeetDecomposition decompose_meet(std::span<const Partition> parts);
MeetDecomposition particles_meet(const WasabiPosterior& wp);

/// Meet-cluster-level similarity: entry (a, b) is the total weight of the
/// particles in which meet clusters a and b share a cluster.
Psm wasabi_psm(const WasabiPosterior& wp, const MeetDecomposition& md);
Psm wasabi_psm(const WasabiPosterior& wp);

/// Expected-VI contributions of p against the particle mixture, grouped by
/// the clusters of meet(particles, p); items of a group share one value.
/// When p is a particle the groups are the particles' meet clusters.
struct GroupedContribution {
    Partition groups;
    /// Contribution of a single item of each group.
    std::vector<double> per_item;
    std::vector<std::size_t> sizes;

    double total() const;
    std::vector<double> expand() const;
};

GroupedContribution evic_wasabi(const Partition& p, const WasabiPosterior& wp);

/// Indices of the draws in region l; throws if the region is empty or l is
/// not a particle.
std::vector<std::size_t> region_members(const SampleSet& s, const WasabiPosterior& wp, std::size_t l);

Psm region_psm(const SampleSet& s, const WasabiPosterior& wp, std::size_t l);

/// Mean VI of region l's draws to particle l; divided by log2(n) when
/// normalized.
double region_evi(const SampleSet& s, const WasabiPosterior& wp, std::size_t l, bool normalized = false);

/// Per-item EVI contributions of particle l against the draws of its own
/// region only.
std::vector<double> region_evic(const SampleSet& s, const WasabiPosterior& wp, std::size_t l);

struct ParticleComparison {
    std::size_t a = 0;
    std::size_t b = 0;
    double vi = 0.0;
    std::vector<double> vic;
    std::map<std::pair<Label, Label>, double> vicg;
};

ParticleComparison compare_particles(const WasabiPosterior& wp, std::size_t a, std::size_t b);

enum class EvicSource { wasabi, mcmc };

struct DiagnosticsOptions {
    EvicSource evic_source = EvicSource::wasabi;
    /// Item-level PSM of every region, plus the mixture identity check
    /// against the full PSM. Quadratic in n.
    bool region_psms = false;
};

struct DiagnosticsReport {
    MeetDecomposition meet;
    Psm collapsed_psm{0, PsmLevel::meet_cluster};
    EvicSource evic_source = EvicSource::wasabi;
    /// Per-item EVIC of every particle, [l][i].
    std::vector<std::vector<double>> particle_evic;
    std::vector<double> region_evi;
    std::vector<double> region_evi_normalized;
    std::vector<Psm> region_psms;
    std::vector<ParticleComparison> comparisons;
    /// max |sum_l w_l region_evi(l) - W|.
    double evi_identity_gap = 0.0;
    /// max entrywise |PSM - sum_l w_l region_psm(l)|, when region PSMs are on.
    std::optional<double> psm_identity_gap;
};

/// Builds every diagnostic and checks the mixture identities; throws
/// InvariantError when one is off by more than 1e-9.
DiagnosticsReport diagnose(const SampleSet& s, const WasabiPosterior& wp, const DiagnosticsOptions& options = {});

}  // namespace wasabi
