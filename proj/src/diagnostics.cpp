#include "wasabi/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "wasabi/errors.hpp"

namespace wasabi {

namespace {

constexpr double kIdentityTol = 1e-9;

void require_particle(const WasabiPosterior& wp, std::size_t l) {
    if (l >= wp.size()) {
        throw std::invalid_argument("particle index " + std::to_string(l) + " out of range (L=" +
                                    std::to_string(wp.size()) + ")");
    }
}

}  // namespace

MeetDecomposition decompose_meet(std::span<const Partition> parts) {
    MeetDecomposition md;
    md.meet = meet(parts);
    md.meet_sizes = md.meet.sizes();
    md.cluster_map.assign(parts.size(), std::vector<Label>(md.meet.k(), -1));
    for (std::size_t l = 0; l < parts.size(); ++l) {
        for (std::size_t i = 0; i < md.meet.n(); ++i) {
            Label& slot = md.cluster_map[l][static_cast<std::size_t>(md.meet[i])];
            if (slot < 0) {
                slot = parts[l][i];
            } else if (slot != parts[l][i]) {
                throw InvariantError("meet cluster straddles two clusters of a particle");
            }
        }
    }
    return md;
}

MeetDecomposition particles_meet(const WasabiPosterior& wp) {
    if (wp.particles.empty()) throw std::invalid_argument("posterior has no particles");
    return decompose_meet(wp.particles);
}

Psm wasabi_psm(const WasabiPosterior& wp, const MeetDecomposition& md) {
    const std::size_t m = md.meet.k();
    Psm out(m, PsmLevel::meet_cluster);
    for (std::size_t l = 0; l < wp.size(); ++l) {
        const auto& map = md.cluster_map[l];
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t b = 0; b < m; ++b) {
                if (map[a] == map[b]) out.at(a, b) += wp.weights[l];
            }
        }
    }
    return out;
}

Psm wasabi_psm(const WasabiPosterior& wp) { return wasabi_psm(wp, particles_meet(wp)); }

double GroupedContribution::total() const {
    double acc = 0.0;
    for (std::size_t g = 0; g < per_item.size(); ++g) acc += per_item[g] * static_cast<double>(sizes[g]);
    return acc;
}

std::vector<double> GroupedContribution::expand() const {
    std::vector<double> out(groups.n());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = per_item[static_cast<std::size_t>(groups[i])];
    return out;
}

GroupedContribution evic_wasabi(const Partition& p, const WasabiPosterior& wp) {
    if (wp.particles.empty()) throw std::invalid_argument("posterior has no particles");
    if (p.n() != wp.particles.front().n()) {
        throw std::invalid_argument("partition covers a different item count than the particles");
    }
    std::vector<Partition> parts = wp.particles;
    parts.push_back(p);

    GroupedContribution out;
    out.groups = meet(parts);
    out.sizes = out.groups.sizes();
    out.per_item.assign(out.groups.k(), 0.0);

    std::vector<std::size_t> representative(out.groups.k(), p.n());
    for (std::size_t i = 0; i < p.n(); ++i) {
        auto& r = representative[static_cast<std::size_t>(out.groups[i])];
        if (r == p.n()) r = i;
    }
    for (std::size_t l = 0; l < wp.size(); ++l) {
        const auto vic = vi_contribution(p, wp.particles[l]);
        for (std::size_t g = 0; g < out.per_item.size(); ++g) out.per_item[g] += wp.weights[l] * vic[representative[g]];
    }
    return out;
}

std::vector<std::size_t> region_members(const SampleSet& s, const WasabiPosterior& wp, std::size_t l) {
    require_particle(wp, l);
    if (wp.assignments.size() != s.size()) {
        throw std::invalid_argument("posterior assignments do not match the sample set");
    }
    std::vector<std::size_t> members;
    for (std::size_t t = 0; t < s.size(); ++t) {
        if (wp.assignments[t] == l) members.push_back(t);
    }
    if (members.empty()) throw std::invalid_argument("region " + std::to_string(l) + " is empty");
    return members;
}

Psm region_psm(const SampleSet& s, const WasabiPosterior& wp, std::size_t l) {
    return psm(s.subset(region_members(s, wp, l)));
}

double region_evi(const SampleSet& s, const WasabiPosterior& wp, std::size_t l, bool normalized) {
    const double evi = expected_vi(wp.particles[l], s.subset(region_members(s, wp, l)));
    if (!normalized) return evi;
    const double bound = std::log2(static_cast<double>(s.n()));
    return bound > 0.0 ? evi / bound : 0.0;
}

std::vector<double> region_evic(const SampleSet& s, const WasabiPosterior& wp, std::size_t l) {
    return evi_contribution_mcmc(wp.particles[l], s.subset(region_members(s, wp, l)));
}

ParticleComparison compare_particles(const WasabiPosterior& wp, std::size_t a, std::size_t b) {
    require_particle(wp, a);
    require_particle(wp, b);
    if (a == b) throw std::invalid_argument("compare_particles needs two different particles");
    const Partition& pa = wp.particles[a];
    const Partition& pb = wp.particles[b];
    return {a, b, vi_distance(pa, pb), vi_contribution(pa, pb), vi_contribution_by_group(pa, pb)};
}

DiagnosticsReport diagnose(const SampleSet& s, const WasabiPosterior& wp, const DiagnosticsOptions& options) {
    if (wp.assignments.size() != s.size()) {
        throw std::invalid_argument("posterior assignments do not match the sample set");
    }
    DiagnosticsReport report;
    report.meet = particles_meet(wp);
    report.collapsed_psm = wasabi_psm(wp, report.meet);
    report.evic_source = options.evic_source;

    for (std::size_t l = 0; l < wp.size(); ++l) {
        if (options.evic_source == EvicSource::wasabi) {
            report.particle_evic.push_back(evic_wasabi(wp.particles[l], wp).expand());
        } else {
            report.particle_evic.push_back(evi_contribution_mcmc(wp.particles[l], s));
        }
        report.region_evi.push_back(region_evi(s, wp, l, false));
        report.region_evi_normalized.push_back(region_evi(s, wp, l, true));
    }

    double mixture = 0.0;
    for (std::size_t l = 0; l < wp.size(); ++l) mixture += wp.weights[l] * report.region_evi[l];
    report.evi_identity_gap = std::abs(mixture - wp.wasserstein);
    if (report.evi_identity_gap > kIdentityTol * std::max(1.0, wp.wasserstein)) {
        throw InvariantError("sum of weighted region EVIs differs from W by " +
                             std::to_string(report.evi_identity_gap));
    }

    if (options.region_psms) {
        const Psm full = psm(s);
        std::vector<double> mixed(full.values().size(), 0.0);
        for (std::size_t l = 0; l < wp.size(); ++l) {
            report.region_psms.push_back(region_psm(s, wp, l));
            const auto& v = report.region_psms.back().values();
            for (std::size_t x = 0; x < v.size(); ++x) mixed[x] += wp.weights[l] * v[x];
        }
        double gap = 0.0;
        for (std::size_t x = 0; x < mixed.size(); ++x) gap = std::max(gap, std::abs(mixed[x] - full.values()[x]));
        report.psm_identity_gap = gap;
        if (gap > kIdentityTol) throw InvariantError("region PSM mixture differs from the PSM by " + std::to_string(gap));
    }

    for (std::size_t a = 0; a < wp.size(); ++a) {
        for (std::size_t b = a + 1; b < wp.size(); ++b) report.comparisons.push_back(compare_particles(wp, a, b));
    }
    return report;
}

}  // namespace wasabi
