#include "wasabi/algorithm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "wasabi/errors.hpp"
#include "wasabi/parallel.hpp"

namespace wasabi {

namespace {

// Distances closer than this are exact ties for region assignment.
constexpr double kTieTol = 1e-10;
// Total assigned VI (bits, summed over draws) an outlier swap must save.
constexpr double kSwapGain = 1e-9;
// Thinned pools smaller than this fall back to every draw.
constexpr std::size_t kMinThinnedPool = 100;

// VI from every distinct draw to every particle, [u * L + l].
class DistanceTable {
public:
    DistanceTable(const SampleSet& s, std::span<const Partition> particles)
        : s_(&s), width_(particles.size()), d_(s.unique_count() * particles.size()) {
        for (std::size_t l = 0; l < width_; ++l) set_column(l, particles[l]);
    }

    void set_column(std::size_t l, const Partition& p) {
        ViEvaluator vi(p);
        for (std::size_t u = 0; u < s_->unique_count(); ++u) d_[u * width_ + l] = vi(s_->unique_partition(u));
    }

    double operator()(std::size_t t, std::size_t l) const { return d_[s_->unique_of(t) * width_ + l]; }
    double nearest(std::size_t t) const {
        const double* row = d_.data() + s_->unique_of(t) * width_;
        return *std::min_element(row, row + width_);
    }
    std::size_t width() const { return width_; }

private:
    const SampleSet* s_;
    std::size_t width_;
    std::vector<double> d_;
};

std::optional<std::size_t> sample_proportional(std::span<const double> weights, Rng& rng) {
    double total = 0.0;
    for (const double w : weights) total += w;
    if (!(total > 0.0)) return std::nullopt;
    const double target = std::uniform_real_distribution<double>(0.0, total)(rng);
    double acc = 0.0;
    std::optional<std::size_t> last;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        acc += weights[i];
        last = i;
        if (target < acc) return i;
    }
    return last;
}

std::vector<std::size_t> assign_nearest(const SampleSet& s, const DistanceTable& dist, Rng& rng) {
    std::vector<std::size_t> out(s.size());
    std::vector<std::size_t> ties;
    for (std::size_t t = 0; t < s.size(); ++t) {
        const double best = dist.nearest(t);
        ties.clear();
        for (std::size_t l = 0; l < dist.width(); ++l) {
            if (dist(t, l) <= best + kTieTol) ties.push_back(l);
        }
        if (ties.size() == 1) {
            out[t] = ties.front();
        } else {
            out[t] = ties[std::uniform_int_distribution<std::size_t>(0, ties.size() - 1)(rng)];
        }
    }
    return out;
}

std::vector<std::size_t> region_sizes(std::span<const std::size_t> assignments, std::size_t regions) {
    std::vector<std::size_t> sizes(regions, 0);
    for (const std::size_t a : assignments) ++sizes[a];
    return sizes;
}

// Empty regions take over a draw sampled proportionally to its VI from the
// stranded particle. Only draws whose region keeps another member qualify.
void refill_empty(const SampleSet& s, std::vector<Partition>& particles, DistanceTable& dist,
                  std::vector<std::size_t>& assignments, std::vector<std::size_t>& sizes, Rng& rng,
                  std::vector<std::size_t>& refilled) {
    for (std::size_t l = 0; l < particles.size(); ++l) {
        if (sizes[l] > 0) continue;
        std::vector<double> weights(s.size(), 0.0);
        for (std::size_t t = 0; t < s.size(); ++t) {
            if (sizes[assignments[t]] > 1) weights[t] = dist(t, l);
        }
        auto pick = sample_proportional(weights, rng);
        if (!pick) {
            for (std::size_t t = 0; t < s.size(); ++t) weights[t] = sizes[assignments[t]] > 1 ? 1.0 : 0.0;
            pick = sample_proportional(weights, rng);
        }
        if (!pick) throw InvariantError("cannot refill an empty region: fewer draws than particles");
        --sizes[assignments[*pick]];
        assignments[*pick] = l;
        sizes[l] = 1;
        particles[l] = s[*pick];
        dist.set_column(l, particles[l]);
        refilled.push_back(l);
    }
}

double total_assigned(const SampleSet& s, const DistanceTable& dist, std::span<const std::size_t> assignments) {
    double acc = 0.0;
    for (std::size_t t = 0; t < s.size(); ++t) acc += dist(t, assignments[t]);
    return acc;
}

SampleSet init_pool(const SampleSet& s, std::size_t thin) {
    if (thin > 1 && s.size() / thin >= kMinThinnedPool) return s.thinned(thin);
    return s;
}

std::vector<Partition> dedupe(std::vector<Partition> parts) {
    std::vector<Partition> out;
    for (auto& p : parts) {
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(std::move(p));
    }
    return out;
}

void check_fixed(const SampleSet& s, const WasabiConfig& cfg) {
    if (cfg.fixed.size() != cfg.particles) {
        throw std::invalid_argument("fixed initialization supplies " + std::to_string(cfg.fixed.size()) +
                                    " partitions for " + std::to_string(cfg.particles) + " particles");
    }
    for (const auto& p : cfg.fixed) {
        if (p.n() != s.n()) throw std::invalid_argument("fixed initial partition covers a different item count");
    }
}

}  // namespace

double resolve_epsilon(const WasabiConfig& cfg, std::size_t n) {
    if (cfg.epsilon) {
        if (!(*cfg.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
        return *cfg.epsilon;
    }
    return std::max(1e-4 * std::log2(static_cast<double>(n)), 1e-12);
}

std::vector<Partition> plusplus_seed(const SampleSet& pool, std::vector<Partition> chosen, std::size_t count,
                                     Rng& rng) {
    if (pool.empty()) throw std::invalid_argument("k-means++ seeding needs at least one draw");
    std::vector<double> nearest(pool.unique_count(), std::numeric_limits<double>::infinity());
    for (const auto& c : chosen) {
        ViEvaluator vi(c);
        for (std::size_t u = 0; u < pool.unique_count(); ++u) {
            nearest[u] = std::min(nearest[u], vi(pool.unique_partition(u)));
        }
    }
    std::vector<double> weights(pool.unique_count());
    while (chosen.size() < count) {
        std::size_t pick = 0;
        if (chosen.empty()) {
            const std::size_t t = std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng);
            pick = pool.unique_of(t);
        } else {
            for (std::size_t u = 0; u < pool.unique_count(); ++u) {
                weights[u] = nearest[u] > kZeroDistanceTol ? nearest[u] * static_cast<double>(pool.multiplicity(u)) : 0.0;
            }
            const auto sampled = sample_proportional(weights, rng);
            if (!sampled) {
                throw std::invalid_argument("only " + std::to_string(chosen.size()) +
                                            " distinct draws available for " + std::to_string(count) +
                                            " particles");
            }
            pick = *sampled;
        }
        chosen.push_back(pool.unique_partition(pick));
        ViEvaluator vi(chosen.back());
        for (std::size_t u = 0; u < pool.unique_count(); ++u) {
            nearest[u] = std::min(nearest[u], vi(pool.unique_partition(u)));
        }
    }
    return chosen;
}

std::vector<Partition> initialize(const SampleSet& s, const WasabiConfig& cfg, Rng& rng) {
    if (s.empty()) throw std::invalid_argument("cannot initialize from an empty sample set");
    if (cfg.particles < 1) throw std::invalid_argument("need at least one particle");
    const std::size_t count = cfg.particles;

    switch (cfg.init) {
        case InitMethod::fixed:
            check_fixed(s, cfg);
            return cfg.fixed;
        case InitMethod::plusplus: {
            const SampleSet pool = init_pool(s, cfg.init_thin);
            if (pool.unique_count() >= count) return plusplus_seed(pool, {}, count, rng);
            return plusplus_seed(s, {}, count, rng);
        }
        case InitMethod::average:
        case InitMethod::complete:
        case InitMethod::topvi: {
            const std::size_t k_max = resolve_k_max(cfg.search, s);
            const Psm similarity = psm(s);
            std::vector<Partition> candidates;
            if (cfg.init != InitMethod::complete) {
                candidates = linkage_candidates(similarity, Linkage::average, k_max);
            }
            if (cfg.init != InitMethod::average) {
                for (auto& p : linkage_candidates(similarity, Linkage::complete, k_max)) candidates.push_back(std::move(p));
            }
            if (cfg.init == InitMethod::topvi) {
                for (const auto& p : cfg.fixed) {
                    if (p.n() != s.n()) throw std::invalid_argument("topvi candidate covers a different item count");
                    candidates.push_back(p);
                }
                candidates = dedupe(std::move(candidates));
            }
            if (candidates.size() < count) {
                throw std::invalid_argument("initialization yields " + std::to_string(candidates.size()) +
                                            " distinct candidates for " + std::to_string(count) + " particles");
            }
            return top_candidates_by_evi(candidates, init_pool(s, cfg.init_thin), count);
        }
    }
    throw std::invalid_argument("unknown initialization method");
}

NUpdateResult n_update(const SampleSet& s, std::vector<Partition>& particles, Rng& rng, bool outlier_check) {
    if (particles.empty()) throw std::invalid_argument("n_update needs at least one particle");
    if (s.empty()) throw std::invalid_argument("n_update needs at least one draw");
    for (const auto& p : particles) {
        if (p.n() != s.n()) throw std::invalid_argument("particle covers a different item count than the draws");
    }
    const std::size_t count = particles.size();
    NUpdateResult out;
    DistanceTable dist(s, particles);
    out.assignments = assign_nearest(s, dist, rng);
    auto sizes = region_sizes(out.assignments, count);
    refill_empty(s, particles, dist, out.assignments, sizes, rng, out.refilled);

    if (!outlier_check || count < 2) return out;
    std::vector<double> weights(s.size());
    for (std::size_t l = 0; l < count; ++l) {
        if (sizes[l] != 1) continue;
        for (std::size_t t = 0; t < s.size(); ++t) weights[t] = dist.nearest(t);
        const auto pick = sample_proportional(weights, rng);
        if (!pick) continue;

        const Partition candidate = s[*pick];
        std::vector<Partition> trial = particles;
        trial[l] = candidate;
        DistanceTable trial_dist = dist;
        trial_dist.set_column(l, candidate);
        double trial_total = 0.0;
        for (std::size_t t = 0; t < s.size(); ++t) trial_total += trial_dist.nearest(t);
        if (trial_total < total_assigned(s, dist, out.assignments) - kSwapGain) {
            particles = std::move(trial);
            dist = std::move(trial_dist);
            out.assignments = assign_nearest(s, dist, rng);
            sizes = region_sizes(out.assignments, count);
            refill_empty(s, particles, dist, out.assignments, sizes, rng, out.refilled);
            ++out.outlier_swaps;
        }
    }
    return out;
}

VISearchResult vi_search_step(const SampleSet& s, std::span<const Partition> particles,
                              std::span<const std::size_t> assignments, const SearchConfig& cfg) {
    if (assignments.size() != s.size()) throw std::invalid_argument("one region assignment per draw required");
    const std::size_t count = particles.size();
    std::vector<std::vector<std::size_t>> members(count);
    for (std::size_t t = 0; t < assignments.size(); ++t) {
        if (assignments[t] >= count) throw std::invalid_argument("assignment names a missing particle");
        members[assignments[t]].push_back(t);
    }
    for (std::size_t l = 0; l < count; ++l) {
        if (members[l].empty()) {
            throw std::invalid_argument("region " + std::to_string(l) + " is empty; run n_update first");
        }
    }

    SearchConfig inner = cfg;
    inner.k_max = resolve_k_max(cfg, s);
    VISearchResult out{std::vector<Partition>(count), std::vector<double>(count)};
    parallel_for(count, [&](std::size_t l) {
        SearchConfig own = inner;
        own.seed = derive_seed(cfg.seed, l);
        const SampleSet region = s.subset(members[l]);
        auto found = minvi_search(region, own, particles.subspan(l, 1));
        out.particles[l] = std::move(found.partition);
        out.per_particle_evi[l] = found.expected_vi;
    });
    return out;
}

double assigned_cost(const SampleSet& s, std::span<const Partition> particles,
                     std::span<const std::size_t> assignments) {
    if (assignments.size() != s.size()) throw std::invalid_argument("one region assignment per draw required");
    const DistanceTable dist(s, particles);
    return total_assigned(s, dist, assignments) / static_cast<double>(s.size());
}

namespace {

struct Snapshot {
    std::vector<Partition> particles;
    std::vector<std::size_t> assignments;
    std::vector<double> per_particle_evi;
    double wasserstein = std::numeric_limits<double>::infinity();
};

double weighted_loss(std::span<const std::size_t> assignments, std::span<const double> evi) {
    const auto sizes = region_sizes(assignments, evi.size());
    double w = 0.0;
    for (std::size_t l = 0; l < evi.size(); ++l) {
        w += static_cast<double>(sizes[l]) / static_cast<double>(assignments.size()) * evi[l];
    }
    return w;
}

// One start: optional mini-batch stage, full-sample iterations, then a final
// nearest reassignment of the best state found.
WasabiPosterior single_start(const SampleSet& s, const WasabiConfig& cfg, std::vector<Partition> particles, Rng& rng,
                             double epsilon) {
    WasabiPosterior post;
    const std::size_t count = particles.size();

    std::size_t full_iters = cfg.max_iter;
    if (cfg.minibatch) {
        const std::size_t batch = std::min(*cfg.minibatch, s.size());
        std::optional<double> previous;
        for (std::size_t it = 0; it < cfg.max_iter; ++it) {
            const SampleSet sub = subsample(s, batch, rng());
            if (sub.unique_count() < count) break;
            const auto nu = n_update(sub, particles, rng, cfg.outlier_check);
            SearchConfig search = cfg.search;
            search.seed = rng();
            auto vs = vi_search_step(sub, particles, nu.assignments, search);
            particles = std::move(vs.particles);
            const double w = weighted_loss(nu.assignments, vs.per_particle_evi);
            post.trace.push_back(w);
            ++post.minibatch_iterations;
            if (previous && std::abs(w - *previous) < epsilon) break;
            previous = w;
        }
        full_iters = std::min<std::size_t>(5, cfg.max_iter);
    }

    Snapshot best;
    std::optional<double> previous;
    for (std::size_t it = 0; it < full_iters; ++it) {
        const auto nu = n_update(s, particles, rng, cfg.outlier_check);
        SearchConfig search = cfg.search;
        search.seed = rng();
        auto vs = vi_search_step(s, particles, nu.assignments, search);
        particles = vs.particles;
        const double w = weighted_loss(nu.assignments, vs.per_particle_evi);
        post.trace.push_back(w);
        if (w < best.wasserstein) {
            best = {vs.particles, nu.assignments, vs.per_particle_evi, w};
        }
        if (previous && std::abs(w - *previous) < epsilon) {
            post.converged = true;
            break;
        }
        previous = w;
    }

    // Reassigning the best particles to their nearest draws can only lower W.
    const DistanceTable dist(s, best.particles);
    auto nearest = assign_nearest(s, dist, rng);
    const auto sizes = region_sizes(nearest, count);
    if (std::all_of(sizes.begin(), sizes.end(), [](std::size_t z) { return z > 0; })) {
        std::vector<double> evi(count, 0.0);
        for (std::size_t t = 0; t < s.size(); ++t) evi[nearest[t]] += dist(t, nearest[t]);
        for (std::size_t l = 0; l < count; ++l) evi[l] /= static_cast<double>(sizes[l]);
        const double w = weighted_loss(nearest, evi);
        if (w < best.wasserstein) best = {best.particles, std::move(nearest), std::move(evi), w};
    }

    post.particles = std::move(best.particles);
    post.assignments = std::move(best.assignments);
    post.per_particle_evi = std::move(best.per_particle_evi);
    post.wasserstein = best.wasserstein;
    const auto final_sizes = region_sizes(post.assignments, count);
    post.weights.resize(count);
    for (std::size_t l = 0; l < count; ++l) {
        post.weights[l] = static_cast<double>(final_sizes[l]) / static_cast<double>(s.size());
    }
    return post;
}

// Descending weight, then ascending cluster count.
void order_particles(WasabiPosterior& post) {
    const std::size_t count = post.particles.size();
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (post.weights[a] != post.weights[b]) return post.weights[a] > post.weights[b];
        return post.particles[a].k() < post.particles[b].k();
    });
    std::vector<std::size_t> rank(count);
    for (std::size_t r = 0; r < count; ++r) rank[order[r]] = r;

    WasabiPosterior sorted = post;
    for (std::size_t r = 0; r < count; ++r) {
        sorted.particles[r] = post.particles[order[r]];
        sorted.weights[r] = post.weights[order[r]];
        sorted.per_particle_evi[r] = post.per_particle_evi[order[r]];
    }
    for (auto& a : sorted.assignments) a = rank[a];
    post = std::move(sorted);
}

}  // namespace

WasabiPosterior run(const SampleSet& s, const WasabiConfig& cfg) {
    if (s.empty()) throw std::invalid_argument("WASABI needs at least one draw");
    if (cfg.particles < 1) throw std::invalid_argument("need at least one particle");
    if (cfg.runs < 1) throw std::invalid_argument("runs must be >= 1");
    if (cfg.max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
    if (cfg.minibatch && *cfg.minibatch < 1) throw std::invalid_argument("mini-batch size must be >= 1");
    if (cfg.init == InitMethod::fixed) check_fixed(s, cfg);
    const double epsilon = resolve_epsilon(cfg, s.n());

    WasabiConfig effective = cfg;
    std::vector<std::string> warnings;
    if (cfg.particles > s.unique_count()) {
        effective.particles = s.unique_count();
        warnings.push_back("requested " + std::to_string(cfg.particles) + " particles but the draws hold only " +
                           std::to_string(s.unique_count()) + " distinct partitions; using " +
                           std::to_string(effective.particles));
        if (cfg.init == InitMethod::fixed) {
            effective.fixed = dedupe(cfg.fixed);
            effective.fixed.resize(std::min(effective.fixed.size(), effective.particles));
            if (effective.fixed.size() < effective.particles) effective.init = InitMethod::plusplus;
        }
    }
    effective.search.k_max = resolve_k_max(cfg.search, s);

    std::vector<WasabiPosterior> results(cfg.runs);
    parallel_for(cfg.runs, [&](std::size_t r) {
        Rng rng(derive_seed(cfg.seed, r));
        std::vector<Partition> start;
        if (r == 0) {
            start = initialize(s, effective, rng);
        } else {
            WasabiConfig alt = effective;
            alt.init = InitMethod::plusplus;
            start = initialize(s, alt, rng);
        }
        results[r] = single_start(s, effective, std::move(start), rng, epsilon);
        results[r].run = r;
    });

    std::size_t winner = 0;
    for (std::size_t r = 1; r < results.size(); ++r) {
        if (results[r].wasserstein < results[winner].wasserstein) winner = r;
    }
    WasabiPosterior best = std::move(results[winner]);
    order_particles(best);
    best.warnings = std::move(warnings);
    return best;
}

std::vector<ElbowEntry> elbow(const SampleSet& s, std::span<const std::size_t> particle_counts,
                              const WasabiConfig& cfg) {
    if (particle_counts.empty()) throw std::invalid_argument("elbow needs at least one particle count");
    for (std::size_t i = 0; i < particle_counts.size(); ++i) {
        if (particle_counts[i] < 1) throw std::invalid_argument("particle counts must be >= 1");
        if (i > 0 && particle_counts[i] <= particle_counts[i - 1]) {
            throw std::invalid_argument("particle counts must be strictly ascending");
        }
    }

    std::vector<ElbowEntry> entries;
    for (const std::size_t count : particle_counts) {
        WasabiConfig c = cfg;
        c.particles = count;
        WasabiPosterior result = run(s, c);

        if (!entries.empty()) {
            const WasabiPosterior& previous = entries.back().posterior;
            Rng rng(derive_seed(cfg.seed ^ 0xe1b0e1b0ULL, count));
            const std::size_t target = std::min(count, s.unique_count());
            std::optional<WasabiPosterior> warm;
            if (target > previous.size()) {
                try {
                    WasabiConfig w = c;
                    w.init = InitMethod::fixed;
                    w.fixed = plusplus_seed(s, previous.particles, target, rng);
                    w.particles = target;
                    w.runs = 1;
                    w.minibatch.reset();
                    warm = run(s, w);
                } catch (const std::invalid_argument&) {
                    // Every draw already coincides with a previous particle.
                    warm = previous;
                }
            } else {
                warm = previous;
            }
            if (warm->wasserstein < result.wasserstein) {
                auto warnings = std::move(result.warnings);
                result = std::move(*warm);
                result.warnings = std::move(warnings);
            }
        }
        const double w = result.wasserstein;
        entries.push_back({count, w, std::move(result)});
    }
    return entries;
}

}  // namespace wasabi
