#include "wasabi/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

#include "wasabi/parallel.hpp"
#include "wasabi/rng.hpp"

namespace wasabi {

namespace {

// Moves must improve the allocation score by more than this (bits * n).
constexpr double kMoveTolerance = 1e-10;

double xlog2x(std::size_t x) {
    if (x == 0) return 0.0;
    const auto d = static_cast<double>(x);
    return d * std::log2(d);
}

// Read-only view of the distinct draws laid out item-major, shared by all
// restarts of one search.
struct SearchData {
    std::size_t n = 0;
    std::size_t distinct = 0;
    std::vector<double> weight;          // 2 * multiplicity / T
    std::vector<Label> item_labels;      // [i * distinct + u]
    std::vector<std::size_t> draw_k;     // clusters per distinct draw
    std::vector<std::size_t> row_start;  // prefix sums of draw_k
    std::vector<double> f;               // x log2 x for x in 0..n
    std::vector<double> g;               // f(x + 1) - f(x)
    double draw_term = 0.0;              // (1/T) sum_u m_u sum_c f(n_uc)

    explicit SearchData(const SampleSet& s)
        : n(s.n()), distinct(s.unique_count()), f(s.n() + 2), g(s.n() + 1) {
        const auto total = static_cast<double>(s.size());
        weight.resize(distinct);
        draw_k.resize(distinct);
        row_start.resize(distinct + 1, 0);
        item_labels.resize(n * distinct);
        for (std::size_t x = 0; x < f.size(); ++x) f[x] = xlog2x(x);
        for (std::size_t x = 0; x < g.size(); ++x) g[x] = f[x + 1] - f[x];
        for (std::size_t u = 0; u < distinct; ++u) {
            const Partition& p = s.unique_partition(u);
            const auto m = static_cast<double>(s.multiplicity(u));
            weight[u] = 2.0 * m / total;
            draw_k[u] = p.k();
            row_start[u + 1] = row_start[u] + p.k();
            double entropy_part = 0.0;
            for (const std::size_t sz : p.sizes()) entropy_part += f[sz];
            draw_term += m * entropy_part / total;
            for (std::size_t i = 0; i < n; ++i) item_labels[i * distinct + u] = p[i];
        }
    }
};

// Mutable allocation of items to at most k_cap cluster slots, with the
// contingency counts against every distinct draw kept current.
class AllocationState {
public:
    AllocationState(const SearchData& data, std::size_t k_cap, std::size_t k_max)
        : data_(data),
          k_cap_(k_cap),
          k_max_(k_max),
          counts_(data.row_start.back() * k_cap, 0),
          sizes_(k_cap, 0),
          labels_(data.n, -1),
          scores_(k_cap, 0.0) {}

    void load(const Partition& p) {
        for (std::size_t i = 0; i < p.n(); ++i) allocate(i, static_cast<std::size_t>(p[i]));
    }

    void allocate(std::size_t i, std::size_t slot) {
        labels_[i] = static_cast<Label>(slot);
        if (sizes_[slot]++ == 0) ++nonempty_;
        hi_ = std::max(hi_, slot + 1);
        const Label* item = data_.item_labels.data() + i * data_.distinct;
        for (std::size_t u = 0; u < data_.distinct; ++u) {
            ++counts_[(data_.row_start[u] + static_cast<std::size_t>(item[u])) * k_cap_ + slot];
        }
    }

    void release(std::size_t i) {
        const auto slot = static_cast<std::size_t>(labels_[i]);
        labels_[i] = -1;
        if (--sizes_[slot] == 0) --nonempty_;
        while (hi_ > 0 && sizes_[hi_ - 1] == 0) --hi_;
        const Label* item = data_.item_labels.data() + i * data_.distinct;
        for (std::size_t u = 0; u < data_.distinct; ++u) {
            --counts_[(data_.row_start[u] + static_cast<std::size_t>(item[u])) * k_cap_ + slot];
        }
    }

    // Slot that minimizes the score of adding (unallocated) item i. `stay` is
    // the slot the item came from, preferred unless another slot is strictly
    // better.
    std::size_t best_slot(std::size_t i, std::optional<std::size_t> stay) {
        const std::size_t width = hi_;
        const double* g = data_.g.data();
        for (std::size_t b = 0; b < width; ++b) scores_[b] = g[sizes_[b]];
        const Label* item = data_.item_labels.data() + i * data_.distinct;
        for (std::size_t u = 0; u < data_.distinct; ++u) {
            const uint32_t* row = counts_.data() + (data_.row_start[u] + static_cast<std::size_t>(item[u])) * k_cap_;
            const double w = data_.weight[u];
            for (std::size_t b = 0; b < width; ++b) scores_[b] -= w * g[row[b]];
        }

        std::optional<std::size_t> fresh;
        if (stay && sizes_[*stay] == 0) {
            fresh = stay;
        } else if (nonempty_ < k_max_) {
            for (std::size_t b = 0; b < k_cap_; ++b) {
                if (sizes_[b] == 0) {
                    fresh = b;
                    break;
                }
            }
        }

        std::optional<std::size_t> best;
        double best_score = std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < width; ++b) {
            const bool candidate = sizes_[b] > 0 || (fresh && *fresh == b);
            if (candidate && scores_[b] < best_score) {
                best_score = scores_[b];
                best = b;
            }
        }
        if (fresh && *fresh >= width && 0.0 < best_score) {
            best_score = 0.0;
            best = fresh;
        }
        if (!best) throw std::logic_error("allocation has no admissible cluster");
        if (stay) {
            const double stay_score = *stay < width ? scores_[*stay] : 0.0;
            if (!(best_score < stay_score - kMoveTolerance)) return *stay;
        }
        return *best;
    }

    double expected_vi() const {
        double acc = data_.draw_term;
        for (std::size_t b = 0; b < k_cap_; ++b) acc += data_.f[sizes_[b]];
        for (std::size_t u = 0; u < data_.distinct; ++u) {
            const uint32_t* block = counts_.data() + data_.row_start[u] * k_cap_;
            double joint = 0.0;
            for (std::size_t x = 0; x < data_.draw_k[u] * k_cap_; ++x) joint += data_.f[block[x]];
            acc -= data_.weight[u] * joint;
        }
        return std::max(0.0, acc / static_cast<double>(data_.n));
    }

    Partition partition() const { return Partition::canonicalize(labels_); }
    Label label(std::size_t i) const { return labels_[i]; }

private:
    const SearchData& data_;
    std::size_t k_cap_;
    std::size_t k_max_;
    std::vector<uint32_t> counts_;
    std::vector<std::size_t> sizes_;
    std::vector<Label> labels_;
    std::vector<double> scores_;
    std::size_t nonempty_ = 0;
    std::size_t hi_ = 0;
};

struct RunOutcome {
    Partition partition;
    double expected_vi = std::numeric_limits<double>::infinity();
    std::vector<double> trace;
};

void sweep_until_stable(AllocationState& state, std::span<const std::size_t> order, std::size_t max_sweeps,
                        std::vector<double>& trace) {
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        bool moved = false;
        for (const std::size_t i : order) {
            const std::size_t from = static_cast<std::size_t>(state.label(i));
            state.release(i);
            const std::size_t to = state.best_slot(i, from);
            state.allocate(i, to);
            moved = moved || to != from;
        }
        trace.push_back(state.expected_vi());
        if (!moved) break;
    }
}

RunOutcome finish(AllocationState& state, const SampleSet& s, std::vector<double> trace) {
    RunOutcome out;
    out.partition = state.partition();
    out.expected_vi = expected_vi(out.partition, s);
    out.trace = std::move(trace);
    return out;
}

RunOutcome sequential_run(const SearchData& data, const SampleSet& s, std::size_t k_max, std::size_t max_sweeps,
                          uint64_t seed) {
    std::vector<std::size_t> order(data.n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    AllocationState state(data, k_max, k_max);
    for (const std::size_t i : order) state.allocate(i, state.best_slot(i, std::nullopt));
    std::vector<double> trace{state.expected_vi()};
    sweep_until_stable(state, order, max_sweeps, trace);
    return finish(state, s, std::move(trace));
}

RunOutcome sweep_run(const SearchData& data, const SampleSet& s, const Partition& start, std::size_t k_max,
                     std::size_t max_sweeps, uint64_t seed) {
    std::vector<std::size_t> order(data.n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    AllocationState state(data, std::max(k_max, start.k()), k_max);
    state.load(start);
    std::vector<double> trace{state.expected_vi()};
    sweep_until_stable(state, order, max_sweeps, trace);
    return finish(state, s, std::move(trace));
}

std::optional<Partition> lowest_evi_draw(const SampleSet& s, std::size_t k_max, std::size_t budget) {
    const std::size_t distinct = s.unique_count();
    const std::size_t stride = std::max<std::size_t>(1, (distinct + budget - 1) / std::max<std::size_t>(1, budget));
    std::optional<std::size_t> best;
    double best_evi = std::numeric_limits<double>::infinity();
    for (std::size_t u = 0; u < distinct; u += stride) {
        const Partition& p = s.unique_partition(u);
        if (p.k() > k_max) continue;
        const double evi = expected_vi(p, s);
        if (evi < best_evi) {
            best_evi = evi;
            best = u;
        }
    }
    if (!best) return std::nullopt;
    return s.unique_partition(*best);
}

void validate(const SampleSet& s, const SearchConfig& cfg) {
    if (s.empty()) throw std::invalid_argument("minVI search needs at least one draw");
    if (cfg.runs < 1) throw std::invalid_argument("search runs must be >= 1");
    if (cfg.k_max && *cfg.k_max < 1) throw std::invalid_argument("k_max must be >= 1");
}

}  // namespace

std::size_t resolve_k_max(const SearchConfig& cfg, const SampleSet& s) {
    const std::size_t k = cfg.k_max ? *cfg.k_max : s.max_clusters() + 10;
    return std::min(k, std::max<std::size_t>(1, s.n()));
}

SearchResult minvi_search(const SampleSet& s, const SearchConfig& cfg, std::span<const Partition> warm_starts) {
    validate(s, cfg);
    for (const auto& w : warm_starts) {
        if (w.n() != s.n()) throw std::invalid_argument("warm start covers a different number of items");
    }
    const std::size_t k_max = resolve_k_max(cfg, s);
    if (s.n() <= cfg.exhaustive_up_to) {
        SearchResult best{{}, std::numeric_limits<double>::infinity(), 0, {}};
        for (auto& p : enumerate_partitions(s.n())) {
            if (p.k() > k_max) continue;
            const double evi = expected_vi(p, s);
            if (evi < best.expected_vi) {
                best.partition = std::move(p);
                best.expected_vi = evi;
            }
        }
        best.trace = {best.expected_vi};
        return best;
    }
    const SearchData data(s);
    const std::size_t total_runs = cfg.runs + warm_starts.size();
    std::vector<RunOutcome> outcomes(total_runs);

    parallel_for(total_runs, [&](std::size_t run) {
        const uint64_t seed = derive_seed(cfg.seed, run);
        if (run == 0) {
            if (auto start = lowest_evi_draw(s, k_max, cfg.seed_candidates)) {
                outcomes[run] = sweep_run(data, s, *start, k_max, cfg.max_sweeps, seed);
                return;
            }
            outcomes[run] = sequential_run(data, s, k_max, cfg.max_sweeps, seed);
        } else if (run < cfg.runs) {
            outcomes[run] = sequential_run(data, s, k_max, cfg.max_sweeps, seed);
        } else {
            outcomes[run] = sweep_run(data, s, warm_starts[run - cfg.runs], k_max, cfg.max_sweeps, seed);
        }
    });

    std::size_t winner = 0;
    for (std::size_t run = 1; run < total_runs; ++run) {
        if (outcomes[run].expected_vi < outcomes[winner].expected_vi) winner = run;
    }
    return {std::move(outcomes[winner].partition), outcomes[winner].expected_vi, winner,
            std::move(outcomes[winner].trace)};
}

Partition greedy_minvi(const SampleSet& s, const SearchConfig& cfg) { return minvi_search(s, cfg).partition; }

SearchResult sweeten(const SampleSet& s, const Partition& start, const SearchConfig& cfg) {
    validate(s, cfg);
    if (start.n() != s.n()) throw std::invalid_argument("start partition covers a different number of items");
    const SearchData data(s);
    auto out = sweep_run(data, s, start, resolve_k_max(cfg, s), cfg.max_sweeps, derive_seed(cfg.seed, 0));
    return {std::move(out.partition), out.expected_vi, 0, std::move(out.trace)};
}

std::vector<Partition> top_candidates_by_evi(std::span<const Partition> candidates, const SampleSet& s,
                                             std::size_t count) {
    if (candidates.size() < count) {
        throw std::invalid_argument("requested " + std::to_string(count) + " candidates but only " +
                                    std::to_string(candidates.size()) + " available");
    }
    std::vector<double> evi(candidates.size());
    parallel_for(candidates.size(), [&](std::size_t c) { evi[c] = expected_vi(candidates[c], s); });
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return evi[a] < evi[b]; });
    std::vector<Partition> out;
    out.reserve(count);
    for (std::size_t c = 0; c < count; ++c) out.push_back(candidates[order[c]]);
    return out;
}

}  // namespace wasabi
