#include "wasabi/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "wasabi/parallel.hpp"
#include "wasabi/rng.hpp"

namespace wasabi {

MixtureSpec bimodal_spec(std::size_t n, uint64_t seed) {
    MixtureSpec spec;
    spec.dims = 1;
    spec.means = {{-1.1}, {1.1}};
    spec.sds = {1.0, 1.0};
    spec.weights = {0.5, 0.5};
    spec.n = n;
    spec.seed = seed;
    return spec;
}

MixtureSpec quadrants_spec(double m, std::size_t n, uint64_t seed) {
    MixtureSpec spec;
    spec.dims = 2;
    spec.means = {{m, m}, {m, -m}, {-m, -m}, {-m, m}};
    spec.sds = {1.0, 1.0, 1.0, 1.0};
    spec.weights = {0.25, 0.25, 0.25, 0.25};
    spec.n = n;
    spec.seed = seed;
    return spec;
}

MixtureSpec truncated_spec(double sigma, std::size_t n, uint64_t seed) {
    MixtureSpec spec;
    spec.dims = 2;
    spec.means = {{0.5, 0.5}};
    spec.sds = {sigma};
    spec.weights = {1.0};
    spec.n = n;
    spec.seed = seed;
    spec.truncate_unit_cube = true;
    return spec;
}

MixtureSpec skewt_spec(double df, double gamma, std::size_t n, uint64_t seed) {
    MixtureSpec spec;
    spec.dims = 2;
    spec.means = {{0.0, 0.0}};
    spec.sds = {1.0};
    spec.weights = {1.0};
    spec.n = n;
    spec.seed = seed;
    spec.skew_t = SkewT{df, gamma};
    return spec;
}

namespace {

void validate(const MixtureSpec& spec) {
    if (spec.dims != 1 && spec.dims != 2) throw std::invalid_argument("mixture dims must be 1 or 2");
    if (spec.n < 1) throw std::invalid_argument("mixture needs n >= 1");
    const std::size_t k = spec.weights.size();
    if (k == 0 || spec.means.size() != k || spec.sds.size() != k) {
        throw std::invalid_argument("mixture needs matching, nonempty means, sds and weights");
    }
    double total = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        if (!(spec.weights[c] > 0.0)) throw std::invalid_argument("mixture weights must be positive");
        if (!(spec.sds[c] > 0.0)) throw std::invalid_argument("mixture standard deviations must be positive");
        if (spec.means[c].size() != spec.dims) throw std::invalid_argument("mean dimension does not match dims");
        total += spec.weights[c];
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("mixture weights must sum to 1");
    if (spec.skew_t && (!(spec.skew_t->df > 0.0) || !(spec.skew_t->gamma > 0.0))) {
        throw std::invalid_argument("skewed-t needs positive df and gamma");
    }
}

double skewt_draw(const SkewT& st, Rng& rng) {
    const double magnitude = std::abs(std::student_t_distribution<double>(st.df)(rng));
    const double g2 = st.gamma * st.gamma;
    const bool positive = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < g2 / (1.0 + g2);
    return positive ? magnitude * st.gamma : -magnitude / st.gamma;
}

}  // namespace

Dataset gen_mixture(const MixtureSpec& spec) {
    validate(spec);
    Rng rng(spec.seed);
    std::discrete_distribution<std::size_t> component(spec.weights.begin(), spec.weights.end());
    std::normal_distribution<double> normal(0.0, 1.0);

    Dataset data;
    data.n = spec.n;
    data.dims = spec.dims;
    data.values.resize(spec.n * spec.dims);
    data.labels.resize(spec.n);
    std::vector<double> point(spec.dims);
    for (std::size_t i = 0; i < spec.n; ++i) {
        while (true) {
            const std::size_t c = component(rng);
            bool inside = true;
            for (std::size_t d = 0; d < spec.dims; ++d) {
                const double noise = spec.skew_t ? skewt_draw(*spec.skew_t, rng) : normal(rng);
                point[d] = spec.means[c][d] + spec.sds[c] * noise;
                inside = inside && point[d] >= 0.0 && point[d] <= 1.0;
            }
            if (spec.truncate_unit_cube && !inside) continue;
            std::copy(point.begin(), point.end(), data.values.begin() + static_cast<std::ptrdiff_t>(i * spec.dims));
            data.labels[i] = static_cast<Label>(c);
            break;
        }
    }
    return data;
}

DpmHyper default_hyper(const Dataset& data, AlphaRule rule) {
    if (data.n < 2) throw std::invalid_argument("default hyperparameters need at least two points");
    DpmHyper h;
    h.k0 = 0.1;
    h.a0 = 1.5;
    h.mu0.assign(data.dims, 0.0);
    h.b0.assign(data.dims, 0.0);
    const auto n = static_cast<double>(data.n);
    for (std::size_t d = 0; d < data.dims; ++d) {
        double mean = 0.0;
        for (std::size_t i = 0; i < data.n; ++i) mean += data(i, d);
        mean /= n;
        double ss = 0.0;
        for (std::size_t i = 0; i < data.n; ++i) ss += (data(i, d) - mean) * (data(i, d) - mean);
        const double variance = ss / (n - 1.0);
        if (!(variance > 0.0)) throw std::invalid_argument("data has zero variance in dimension " + std::to_string(d));
        h.mu0[d] = mean;
        h.b0[d] = variance / 4.0;
    }
    h.alpha = rule == AlphaRule::one ? 1.0 : 2.0 / std::log(n);
    return h;
}

namespace {

// Sufficient statistics of one cluster and the Student-t posterior
// predictive they induce, per dimension.
struct ClusterStats {
    std::size_t count = 0;
    std::vector<double> sum;
    std::vector<double> sumsq;
    std::vector<double> loc;
    std::vector<double> scale2;
    std::vector<double> dof;
    std::vector<double> log_norm;
};

class Predictive {
public:
    explicit Predictive(const DpmHyper& h) : h_(h), dims_(h.mu0.size()) {}

    void reset(ClusterStats& c) const {
        c.count = 0;
        c.sum.assign(dims_, 0.0);
        c.sumsq.assign(dims_, 0.0);
        c.loc.resize(dims_);
        c.scale2.resize(dims_);
        c.dof.resize(dims_);
        c.log_norm.resize(dims_);
        refresh(c);
    }

    void refresh(ClusterStats& c) const {
        const auto m = static_cast<double>(c.count);
        const double kn = h_.k0 + m;
        const double an = h_.a0 + 0.5 * m;
        for (std::size_t d = 0; d < dims_; ++d) {
            const double mu0 = h_.mu0[d];
            double bn = h_.b0[d];
            double mun = mu0;
            if (c.count > 0) {
                const double mean = c.sum[d] / m;
                const double centered = std::max(0.0, c.sumsq[d] - m * mean * mean);
                bn += 0.5 * centered + h_.k0 * m * (mean - mu0) * (mean - mu0) / (2.0 * kn);
                mun = (h_.k0 * mu0 + c.sum[d]) / kn;
            }
            const double nu = 2.0 * an;
            const double s2 = bn * (kn + 1.0) / (an * kn);
            c.loc[d] = mun;
            c.scale2[d] = s2;
            c.dof[d] = nu;
            c.log_norm[d] = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                            0.5 * std::log(nu * std::numbers::pi * s2);
        }
    }

    double log_density(const ClusterStats& c, const double* y) const {
        double acc = 0.0;
        for (std::size_t d = 0; d < dims_; ++d) {
            const double z = y[d] - c.loc[d];
            acc += c.log_norm[d] - 0.5 * (c.dof[d] + 1.0) * std::log1p(z * z / (c.dof[d] * c.scale2[d]));
        }
        return acc;
    }

    void add(ClusterStats& c, const double* y) const {
        ++c.count;
        for (std::size_t d = 0; d < dims_; ++d) {
            c.sum[d] += y[d];
            c.sumsq[d] += y[d] * y[d];
        }
        refresh(c);
    }

    void remove(ClusterStats& c, const double* y) const {
        --c.count;
        for (std::size_t d = 0; d < dims_; ++d) {
            c.sum[d] -= y[d];
            c.sumsq[d] -= y[d] * y[d];
        }
        if (c.count == 0) {
            std::fill(c.sum.begin(), c.sum.end(), 0.0);
            std::fill(c.sumsq.begin(), c.sumsq.end(), 0.0);
        }
        refresh(c);
    }

private:
    const DpmHyper& h_;
    std::size_t dims_;
};

std::vector<Partition> run_chain(const Dataset& data, const DpmHyper& hyper, const GibbsConfig& cfg, uint64_t seed) {
    Rng rng(seed);
    const Predictive pred(hyper);
    ClusterStats prior;
    pred.reset(prior);

    // Start with every point in one cluster.
    std::vector<ClusterStats> clusters(1);
    pred.reset(clusters[0]);
    std::vector<std::size_t> free_slots;
    std::vector<std::size_t> assign(data.n, 0);
    for (std::size_t i = 0; i < data.n; ++i) pred.add(clusters[0], &data.values[i * data.dims]);

    const double log_alpha = std::log(hyper.alpha);
    std::vector<double> logw;
    std::vector<std::size_t> slots;
    std::vector<Partition> draws;
    draws.reserve((cfg.iters - cfg.burnin) / cfg.thin);
    std::vector<Label> labels(data.n);

    for (std::size_t sweep = 0; sweep < cfg.iters; ++sweep) {
        for (std::size_t i = 0; i < data.n; ++i) {
            const double* y = &data.values[i * data.dims];
            ClusterStats& own = clusters[assign[i]];
            pred.remove(own, y);
            if (own.count == 0) free_slots.push_back(assign[i]);

            logw.clear();
            slots.clear();
            for (std::size_t c = 0; c < clusters.size(); ++c) {
                if (clusters[c].count == 0) continue;
                logw.push_back(std::log(static_cast<double>(clusters[c].count)) + pred.log_density(clusters[c], y));
                slots.push_back(c);
            }
            logw.push_back(log_alpha + pred.log_density(prior, y));

            const double top = *std::max_element(logw.begin(), logw.end());
            double total = 0.0;
            for (double& w : logw) {
                w = std::exp(w - top);
                total += w;
            }
            double u = std::uniform_real_distribution<double>(0.0, total)(rng);
            std::size_t pick = logw.size() - 1;
            for (std::size_t j = 0; j < logw.size(); ++j) {
                if (u < logw[j]) {
                    pick = j;
                    break;
                }
                u -= logw[j];
            }

            std::size_t target = 0;
            if (pick < slots.size()) {
                target = slots[pick];
            } else if (!free_slots.empty()) {
                target = free_slots.back();
                free_slots.pop_back();
            } else {
                target = clusters.size();
                clusters.emplace_back();
                pred.reset(clusters.back());
            }
            if (clusters[target].count == 0) {
                // A reused slot may still be on the free list.
                free_slots.erase(std::remove(free_slots.begin(), free_slots.end(), target), free_slots.end());
            }
            pred.add(clusters[target], y);
            assign[i] = target;
        }
        if (sweep >= cfg.burnin && (sweep - cfg.burnin + 1) % cfg.thin == 0) {
            for (std::size_t i = 0; i < data.n; ++i) labels[i] = static_cast<Label>(assign[i]);
            draws.push_back(Partition::canonicalize(labels));
        }
    }
    return draws;
}

}  // namespace

SampleSet dpm_gibbs(const Dataset& data, const DpmHyper& hyper, const GibbsConfig& cfg) {
    if (cfg.iters <= cfg.burnin) throw std::invalid_argument("iters must exceed burnin");
    if (cfg.thin < 1) throw std::invalid_argument("thin must be >= 1");
    if (cfg.chains < 1) throw std::invalid_argument("chains must be >= 1");
    if (data.n < 1) throw std::invalid_argument("no data");
    if (hyper.mu0.size() != data.dims || hyper.b0.size() != data.dims) {
        throw std::invalid_argument("hyperparameter dimension does not match the data");
    }
    if (!(hyper.k0 > 0.0) || !(hyper.a0 > 0.0) || !(hyper.alpha > 0.0) ||
        std::any_of(hyper.b0.begin(), hyper.b0.end(), [](double b) { return !(b > 0.0); })) {
        throw std::invalid_argument("k0, a0, b0 and alpha must be positive");
    }

    std::vector<std::vector<Partition>> chains(cfg.chains);
    parallel_for(cfg.chains, [&](std::size_t c) {
        chains[c] = run_chain(data, hyper, cfg, cfg.chains == 1 ? cfg.seed : derive_seed(cfg.seed, c));
    });
    std::vector<Partition> all;
    for (auto& chain : chains) {
        for (auto& p : chain) all.push_back(std::move(p));
    }
    return SampleSet(std::move(all));
}

}  // namespace wasabi
