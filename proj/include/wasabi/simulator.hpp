#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "wasabi/partition.hpp"
#include "wasabi/sample_set.hpp"

namespace wasabi {

/// Fernandez-Steel skewed Student-t noise: |t_df| scaled by gamma on the
/// positive side (probability gamma^2 / (1 + gamma^2)) and by 1/gamma on the
/// negative side. Dimensions are independent.
struct SkewT {
    double df = 5.0;
    double gamma = 2.0;
};

struct MixtureSpec {
    std::size_t dims = 1;
    /// One mean vector of length `dims` per component.
    std::vector<std::vector<double>> means;
    /// Isotropic standard deviation per component.
    std::vector<double> sds;
    std::vector<double> weights;
    std::size_t n = 600;
    uint64_t seed = 1;
    /// Points outside [0, 1]^dims are discarded and redrawn.
    bool truncate_unit_cube = false;
    /// Replaces the Gaussian noise by skewed-t noise.
    std::optional<SkewT> skew_t;
};

/// Row-major n x dims data with the generating component of every point.
struct Dataset {
    std::size_t n = 0;
    std::size_t dims = 0;
    std::vector<double> values;
    std::vector<Label> labels;

    double operator()(std::size_t i, std::size_t d) const { return values[i * dims + d]; }
};

/// 0.5 N(-1.1, 1) + 0.5 N(1.1, 1).
MixtureSpec bimodal_spec(std::size_t n = 600, uint64_t seed = 1);
/// Four equally weighted unit-variance components at (+-m, +-m).
MixtureSpec quadrants_spec(double m = 1.25, std::size_t n = 600, uint64_t seed = 1);
/// N((0.5, 0.5), sigma^2 I) truncated to the unit square.
MixtureSpec truncated_spec(double sigma = 0.4, std::size_t n = 200, uint64_t seed = 1);
/// Bivariate skewed-t with independent coordinates.
MixtureSpec skewt_spec(double df = 5.0, double gamma = 2.0, std::size_t n = 200, uint64_t seed = 1);

/// Throws std::invalid_argument for a degenerate spec.
Dataset gen_mixture(const MixtureSpec& spec);

/// Normal-inverse-gamma base measure per dimension plus DP concentration:
/// mu | s2 ~ N(mu0, s2 / k0), s2 ~ IG(a0, b0).
struct DpmHyper {
    std::vector<double> mu0;
    double k0 = 0.1;
    double a0 = 1.5;
    std::vector<double> b0;
    double alpha = 1.0;
};

enum class AlphaRule { one, empirical };

/// mu0 = sample mean, k0 = 0.1, a0 = 3/2, b0 = sample variance / 4 (per
/// dimension); alpha = 1 or 2 / log(n). Throws on n < 2 or zero variance.
DpmHyper default_hyper(const Dataset& data, AlphaRule rule = AlphaRule::one);

struct GibbsConfig {
    std::size_t iters = 20000;
    std::size_t burnin = 10000;
    std::size_t thin = 1;
    uint64_t seed = 1;
    /// Independent chains, concatenated after burn-in.
    std::size_t chains = 1;
};

/// Collapsed Gibbs sampler for the conjugate DP mixture with diagonal
/// Gaussian kernels. Returns chains * floor((iters - burnin) / thin) draws.
SampleSet dpm_gibbs(const Dataset& data, const DpmHyper& hyper, const GibbsConfig& cfg);

}  // namespace wasabi
