#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "oracles.hpp"
#include "wasabi/simulator.hpp"

using namespace wasabi;

TEST_CASE("mixture presets") {
    auto b = bimodal_spec();
    CHECK(b.n == 600);
    CHECK(b.means == std::vector<std::vector<double>>{{-1.1}, {1.1}});
    CHECK(b.sds == std::vector<double>{1.0, 1.0});
    CHECK(b.weights == std::vector<double>{0.5, 0.5});
    auto q = quadrants_spec();
    CHECK(q.dims == 2);
    CHECK(q.means.size() == 4);
    for (const auto& m : q.means) {
        CHECK(std::abs(m[0]) == 1.25);
        CHECK(std::abs(m[1]) == 1.25);
    }
}

TEST_CASE("gen_mixture is deterministic and honours its settings") {
    auto spec = bimodal_spec(600, 3);
    auto a = gen_mixture(spec);
    auto b = gen_mixture(spec);
    CHECK(a.values == b.values);
    CHECK(a.labels == b.labels);
    CHECK(a.n == 600);
    const auto ones = std::count(a.labels.begin(), a.labels.end(), 1);
    CHECK(ones > 240);
    CHECK(ones < 360);
    double mean0 = 0.0, mean1 = 0.0;
    for (std::size_t i = 0; i < a.n; ++i) (a.labels[i] ? mean1 : mean0) += a(i, 0);
    CHECK(mean0 / static_cast<double>(a.n - ones) == doctest::Approx(-1.1).epsilon(0.2));
    CHECK(mean1 / static_cast<double>(ones) == doctest::Approx(1.1).epsilon(0.2));

    MixtureSpec single;
    single.means = {{0.0}};
    single.sds = {1.0};
    single.weights = {1.0};
    single.n = 50;
    auto s = gen_mixture(single);
    for (Label l : s.labels) CHECK(l == 0);

    auto t = gen_mixture(truncated_spec(0.4, 200, 5));
    CHECK(t.n == 200);
    for (double v : t.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    auto sk = gen_mixture(skewt_spec(5.0, 2.0, 2000, 5));
    std::size_t positive = 0;
    for (double v : sk.values) positive += v > 0.0;
    CHECK(static_cast<double>(positive) / 4000.0 == doctest::Approx(0.8).epsilon(0.05));

    MixtureSpec bad = single;
    bad.weights = {0.7};
    CHECK_THROWS_AS(gen_mixture(bad), std::invalid_argument);
    bad = single;
    bad.dims = 3;
    CHECK_THROWS_AS(gen_mixture(bad), std::invalid_argument);
    bad = single;
    bad.sds = {0.0};
    CHECK_THROWS_AS(gen_mixture(bad), std::invalid_argument);
}

TEST_CASE("default_hyper rules") {
    Dataset d;
    d.n = 4;
    d.dims = 1;
    d.values = {-2.0, 2.0, -2.0, 2.0};  // mean 0, sample variance 16/3
    auto h = default_hyper(d);
    CHECK(h.mu0[0] == 0.0);
    CHECK(h.k0 == 0.1);
    CHECK(h.a0 == 1.5);
    CHECK(h.alpha == 1.0);
    CHECK(h.b0[0] == doctest::Approx(16.0 / 3.0 / 4.0));

    Dataset v4;
    v4.n = 5;
    v4.dims = 1;
    v4.values = {-2.0, 2.0, -2.0, 2.0, 0.0};  // mean 0, sample variance 4
    CHECK(default_hyper(v4).b0[0] == doctest::Approx(1.0));

    auto big = gen_mixture(bimodal_spec());
    CHECK(default_hyper(big, AlphaRule::empirical).alpha == doctest::Approx(2.0 / std::log(600.0)));

    Dataset constant;
    constant.n = 3;
    constant.dims = 1;
    constant.values = {1.0, 1.0, 1.0};
    CHECK_THROWS(default_hyper(constant));
    Dataset tiny;
    tiny.n = 1;
    tiny.dims = 1;
    tiny.values = {1.0};
    CHECK_THROWS(default_hyper(tiny));
}

TEST_CASE("dpm_gibbs schedule and determinism") {
    auto data = gen_mixture(bimodal_spec(40, 2));
    auto h = default_hyper(data);
    GibbsConfig cfg{.iters = 50, .burnin = 10, .thin = 3, .seed = 4};
    auto a = dpm_gibbs(data, h, cfg);
    CHECK(a.size() == 13);
    CHECK(a.n() == 40);
    CHECK(dpm_gibbs(data, h, cfg).draws() == a.draws());
    cfg.chains = 2;
    CHECK(dpm_gibbs(data, h, cfg).size() == 26);
    CHECK_THROWS(dpm_gibbs(data, h, GibbsConfig{.iters = 10, .burnin = 10}));
    CHECK_THROWS(dpm_gibbs(data, h, GibbsConfig{.iters = 10, .burnin = 0, .thin = 0}));
}

TEST_CASE("tiny alpha concentrates on few clusters") {
    MixtureSpec spec;
    spec.means = {{-10.0}, {10.0}};
    spec.sds = {1.0, 1.0};
    spec.weights = {0.5, 0.5};
    spec.n = 60;
    auto data = gen_mixture(spec);
    auto h = default_hyper(data);
    h.alpha = 1e-8;
    auto s = dpm_gibbs(data, h, GibbsConfig{.iters = 300, .burnin = 100, .seed = 1});
    std::size_t few = 0;
    for (const auto& p : s.draws()) few += p.k() <= 2;
    CHECK(static_cast<double>(few) / static_cast<double>(s.size()) > 0.95);
}

TEST_CASE("gibbs matches the exact posterior on three points") {
    Dataset d;
    d.n = 3;
    d.dims = 1;
    d.values = {-1.0, 0.2, 1.5};
    DpmHyper h{.mu0 = {0.0}, .k0 = 0.1, .a0 = 1.5, .b0 = {0.5}, .alpha = 1.0};
    auto exact = oracle::exact_dpm_posterior(d.values, 0.0, 0.1, 1.5, 0.5, 1.0);
    auto s = dpm_gibbs(d, h, GibbsConfig{.iters = 60000, .burnin = 1000, .seed = 3});
    std::map<std::vector<Label>, double> freq;
    for (const auto& p : s.draws()) freq[p.labels()] += 1.0 / static_cast<double>(s.size());
    double tv = 0.0;
    for (const auto& [p, w] : exact) tv += std::abs(w - freq[p.labels()]);
    CHECK(tv / 2.0 < 0.02);
}
