#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "wasabi/diagnostics.hpp"
#include "wasabi/errors.hpp"

using namespace wasabi;
using oracle::make;

namespace {

WasabiPosterior posterior(std::vector<Partition> particles, std::vector<double> weights) {
    WasabiPosterior wp;
    wp.particles = std::move(particles);
    wp.weights = std::move(weights);
    return wp;
}

}  // namespace

TEST_CASE("meet of particles") {
    auto p = make({0, 1, 1, 0});
    auto one = particles_meet(posterior({p}, {1.0}));
    CHECK(one.meet == p);
    CHECK(one.cluster_map[0] == std::vector<Label>{0, 1});
    auto two = particles_meet(posterior({make({0, 0, 1, 1}), make({0, 1, 1, 1})}, {0.6, 0.4}));
    CHECK(two.meet.labels() == std::vector<Label>{0, 1, 2, 2});
    CHECK(two.meet_sizes == std::vector<std::size_t>{1, 1, 2});
}

TEST_CASE("collapsed wasabi psm") {
    auto single = wasabi_psm(posterior({make({0, 0, 1})}, {1.0}));
    CHECK(single.dim() == 2);
    CHECK(single(0, 0) == 1.0);
    CHECK(single(0, 1) == 0.0);

    auto wp = posterior({make({0, 0, 1, 1}), make({0, 1, 1, 1})}, {0.6, 0.4});
    auto m = wasabi_psm(wp);
    CHECK(m(0, 1) == doctest::Approx(0.6));
    CHECK(m(1, 2) == doctest::Approx(0.4));
    CHECK(m(0, 2) == doctest::Approx(0.0));
    CHECK(m(2, 2) == doctest::Approx(1.0));

    auto p = make({0, 1, 0, 1});
    auto same = wasabi_psm(posterior({p, p}, {0.3, 0.7}));
    CHECK(same(0, 0) == doctest::Approx(1.0));
    CHECK(same(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("evic against the particle mixture") {
    auto p = make({0, 0, 1, 1});
    for (double v : evic_wasabi(p, posterior({p}, {1.0})).expand()) CHECK(v == 0.0);

    auto g = evic_wasabi(p, posterior({p, make({0, 1, 2, 2})}, {0.5, 0.5}));
    auto v = g.expand();
    CHECK(v[0] == doctest::Approx(0.125));
    CHECK(v[1] == doctest::Approx(0.125));
    CHECK(v[2] == doctest::Approx(0.0));
    CHECK(v[3] == doctest::Approx(0.0));

    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 2 + rng() % 30;
        std::vector<Partition> parts;
        std::vector<double> w;
        const std::size_t count = 1 + rng() % 4;
        for (std::size_t l = 0; l < count; ++l) {
            parts.push_back(oracle::random_partition(n, 1 + rng() % 4, rng));
            w.push_back(1.0 / static_cast<double>(count));
        }
        auto q = oracle::random_partition(n, 1 + rng() % 4, rng);
        auto wp = posterior(parts, w);
        auto e = evic_wasabi(q, wp);
        double expect = 0.0;
        for (std::size_t l = 0; l < count; ++l) expect += w[l] * oracle::vi(q, parts[l]);
        CHECK(e.total() == doctest::Approx(expect).epsilon(1e-10));
        std::vector<double> item(n, 0.0);
        for (std::size_t l = 0; l < count; ++l) {
            auto c = oracle::vic(q, parts[l]);
            for (std::size_t i = 0; i < n; ++i) item[i] += w[l] * c[i];
        }
        auto ex = e.expand();
        for (std::size_t i = 0; i < n; ++i) CHECK(ex[i] == doctest::Approx(item[i]).epsilon(1e-10));
    }
}

TEST_CASE("region diagnostics and identities on a fitted posterior") {
    std::mt19937_64 rng(19);
    std::vector<Partition> draws;
    for (int t = 0; t < 80; ++t) draws.push_back(oracle::random_partition(12, 1 + rng() % 4, rng));
    SampleSet s(draws);
    WasabiConfig cfg;
    cfg.particles = 3;
    cfg.runs = 2;
    auto wp = run(s, cfg);
    auto rep = diagnose(s, wp, DiagnosticsOptions{.region_psms = true});
    CHECK(rep.evi_identity_gap <= 1e-9);
    REQUIRE(rep.psm_identity_gap.has_value());
    CHECK(*rep.psm_identity_gap <= 1e-9);
    for (double v : rep.region_evi_normalized) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    for (std::size_t l = 0; l < wp.size(); ++l) {
        double sum = 0.0;
        for (double v : region_evic(s, wp, l)) sum += v;
        CHECK(sum == doctest::Approx(rep.region_evi[l]).epsilon(1e-10));
    }
    REQUIRE(rep.comparisons.size() == 3);
    for (const auto& c : rep.comparisons) {
        double sum = 0.0;
        for (const auto& [_, v] : c.vicg) sum += v;
        CHECK(sum == doctest::Approx(c.vi).epsilon(1e-10));
    }
    auto mc = diagnose(s, wp, DiagnosticsOptions{.evic_source = EvicSource::mcmc});
    double total = 0.0;
    for (double v : mc.particle_evic[0]) total += v;
    CHECK(total == doctest::Approx(expected_vi(wp.particles[0], s)).epsilon(1e-10));

    WasabiPosterior broken = wp;
    broken.wasserstein += 0.01;
    CHECK_THROWS_AS(diagnose(s, broken), InvariantError);
}

TEST_CASE("region of one draw and zero-spread regions") {
    auto A = make({0, 0, 1});
    auto B = make({0, 1, 2});
    SampleSet s({A, A, B});
    WasabiPosterior wp = posterior({A, B}, {2.0 / 3.0, 1.0 / 3.0});
    wp.assignments = {0, 0, 1};
    wp.wasserstein = 0.0;
    auto m = region_psm(s, wp, 1);
    CHECK(m(0, 1) == 0.0);
    CHECK(m(1, 1) == 1.0);
    CHECK(region_evi(s, wp, 0) == 0.0);
    CHECK(region_evi(s, wp, 1, true) == 0.0);
}

TEST_CASE("compare_particles") {
    auto wp = posterior({make({0, 0, 1, 1}), make({0, 1, 2, 2})}, {0.5, 0.5});
    auto c = compare_particles(wp, 0, 1);
    CHECK(c.vi == doctest::Approx(0.5));
    CHECK(c.vic[0] == doctest::Approx(0.25));
    CHECK(c.vic[1] == doctest::Approx(0.25));
    CHECK(c.vic[2] == doctest::Approx(0.0));
    CHECK_THROWS(compare_particles(wp, 0, 0));
    CHECK_THROWS(compare_particles(wp, 0, 2));
}
