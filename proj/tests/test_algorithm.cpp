#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "wasabi/algorithm.hpp"
#include "wasabi/parallel.hpp"

using namespace wasabi;
using oracle::make;

namespace {

SampleSet random_set(std::size_t n, std::size_t t, std::size_t max_k, std::mt19937_64& rng) {
    std::vector<Partition> draws;
    for (std::size_t k = 0; k < t; ++k) draws.push_back(oracle::random_partition(n, max_k, rng));
    return SampleSet(draws);
}

}  // namespace

TEST_CASE("resolve_epsilon") {
    WasabiConfig cfg;
    CHECK(resolve_epsilon(cfg, 1024) == doctest::Approx(1e-3));
    cfg.epsilon = 0.5;
    CHECK(resolve_epsilon(cfg, 1024) == 0.5);
    cfg.epsilon = 0.0;
    CHECK_THROWS(resolve_epsilon(cfg, 4));
}

TEST_CASE("initialize with L=1 returns the lowest-EVI candidate") {
    std::mt19937_64 gen(4);
    auto s = random_set(8, 30, 3, gen);
    for (InitMethod m : {InitMethod::average, InitMethod::complete, InitMethod::topvi}) {
        WasabiConfig cfg;
        cfg.particles = 1;
        cfg.init = m;
        Rng rng(1);
        auto init = initialize(s, cfg, rng);
        REQUIRE(init.size() == 1);
        const auto k_max = resolve_k_max(cfg.search, s);
        std::vector<Partition> cands;
        if (m != InitMethod::complete) cands = linkage_candidates(psm(s), Linkage::average, k_max);
        if (m != InitMethod::average) {
            for (auto& p : linkage_candidates(psm(s), Linkage::complete, k_max)) cands.push_back(p);
        }
        double best = 1e300;
        for (const auto& c : cands) best = std::min(best, expected_vi(c, s));
        CHECK(expected_vi(init[0], s) == doctest::Approx(best).epsilon(1e-12));
    }
}

TEST_CASE("plusplus never picks duplicates") {
    auto a = make({0, 0, 1, 1});
    auto b = make({0, 1, 1, 1});
    auto c = make({0, 1, 2, 3});
    SampleSet s({a, a, a, a, b, b, c});
    for (uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(seed);
        auto chosen = plusplus_seed(s, {}, 3, rng);
        std::set<std::vector<Label>> distinct;
        for (const auto& p : chosen) distinct.insert(p.labels());
        CHECK(distinct.size() == 3);
    }
    Rng rng(0);
    CHECK_THROWS_AS(plusplus_seed(s, {}, 4, rng), std::invalid_argument);
}

TEST_CASE("average init on bimodal-like draws includes the 1 and 2 cluster cuts") {
    std::mt19937_64 gen(6);
    std::vector<Partition> draws;
    const std::size_t n = 30;
    for (int t = 0; t < 60; ++t) {
        std::vector<Label> l(n, 0);
        if (t % 2 == 0) {
            for (std::size_t i = n / 2; i < n; ++i) l[i] = 1;
        }
        if (gen() % 3 == 0) l[gen() % n] = 2;
        draws.push_back(make(l));
    }
    SampleSet s(draws);
    WasabiConfig cfg;
    cfg.particles = 2;
    Rng rng(1);
    auto init = initialize(s, cfg, rng);
    REQUIRE(init.size() == 2);
    std::set<std::size_t> ks{init[0].k(), init[1].k()};
    CHECK(ks == std::set<std::size_t>{1, 2});
}

TEST_CASE("n_update assignment and empty-region refill") {
    auto a = make({0, 0, 1, 1});
    auto b = make({0, 0, 1, 2});
    SampleSet s({a, b, a, b});
    std::vector<Partition> particles{a, b};
    Rng rng(3);
    auto nu = n_update(s, particles, rng);
    CHECK(nu.assignments == std::vector<std::size_t>{0, 1, 0, 1});
    CHECK(nu.refilled.empty());

    std::vector<Partition> one{a};
    CHECK(n_update(s, one, rng).assignments == std::vector<std::size_t>(4, 0));

    // C = singletons is farther from B than A is, so region(C) is empty.
    auto A6 = make({0, 0, 0, 1, 1, 1});
    auto B = make({0, 0, 0, 1, 1, 2});
    auto C = make({0, 1, 2, 3, 4, 5});
    REQUIRE(oracle::vi(B, A6) < oracle::vi(B, C));
    SampleSet s2({A6, A6, B});
    std::vector<Partition> ps{A6, C};
    Rng rng2(5);
    auto r = n_update(s2, ps, rng2, false);
    CHECK(r.refilled == std::vector<std::size_t>{1});
    CHECK((ps[1] == A6 || ps[1] == B));
    CHECK(std::count(r.assignments.begin(), r.assignments.end(), 1u) == 1);
}

TEST_CASE("vi_search_step solves regions independently") {
    auto all = oracle::all_partitions(4);
    SampleSet s(all);
    std::vector<Partition> particles{all[0]};
    std::vector<std::size_t> assign(all.size(), 0);
    auto res = vi_search_step(s, particles, assign, SearchConfig{.k_max = 4, .runs = 4});
    double best = 1e300;
    for (const auto& c : all) best = std::min(best, oracle::evi(c, all));
    CHECK(res.per_particle_evi[0] == doctest::Approx(best).epsilon(1e-12));

    auto p = make({0, 1, 0, 1});
    SampleSet same({p, p});
    auto single = vi_search_step(same, std::vector<Partition>{all[3]}, std::vector<std::size_t>{0, 0}, SearchConfig{});
    CHECK(single.particles[0] == p);
    CHECK(single.per_particle_evi[0] == 0.0);

    std::mt19937_64 gen(2);
    auto mixed = random_set(7, 20, 3, gen);
    std::vector<std::size_t> split(20);
    for (std::size_t t = 0; t < 20; ++t) split[t] = t % 2;
    std::vector<Partition> two{mixed[0], mixed[1]};
    auto r1 = vi_search_step(mixed, two, split, SearchConfig{.seed = 3});
    std::vector<std::size_t> flipped(20);
    for (std::size_t t = 0; t < 20; ++t) flipped[t] = 1 - split[t];
    std::vector<Partition> swapped{mixed[1], mixed[0]};
    auto r2 = vi_search_step(mixed, swapped, flipped, SearchConfig{.seed = 3});
    CHECK(r1.per_particle_evi[0] == doctest::Approx(r2.per_particle_evi[1]));
    CHECK(r1.per_particle_evi[1] == doctest::Approx(r2.per_particle_evi[0]));

    std::vector<std::size_t> lopsided(20, 0);
    CHECK_THROWS(vi_search_step(mixed, two, lopsided, SearchConfig{}));
}

TEST_CASE("run: L=1 matches minVI and exact covers give W=0") {
    std::mt19937_64 gen(12);
    auto s = random_set(10, 40, 3, gen);
    WasabiConfig cfg;
    cfg.particles = 1;
    cfg.runs = 2;
    auto wp = run(s, cfg);
    CHECK(wp.wasserstein == doctest::Approx(expected_vi(wp.particles[0], s)).epsilon(1e-12));
    CHECK(wp.weights == std::vector<double>{1.0});
    auto greedy = minvi_search(s, SearchConfig{.runs = 8});
    CHECK(wp.wasserstein <= greedy.expected_vi + 1e-9);

    auto A = make({0, 0, 1, 1, 2});
    auto B = make({0, 1, 1, 2, 2});
    WasabiConfig two;
    two.particles = 2;
    auto cover = run(SampleSet({A, A, B}), two);
    CHECK(cover.wasserstein == 0.0);
    CHECK(cover.particles[0] == A);
    CHECK(cover.particles[1] == B);
    CHECK(cover.weights[0] == doctest::Approx(2.0 / 3.0));
    CHECK(cover.weights[1] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("run reduces L when there are too few distinct draws") {
    auto A = make({0, 0, 1});
    auto wp = run(SampleSet({A, A}), WasabiConfig{.particles = 3});
    CHECK(wp.size() == 1);
    CHECK(wp.wasserstein == 0.0);
    CHECK(wp.warnings.size() == 1);
}

TEST_CASE("run is deterministic and independent of the thread count") {
    std::mt19937_64 gen(13);
    auto s = random_set(20, 60, 4, gen);
    WasabiConfig cfg;
    cfg.particles = 3;
    cfg.runs = 4;
    cfg.seed = 9;
    set_thread_count(1);
    auto a = run(s, cfg);
    set_thread_count(4);
    auto b = run(s, cfg);
    set_thread_count(0);
    CHECK(a.particles == b.particles);
    CHECK(a.assignments == b.assignments);
    CHECK(a.wasserstein == b.wasserstein);
    CHECK(a.wasserstein == doctest::Approx(assigned_cost(s, a.particles, a.assignments)).epsilon(1e-12));
    double sum = 0.0;
    for (double w : a.weights) sum += w;
    CHECK(sum == doctest::Approx(1.0));
    for (std::size_t l = 1; l < a.size(); ++l) CHECK(a.weights[l - 1] >= a.weights[l]);
}

TEST_CASE("mini-batch mode") {
    std::mt19937_64 gen(14);
    auto s = random_set(15, 200, 3, gen);
    WasabiConfig cfg;
    cfg.particles = 2;
    cfg.runs = 2;
    cfg.minibatch = 40;
    auto wp = run(s, cfg);
    CHECK(wp.minibatch_iterations > 0);
    CHECK(wp.assignments.size() == s.size());
    CHECK(wp.wasserstein == doctest::Approx(assigned_cost(s, wp.particles, wp.assignments)).epsilon(1e-12));
}

TEST_CASE("run matches the brute-force Wasserstein oracle on n=4") {
    std::mt19937_64 gen(31);
    const auto all = oracle::all_partitions(4);
    int hits = 0;
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<Partition> draws;
        for (int t = 0; t < 6; ++t) draws.push_back(all[gen() % all.size()]);
        SampleSet s(draws);
        if (s.unique_count() < 2) continue;
        const double target = oracle::wasserstein_l2(draws, all);
        WasabiConfig cfg;
        cfg.particles = 2;
        cfg.runs = 32;
        cfg.seed = static_cast<uint64_t>(rep);
        auto wp = run(s, cfg);
        CHECK(wp.wasserstein >= target - 1e-12);
        hits += wp.wasserstein <= target + 1e-9;
    }
    CHECK(hits >= 9);
}

TEST_CASE("elbow") {
    std::mt19937_64 gen(15);
    auto s = random_set(12, 50, 4, gen);
    WasabiConfig cfg;
    cfg.runs = 2;
    std::vector<std::size_t> ls{1, 2, 3, 4};
    auto e = elbow(s, ls, cfg);
    REQUIRE(e.size() == 4);
    for (std::size_t i = 1; i < e.size(); ++i) CHECK(e[i].wasserstein <= e[i - 1].wasserstein);

    std::vector<std::size_t> just1{1};
    auto e1 = elbow(s, just1, cfg);
    cfg.particles = 1;
    CHECK(e1[0].wasserstein == run(s, cfg).wasserstein);

    auto A = make({0, 0, 1});
    auto B = make({0, 1, 2});
    std::vector<std::size_t> ls3{1, 2, 3};
    auto e2 = elbow(SampleSet({A, B, A}), ls3, cfg);
    CHECK(e2[1].wasserstein == 0.0);
    CHECK(e2[2].wasserstein == 0.0);

    std::vector<std::size_t> bad{2, 1};
    CHECK_THROWS(elbow(s, bad, cfg));
}
