#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "semjscc/prob.hpp"
#include "semjscc/rng.hpp"

using namespace semjscc;

namespace {

DiscreteDistribution random_dist(CounterRng& rng, std::size_t n) {
    std::vector<double> w(n);
    for (auto& v : w) v = -std::log(rng.next_uniform());
    return DiscreteDistribution::normalized(std::move(w));
}

StochasticMatrix random_channel(CounterRng& rng, std::size_t ni, std::size_t no) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < ni; ++i) rows.push_back(random_dist(rng, no).probs());
    return StochasticMatrix::from_rows(rows);
}

}  // namespace

TEST_CASE("entropy basics") {
    CHECK(entropy(DiscreteDistribution::uniform(4)) == Catch::Approx(std::log(4.0)).epsilon(1e-12));
    CHECK(entropy(DiscreteDistribution::point_mass(5, 2)) == 0.0);
    // direct two-term summation: -0.3 ln 0.3 - 0.7 ln 0.7
    CHECK(entropy(DiscreteDistribution({0.3, 0.7})) == Catch::Approx(0.6108643020548935).epsilon(1e-12));
}

TEST_CASE("kl divergence basics") {
    DiscreteDistribution p({0.5, 0.5});
    CHECK(kl_divergence(p, p) == 0.0);
    CHECK(is_inf(kl_divergence(p, DiscreteDistribution({1.0, 0.0}))));
    // 0.5 ln 2 + 0.5 ln(2/3)
    CHECK(kl_divergence(p, DiscreteDistribution({0.25, 0.75})) ==
          Catch::Approx(0.1438410362258904).epsilon(1e-12));
    CHECK_THROWS_AS(kl_divergence(p, DiscreteDistribution::uniform(3)), std::invalid_argument);
}

TEST_CASE("kl divergence nonnegative, zero iff equal") {
    CounterRng rng(2024, 1);
    for (int rep = 0; rep < 200; ++rep) {
        auto p = random_dist(rng, 4);
        auto q = random_dist(rng, 4);
        double d = kl_divergence(p, q);
        CHECK(d >= 0.0);
        CHECK(kl_divergence(p, p) <= 1e-15);
        double tv = 0.0;
        for (std::size_t i = 0; i < 4; ++i) tv += std::abs(p[i] - q[i]);
        if (tv > 1e-3) CHECK(d > 0.0);
    }
}

TEST_CASE("conditional kl") {
    auto w = StochasticMatrix::bsc(0.3);
    auto v = StochasticMatrix::bsc(0.1);
    DiscreteDistribution p({0.6, 0.4});

    CHECK(conditional_kl(w, w, p) == 0.0);

    // point mass reduces to a single row divergence
    DiscreteDistribution at0({1.0, 0.0});
    CHECK(conditional_kl(v, w, at0) == Catch::Approx(kl_divergence(v.row(0), w.row(0))));

    // generic case: recompute as the weighted sum of row KLs
    double manual = p[0] * kl_divergence(v.row(0), w.row(0)) + p[1] * kl_divergence(v.row(1), w.row(1));
    CHECK(conditional_kl(v, w, p) == Catch::Approx(manual).epsilon(1e-14));
}

TEST_CASE("conditional kl equals kl of joint distributions") {
    CounterRng rng(7, 2);
    for (int rep = 0; rep < 50; ++rep) {
        auto p = random_dist(rng, 3);
        auto v = random_channel(rng, 3, 4);
        auto w = random_channel(rng, 3, 4);
        auto jv = JointDistribution::product(p, v);
        auto jw = JointDistribution::product(p, w);
        // flatten joints into distributions over the product alphabet
        double djoint = 0.0;
        bool inf_flag = false;
        for (std::size_t i = 0; i < jv.data().size(); ++i) {
            if (jv.data()[i] == 0.0) continue;
            if (jw.data()[i] == 0.0) { inf_flag = true; break; }
            djoint += jv.data()[i] * std::log(jv.data()[i] / jw.data()[i]);
        }
        double dcond = conditional_kl(v, w, p);
        if (inf_flag) {
            CHECK(is_inf(dcond));
        } else {
            CHECK(dcond == Catch::Approx(djoint).margin(1e-12));
        }
    }
}

TEST_CASE("mutual information") {
    // independence: all rows identical
    auto useless = StochasticMatrix::from_rows({{0.2, 0.8}, {0.2, 0.8}});
    CHECK(mutual_information(DiscreteDistribution({0.4, 0.6}), useless) == 0.0);

    CHECK(mutual_information(DiscreteDistribution::uniform(3), StochasticMatrix::identity(3)) ==
          Catch::Approx(std::log(3.0)).epsilon(1e-12));

    // BSC 0.3 with uniform input: ln 2 - H_b(0.3)
    CHECK(mutual_information(DiscreteDistribution::uniform(2), StochasticMatrix::bsc(0.3)) ==
          Catch::Approx(std::log(2.0) - 0.6108643020548935).epsilon(1e-12));
}

TEST_CASE("mutual information upper bounds") {
    CounterRng rng(99, 3);
    for (int rep = 0; rep < 100; ++rep) {
        auto p = random_dist(rng, 4);
        auto ch = random_channel(rng, 4, 3);
        double mi = mutual_information(p, ch);
        CHECK(mi <= entropy(p) + 1e-12);
        CHECK(mi <= std::log(3.0) + 1e-12);
    }
}

TEST_CASE("bhattacharyya distance") {
    auto w = StochasticMatrix::bsc(0.3);
    CHECK(bhattacharyya(w, 0, 0) == 0.0);
    CHECK(bhattacharyya(w, 0, 1) == Catch::Approx(-std::log(2.0 * std::sqrt(0.21))).epsilon(1e-12));
    CHECK(bhattacharyya(w, 0, 1) == Catch::Approx(0.0871766935723889).epsilon(1e-10));

    auto noiseless = StochasticMatrix::identity(3);
    CHECK(is_inf(bhattacharyya(noiseless, 0, 2)));
}

TEST_CASE("bhattacharyya is symmetric") {
    CounterRng rng(5, 4);
    auto w = random_channel(rng, 4, 5);
    for (std::size_t y = 0; y < 4; ++y)
        for (std::size_t yp = 0; yp < 4; ++yp)
            CHECK(bhattacharyya(w, y, yp) == Catch::Approx(bhattacharyya(w, yp, y)).margin(1e-14));
}

TEST_CASE("dmc capacity") {
    CHECK(dmc_capacity(StochasticMatrix::identity(2)) == Catch::Approx(std::log(2.0)).margin(1e-9));
    auto useless = StochasticMatrix::from_rows({{0.3, 0.7}, {0.3, 0.7}});
    CHECK(dmc_capacity(useless) == Catch::Approx(0.0).margin(1e-9));
    // closed-form BSC capacity
    CHECK(dmc_capacity(StochasticMatrix::bsc(0.3)) ==
          Catch::Approx(std::log(2.0) - 0.6108643020548935).margin(1e-9));
}

TEST_CASE("dmc capacity invariant under relabeling") {
    CounterRng rng(11, 5);
    for (int rep = 0; rep < 10; ++rep) {
        auto w = random_channel(rng, 3, 3);
        double c0 = dmc_capacity(w, 1e-10);
        // swap input labels 0<->2 and output labels 0<->1
        std::vector<std::vector<double>> rows(3, std::vector<double>(3));
        std::size_t iperm[3] = {2, 1, 0}, operm[3] = {1, 0, 2};
        for (std::size_t y = 0; y < 3; ++y)
            for (std::size_t z = 0; z < 3; ++z) rows[y][z] = w(iperm[y], operm[z]);
        double c1 = dmc_capacity(StochasticMatrix::from_rows(rows), 1e-10);
        CHECK(c0 == Catch::Approx(c1).margin(1e-8));
    }
}
