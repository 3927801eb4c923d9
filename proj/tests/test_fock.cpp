#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "wcsense/errors.hpp"
#include "wcsense/fock.hpp"

using namespace wcsense;

TEST_CASE("thermal distribution entries") {
    const auto d = thermal_distribution(1.0, 1e-12);
    CHECK(d[0] == 0.5);
    CHECK(d[1] == 0.25);
    CHECK(d[2] == 0.125);
    CHECK(d.total() >= 1.0 - 1e-12);
    CHECK(d.total() <= 1.0);
    for (double nbar : {0.05, 0.3, 2.0, 7.5})
        for (int n : {0, 1, 5, 17}) CHECK(thermal_probability(nbar, n) == doctest::Approx(oracle::thermal_p(nbar, n)).epsilon(1e-13));
}

TEST_CASE("vacuum limit") {
    const auto d = thermal_distribution(0.0);
    REQUIRE(d.size() == 1);
    CHECK(d[0] == 1.0);
    CHECK(ThermalInput::from_tail(0.0).cutoff == 0);
}

TEST_CASE("cutoff follows the tail rule") {
    // (1/2)^(N+1) <= 1e-12 first holds at N = 39 (2^-40 = 9.09e-13)
    CHECK(thermal_cutoff(1.0, 1e-12) == 39);
    CHECK(std::pow(0.5, 40) <= 1e-12);
    CHECK(std::pow(0.5, 39) > 1e-12);

    for (double nbar : {0.01, 0.5, 1.0, 3.0, 20.0, 100.0})
        for (double tol : {1e-4, 1e-8, 1e-12}) {
            const int N = thermal_cutoff(nbar, tol);
            const double r = nbar / (1.0 + nbar);
            int brute = 0;
            while (std::pow(r, brute + 1) > tol) ++brute;
            CHECK(N == brute);
            const auto in = ThermalInput::from_tail(nbar, tol);
            CHECK(in.tail_mass() <= tol);
            CHECK(in.distribution().total() == doctest::Approx(1.0 - in.tail_mass()).epsilon(1e-12));
        }
}

TEST_CASE("thermal domain errors") {
    CHECK_THROWS_AS(thermal_distribution(-0.1), DomainError);
    CHECK_THROWS_AS(thermal_cutoff(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(thermal_cutoff(1.0, 1.0), DomainError);
}

TEST_CASE("distribution validation") {
    CHECK_NOTHROW(PhotonDistribution({0.5, -5e-15, 0.5}));
    CHECK(PhotonDistribution({0.5, -5e-15, 0.5})[1] == 0.0);
    CHECK_THROWS_AS(PhotonDistribution({0.5, -1e-10, 0.5}), NumericError);
    CHECK_THROWS_AS(PhotonDistribution({0.7, 0.7}), NumericError);
    CHECK_THROWS_AS(PhotonDistribution(std::vector<double>{}), DomainError);
    const PhotonDistribution vac;
    CHECK(vac.size() == 1);
    CHECK(vac.mean() == 0.0);
}

TEST_CASE("reduce_mode_a and reduce_mode_b") {
    const double s = 1.0 / std::sqrt(2.0);
    {
        std::vector<WeightedBlock> blocks{{1.0, TwoModeBlockState(1, {0.0, 1.0})}};
        const auto a = reduce_mode_a(blocks);
        const auto b = reduce_mode_b(blocks);
        CHECK(a[0] == 1.0);
        CHECK(a[1] == 0.0);
        CHECK(b[0] == 0.0);
        CHECK(b[1] == 1.0);
    }
    {
        std::vector<WeightedBlock> blocks{{0.5, TwoModeBlockState(0, {1.0})},
                                          {0.5, TwoModeBlockState(2, {s, 0.0, s})}};
        const auto a = reduce_mode_a(blocks);
        CHECK(a[0] == doctest::Approx(0.75));
        CHECK(a[1] == 0.0);
        CHECK(a[2] == doctest::Approx(0.25));
    }
    {
        std::vector<WeightedBlock> blocks{{1.0, TwoModeBlockState(0, {1.0})}};
        const auto b = reduce_mode_b(blocks);
        REQUIRE(b.size() == 1);
        CHECK(b[0] == 1.0);
    }
    std::vector<WeightedBlock> bad{{-0.1, TwoModeBlockState(0, {1.0})}};
    CHECK_THROWS_AS(reduce_mode_a(bad), DomainError);
    CHECK_THROWS_AS(TwoModeBlockState(1, {1.0, 1.0}), DomainError);
}

TEST_CASE("reduced means add up to the block photon number") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<WeightedBlock> blocks;
        double expect = 0.0;
        double wleft = 1.0;
        for (int N = 0; N <= 6; ++N) {
            std::vector<cplx> amp(N + 1);
            double norm = 0.0;
            for (auto& x : amp) {
                x = cplx(g(rng), g(rng));
                norm += std::norm(x);
            }
            for (auto& x : amp) x /= std::sqrt(norm);
            const double w = wleft * 0.4;
            wleft -= w;
            expect += w * N;
            blocks.push_back({w, TwoModeBlockState(N, amp)});
        }
        const auto a = reduce_mode_a(blocks);
        const auto b = reduce_mode_b(blocks);
        CHECK(std::abs(a.mean() + b.mean() - expect) < 1e-12);
    }
}

TEST_CASE("factorial moments") {
    const auto th = thermal_distribution(1.0);
    CHECK(factorial_moment(th, 1) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(factorial_moment(th, 2) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(factorial_moment(PhotonDistribution({0.0, 0.0, 1.0}), 2) == 2.0);
    CHECK_THROWS_AS(factorial_moment(th, 0), DomainError);
}
