#include "childpen/kernels.hpp"

#include "oracles.hpp"

#include <doctest.h>
#include <omp.h>

#include <cstring>
#include <random>

using namespace childpen;

namespace {

template <class T>
bool same_bits(const std::vector<T>& a, const std::vector<T>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0;
}

struct ThreadGuard {
    int saved = omp_get_max_threads();
    explicit ThreadGuard(int n) { omp_set_num_threads(n); }
    ~ThreadGuard() { omp_set_num_threads(saved); }
};

}  // namespace

TEST_CASE("parallel convolution kernels match the serial reference bit for bit") {
    std::mt19937_64 gen(21);
    for (int threads : {1, 3, 8}) {
        ThreadGuard guard(threads);
        for (int i = 0; i < 10; ++i) {
            const auto stats = oracle::random_stats(gen, 180, 780);
            const auto pmf = oracle::random_pmf(gen, 180, 599);
            const TauRange tau{-60, 191};
            for (auto w : {Weighting::pmf_only, Weighting::population_weighted}) {
                const auto p = parallel::convolve(stats, pmf, tau, w);
                const auto r = reference::convolve(stats, pmf, tau, w);
                CHECK(same_bits(p.means, r.means));
                CHECK(same_bits(p.weight_sums, r.weight_sums));
                const auto pc = parallel::convolution_covariance(stats, pmf, tau, w);
                const auto rc = reference::convolution_covariance(stats, pmf, tau, w);
                CHECK(std::memcmp(pc.values().data(), rc.values().data(), pc.values().size_bytes()) == 0);
            }
        }
    }
}

TEST_CASE("parallel placebo draws match the serial reference bit for bit") {
    std::mt19937_64 gen(22);
    std::uniform_int_distribution<long> age(18, 64);
    std::normal_distribution<double> value(2000, 500);
    std::vector<PlaceboIndividual> people(1500);
    for (auto& p : people) p = {age(gen), value(gen)};
    const auto pmf = discretize_pmf({3.3, 0.17, 0}, BinWidth::yearly, 15, 49);
    for (int threads : {1, 4}) {
        ThreadGuard guard(threads);
        const auto p = parallel::placebo_draws(people, pmf, {-5, 15}, 64, 77);
        const auto r = reference::placebo_draws(people, pmf, {-5, 15}, 64, 77);
        CHECK(p.draws == r.draws);
        CHECK(p.taus == r.taus);
        CHECK(same_bits(p.means, r.means));
    }
}

TEST_CASE("inverse-cdf sampling covers exactly the support") {
    const auto pmf = oracle::point_pmf(30);
    const auto cum = detail::cumulative(pmf);
    CHECK(detail::sample_bin(cum, pmf.a_min, 0.0) == 30);
    CHECK(detail::sample_bin(cum, pmf.a_min, 0.999999) == 30);

    AgeAtEventPMF two;
    two.a_min = 20;
    two.a_max = 22;
    two.masses = {0.5, 0.0, 0.5};
    const auto c2 = detail::cumulative(two);
    CHECK(detail::sample_bin(c2, 20, 0.49) == 20);
    CHECK(detail::sample_bin(c2, 20, 0.5) == 22);
    CHECK(detail::sample_bin(c2, 20, 0.9999999999) == 22);
}

TEST_CASE("parallel bootstrap rounds match the serial reference") {
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> age(20, 60), income(500, 6000);
    std::bernoulli_distribution coin(0.5);
    std::vector<RespondentRecord> recs;
    for (int i = 0; i < 600; ++i) {
        const bool is_parent = coin(gen);
        recs.push_back({std::to_string(i), coin(gen) ? Gender::female : Gender::male, age(gen),
                        is_parent ? Parenthood::parent : Parenthood::childless,
                        is_parent ? std::optional<double>(1.0) : std::nullopt, income(gen), 40.0,
                        IncomeSource::exact});
    }
    for (int threads : {1, 4}) {
        ThreadGuard guard(threads);
        const GapSetup setup{};
        CHECK(parallel::bootstrap_rounds(recs, setup, 20, 5) == reference::bootstrap_rounds(recs, setup, 20, 5));
    }
}
