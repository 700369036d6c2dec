// Serial reference vs OpenMP kernels on a synthetic population.
//   ./bench_kernels --benchmark_filter=Draws

#include "childpen/kernels.hpp"
#include "childpen/synthgen.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace childpen;

struct Fixture {
    std::vector<RespondentRecord> population;
    std::vector<PlaceboIndividual> individuals;
    std::vector<AgeGroupStats> stats;
    AgeAtEventPMF yearly;
    AgeAtEventPMF monthly;

    Fixture() {
        PopulationSpec spec;
        spec.n_childless = 5000;
        spec.n_parents = 5000;
        spec.noise_sd = 300;
        spec.income_profile_female = {{18, 1500}, {45, 3000}, {65, 2800}};
        population = generate_population(spec);
        const Subpopulation childless{std::nullopt, Parenthood::childless};
        individuals = placebo_individuals(population, Outcome::income, childless, BinWidth::yearly);
        stats = age_group_stats(population, Outcome::income, childless, BinWidth::yearly);
        yearly = discretize_pmf(spec.age_at_birth, BinWidth::yearly, 15, 49);
        monthly = discretize_pmf(spec.age_at_birth, BinWidth::monthly, 180, 599);
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

template <auto Kernel>
void BM_Draws(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) {
        auto table = Kernel(f.individuals, f.yearly, TauRange{-5, 15}, std::size_t(state.range(0)), 7);
        benchmark::DoNotOptimize(table.means.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * std::int64_t(f.individuals.size()));
}

template <auto Kernel>
void BM_Covariance(benchmark::State& state) {
    const auto& f = fixture();
    std::vector<AgeGroupStats> monthly_stats = age_group_stats(
        f.population, Outcome::income, Subpopulation{std::nullopt, Parenthood::childless}, BinWidth::monthly);
    for (auto _ : state) {
        auto cov = Kernel(monthly_stats, f.monthly, TauRange{-60, 191}, Weighting::pmf_only);
        benchmark::DoNotOptimize(cov.values().data());
    }
}

template <auto Kernel>
void BM_Bootstrap(benchmark::State& state) {
    const auto& f = fixture();
    const auto sample = gap_sample(f.population, GapOutcome::income, {});
    for (auto _ : state) {
        auto rounds = Kernel(sample, GapSetup{}, std::size_t(state.range(0)), 11);
        benchmark::DoNotOptimize(rounds.data());
    }
}

}  // namespace

BENCHMARK(BM_Draws<&reference::placebo_draws>)->Name("Draws/serial")->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Draws<&parallel::placebo_draws>)->Name("Draws/openmp")->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Covariance<&reference::convolution_covariance>)->Name("CovarianceMonthly/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Covariance<&parallel::convolution_covariance>)->Name("CovarianceMonthly/openmp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Bootstrap<&reference::bootstrap_rounds>)->Name("Bootstrap/serial")->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Bootstrap<&parallel::bootstrap_rounds>)->Name("Bootstrap/openmp")->Arg(50)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
