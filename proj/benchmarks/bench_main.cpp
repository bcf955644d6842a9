#include <benchmark/benchmark.h>

#include <sstream>
#include <vector>

#include "vfropt/bd.hpp"
#include "vfropt/ladder.hpp"
#include "vfropt/measurements.hpp"
#include "vfropt/report.hpp"
#include "vfropt/selection.hpp"
#include "vfropt/synthetic.hpp"

namespace {

vfropt::SyntheticModel bench_model() {
    vfropt::SyntheticModel model;
    model.seed = 7;
    model.quality_ceiling = {40, 48, 55, 60, 66, 72, 77, 82, 86, 90, 94, 97};
    model.framerate_penalty = 4.0;
    model.penalty_bitrate_decay = 1.0;
    model.energy_per_fps = 0.5;
    model.energy_resolution_exponent = 1.0;
    model.noise_amplitude = 0.0;
    return model;
}

std::vector<vfropt::QualityByFramerate> random_tables(std::size_t count) {
    std::uint64_t state = 99;
    auto next = [&state] {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    };
    std::vector<vfropt::QualityByFramerate> tables(count);
    for (auto& q : tables) {
        for (int fps : {24, 30, 48, 60}) {
            q[fps] = static_cast<double>(next() >> 11) * 0x1.0p-53 * 100.0;
        }
    }
    return tables;
}

void BM_SelectFramerate(benchmark::State& state) {
    auto tables = random_tables(1024);
    std::size_t i = 0;
    for (auto _ : state) {
        int fps = vfropt::select_framerate(tables[i++ & 1023], 2.0);
        benchmark::DoNotOptimize(fps);
    }
}
BENCHMARK(BM_SelectFramerate);

void BM_SweepDecodra(benchmark::State& state) {
    auto table = vfropt::generate(bench_model(), vfropt::default_ladder(),
                                  static_cast<int>(state.range(0)));
    std::vector<double> thresholds = {1, 2, 4, 6};
    for (auto _ : state) {
        auto results = vfropt::sweep(table, vfropt::Selector::kDecodra, thresholds);
        benchmark::DoNotOptimize(results);
    }
}
BENCHMARK(BM_SweepDecodra)->Arg(1)->Arg(10)->Arg(50);

void BM_BdQuality(benchmark::State& state) {
    vfropt::RdCurve ref{{}, vfropt::XAxisKind::kBitrateKbps};
    vfropt::RdCurve test{{}, vfropt::XAxisKind::kBitrateKbps};
    auto ladder = vfropt::default_ladder();
    for (std::size_t i = 0; i < ladder.rungs.size(); ++i) {
        double b = ladder.rungs[i].bitrate_kbps;
        ref.points.push_back({b, 40.0 + 5.0 * i});
        test.points.push_back({b, 41.0 + 5.1 * i});
    }
    for (auto _ : state) {
        auto result = vfropt::bd_quality(ref, test);
        benchmark::DoNotOptimize(result);
    }
}
BENCHMARK(BM_BdQuality);

void BM_BuildReport(benchmark::State& state) {
    auto table = vfropt::generate(bench_model(), vfropt::default_ladder(),
                                  static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto report = vfropt::build_report(table);
        benchmark::DoNotOptimize(report);
    }
}
BENCHMARK(BM_BuildReport)->Arg(1)->Arg(10);

void BM_ParseMeasurementsCsv(benchmark::State& state) {
    auto table = vfropt::generate(bench_model(), vfropt::default_ladder(), 20);
    std::ostringstream out;
    vfropt::serialize_measurements(table, vfropt::MeasurementFormat::kCsv, out);
    std::string csv = out.str();
    for (auto _ : state) {
        std::istringstream in(csv);
        auto parsed =
            vfropt::parse_measurements(in, vfropt::MeasurementFormat::kCsv, table.ladder());
        benchmark::DoNotOptimize(parsed);
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * csv.size()));
}
BENCHMARK(BM_ParseMeasurementsCsv);

}  // namespace

BENCHMARK_MAIN();
