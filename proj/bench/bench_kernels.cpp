// Kernel benchmarks on the generated city: parallel kernels against their serial references.

#include "roofpedia/footprints.hpp"
#include "roofpedia/raster.hpp"
#include "roofpedia/segmenter.hpp"
#include "roofpedia/synthetic.hpp"
#include "roofpedia/tagging.hpp"
#include "roofpedia/vectorize.hpp"

#include <benchmark/benchmark.h>

using namespace roofpedia;

namespace {

struct Inputs {
    synthetic::SyntheticCity city;
    std::vector<raster::ProbabilityMask> masks;
    std::vector<footprints::BuildingFootprint> footprints;
    std::vector<vectorize::PredictionPolygon> predictions;
};

const Inputs& inputs() {
    static const Inputs in = [] {
        Inputs r;
        synthetic::SyntheticParams p;
        p.tiles_x = 8;
        p.tiles_y = 8;
        r.city = synthetic::make_synthetic_city(p);
        for (const auto& img : r.city.imagery)
            r.masks.push_back(segment::segment_tile(img, Typology::Solar));
        r.footprints = footprints::load_footprints(r.city.footprints).footprints;
        r.predictions = vectorize::vectorize_tiles_serial(r.masks, Typology::Solar, {});
        for (const auto& img : r.city.imagery) {
            const auto green = vectorize::vectorize_tile(img.tile, segment::segment_tile(img, Typology::Green),
                                                         Typology::Green, {});
            r.predictions.insert(r.predictions.end(), green.begin(), green.end());
        }
        return r;
    }();
    return in;
}

void BM_ConnectedComponents(benchmark::State& state) {
    const auto b = raster::threshold(inputs().masks.front(), 0.5);
    for (auto _ : state)
        benchmark::DoNotOptimize(raster::connected_components(b, 8));
}
BENCHMARK(BM_ConnectedComponents);

void BM_VectorizeTilesSerial(benchmark::State& state) {
    const auto& in = inputs();
    for (auto _ : state)
        benchmark::DoNotOptimize(vectorize::vectorize_tiles_serial(in.masks, Typology::Solar, {}));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(in.masks.size()));
}
BENCHMARK(BM_VectorizeTilesSerial)->Unit(benchmark::kMillisecond);

void BM_VectorizeTiles(benchmark::State& state) {
    const auto& in = inputs();
    const int workers = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(vectorize::vectorize_tiles(in.masks, Typology::Solar, {}, workers));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(in.masks.size()));
}
BENCHMARK(BM_VectorizeTiles)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_TagReference(benchmark::State& state) {
    const auto& in = inputs();
    for (auto _ : state)
        benchmark::DoNotOptimize(tagging::tag_buildings_reference("bench", in.footprints, in.predictions, {}));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(in.predictions.size()));
}
BENCHMARK(BM_TagReference)->Unit(benchmark::kMillisecond);

void BM_TagBuildings(benchmark::State& state) {
    const auto& in = inputs();
    const auto index = footprints::build_spatial_index(in.footprints);
    const int workers = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(tagging::tag_buildings("bench", in.footprints, index, in.predictions, {}, workers));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(in.predictions.size()));
}
BENCHMARK(BM_TagBuildings)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->UseRealTime()->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
