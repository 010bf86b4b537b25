// Serial reference against the OpenMP kernels: local matrices and full assembly.
#include <benchmark/benchmark.h>

#include <map>

#include "fracvem/assembly.hpp"
#include "fracvem/gridgen.hpp"

using namespace fracvem;

namespace {

MixedDimMesh fractured(int n) {
    FractureNetwork net;
    net.fractures = {{{0.1, 0.2}, {0.9, 0.75}, 1e-3, 50.0, 2.0}, {{0.15, 0.85}, {0.8, 0.1}, 1e-3, 1e-2, 1e-4}};
    const SplitNetwork s = split_network(net, Rect{});
    CutParams p;
    p.nx = p.ny = n;
    return build_mixed_mesh(cut_cartesian(Rect{}, s, p), s);
}

const MixedDimMesh &mesh_for(int n) {
    static std::map<int, MixedDimMesh> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, fractured(n)).first;
    return it->second;
}

void local_matrices_bench(benchmark::State &state, Exec exec) {
    const MixedDimMesh &md = mesh_for(static_cast<int>(state.range(0)));
    const PermeabilityField k = uniform_field(md.bulk.num_cells(), Mat2::Identity());
    for (auto _ : state) benchmark::DoNotOptimize(all_local_matrices(md.bulk, k, exec));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(md.bulk.num_cells()));
}

void assembly_bench(benchmark::State &state, Exec exec) {
    const MixedDimMesh &md = mesh_for(static_cast<int>(state.range(0)));
    const PermeabilityField k = uniform_field(md.bulk.num_cells(), Mat2::Identity());
    const SideConditions sides{BcValue{BcType::pressure, 4.0}, BcValue{BcType::pressure, 1.0}, BcValue{BcType::flux, 0.0},
                               BcValue{BcType::flux, 0.0}};
    const BoundaryConditions bc = side_bc(md, sides);
    for (auto _ : state) benchmark::DoNotOptimize(assemble_fractured(md, k, bc, {}, exec));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(md.bulk.num_cells()));
}

}  // namespace

BENCHMARK_CAPTURE(local_matrices_bench, serial, Exec::serial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(local_matrices_bench, openmp, Exec::parallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(assembly_bench, serial, Exec::serial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(assembly_bench, openmp, Exec::parallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
