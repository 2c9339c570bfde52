#pragma once

#include <cstddef>
#include <cstdint>
#include <type_traits>
#include <vector>

namespace sdlab {

enum class Execution { serial, parallel };

/// Runs `kernel(i)` for every path index in [0, n) and returns the results in
/// index order. Kernels must derive their randomness from `i` alone (see
/// Stream::for_path), so the parallel and serial variants produce identical
/// output and any reduction over the returned vector has a fixed order.
template <class Kernel>
auto map_paths(std::size_t n, Kernel&& kernel, Execution exec = Execution::parallel)
    -> std::vector<std::invoke_result_t<Kernel&, std::size_t>> {
    using Result = std::invoke_result_t<Kernel&, std::size_t>;
    std::vector<Result> out(n);
    if (exec == Execution::serial) {
        for (std::size_t i = 0; i < n; ++i) out[i] = kernel(i);
        return out;
    }
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = kernel(static_cast<std::size_t>(i));
    return out;
}

/// Serial reference for map_paths; kept for equivalence tests and the benchmark.
template <class Kernel>
auto map_paths_serial(std::size_t n, Kernel&& kernel) {
    return map_paths(n, std::forward<Kernel>(kernel), Execution::serial);
}

}  // namespace sdlab
