#pragma once

#include <cstddef>

namespace rankev {

enum class Execution { kSerial, kParallel };

/// Calls body(i) for i in [0, count). The serial path is the reference; the
/// parallel path distributes indices over OpenMP threads. Bodies must write
/// only to slot i of preallocated output, which keeps results identical
/// across thread counts.
template <class Body>
void for_each_index(std::size_t count, Execution exec, Body&& body) {
  if (exec == Execution::kSerial) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
}

}  // namespace rankev
