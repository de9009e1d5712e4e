#pragma once

namespace vertfe {

/// Number of worker threads for element-parallel kernels.
/// Resolution order: explicit set_threads() > VERTFE_THREADS env var >
/// OpenMP default. Always >= 1. Results are bitwise independent of the
/// thread count (parallel kernels accumulate in a fixed order).
int threads();
void set_threads(int n);

} // namespace vertfe
