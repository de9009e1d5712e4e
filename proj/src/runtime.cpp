#include "vertfe/runtime.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace vertfe {

namespace {
int g_threads = 0; // 0 = unresolved
}

int threads() {
    if (g_threads > 0) return g_threads;
    if (const char* env = std::getenv("VERTFE_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) {
            g_threads = n;
            return g_threads;
        }
    }
#ifdef _OPENMP
    g_threads = omp_get_max_threads();
#else
    g_threads = 1;
#endif
    return g_threads;
}

void set_threads(int n) { g_threads = n >= 1 ? n : 1; }

} // namespace vertfe
