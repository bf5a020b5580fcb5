#include "eikjohn/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace eikjohn {

static int read_cap() {
#ifdef _OPENMP
    int n = omp_get_max_threads();
#else
    int n = 1;
#endif
    if (const char* env = std::getenv("EIKJOHN_THREADS")) {
        try {
            int cap = std::stoi(env);
            if (cap >= 1) n = cap;
        } catch (...) {
            // ignore malformed values, keep the OpenMP default
        }
    }
    return n < 1 ? 1 : n;
}

int thread_count() {
    static int n = read_cap();
    return n;
}

void apply_thread_cap() {
#ifdef _OPENMP
    omp_set_num_threads(thread_count());
#endif
}

} // namespace eikjohn
