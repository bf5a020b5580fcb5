#pragma once

namespace eikjohn {

// Worker count for OpenMP kernels: EIKJOHN_THREADS caps it when set,
// otherwise the OpenMP default applies. Read once, cached.
int thread_count();

// Installs the cap process-wide (omp_set_num_threads). Safe to call repeatedly.
void apply_thread_cap();

} // namespace eikjohn
