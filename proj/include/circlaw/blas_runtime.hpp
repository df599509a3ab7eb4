#pragma once

namespace circlaw {

// OpenBLAS 0.3.20 auto-selects its Cooperlake kernels on some AVX-512 hosts;
// with those kernels dhseqr never returns for n >= ~900. If that kernel was
// picked and the user has not chosen one, re-exec the current binary with
// OPENBLAS_CORETYPE=SkylakeX (same ISA, no bf16 paths). Call first thing in
// main(); returns normally when no action is needed or exec fails.
void pin_blas_kernel(char** argv);

/// Name of the active OpenBLAS core, lower-cased.
const char* blas_core_name();

/// Thread count used inside a single BLAS/LAPACK call.
void set_blas_threads(int threads);

}  // namespace circlaw
