#pragma once

#include <cstddef>
#include <span>

namespace geosolve::simd {

// Dense dot-product kernels behind retrieval scoring. The scalar versions are
// the reference; wider variants are compiled per target and picked once at
// runtime from CPU features. All variants must agree with the scalar kernel
// within floating-point reassociation tolerance (equivalence-tested).

float dot_scalar(const float* a, const float* b, std::size_t n);

// out[r] = dot(keys[r*dim .. r*dim+dim), query) for r in [0, rows).
void dot_batch_scalar(const float* keys, std::size_t rows, std::size_t dim, const float* query,
                      float* out);

#if defined(GEOSOLVE_HAVE_AVX2)
float dot_avx2(const float* a, const float* b, std::size_t n);
void dot_batch_avx2(const float* keys, std::size_t rows, std::size_t dim, const float* query,
                    float* out);
#endif

#if defined(GEOSOLVE_HAVE_NEON)
float dot_neon(const float* a, const float* b, std::size_t n);
void dot_batch_neon(const float* keys, std::size_t rows, std::size_t dim, const float* query,
                    float* out);
#endif

// Dispatched entry points.
float dot(std::span<const float> a, std::span<const float> b);
void dot_batch(const float* keys, std::size_t rows, std::size_t dim, const float* query,
               float* out);

// Name of the kernel the dispatcher picked: "avx2", "neon", or "scalar".
const char* active_kernel();

}  // namespace geosolve::simd
