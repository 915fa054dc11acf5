#include "geosolve/simd.hpp"

#include <cassert>

namespace geosolve::simd {

float dot_scalar(const float* a, const float* b, std::size_t n) {
    float acc = 0.0f;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void dot_batch_scalar(const float* keys, std::size_t rows, std::size_t dim, const float* query,
                      float* out) {
    for (std::size_t r = 0; r < rows; ++r) out[r] = dot_scalar(keys + r * dim, query, dim);
}

namespace {

using DotFn = float (*)(const float*, const float*, std::size_t);
using DotBatchFn = void (*)(const float*, std::size_t, std::size_t, const float*, float*);

struct Kernels {
    DotFn dot;
    DotBatchFn dot_batch;
    const char* name;
};

Kernels select() {
#if defined(GEOSOLVE_HAVE_AVX2)
    if (__builtin_cpu_supports("avx2")) return {dot_avx2, dot_batch_avx2, "avx2"};
#endif
#if defined(GEOSOLVE_HAVE_NEON)
    return {dot_neon, dot_batch_neon, "neon"};
#endif
    return {dot_scalar, dot_batch_scalar, "scalar"};
}

const Kernels& kernels() {
    static const Kernels k = select();
    return k;
}

}  // namespace

float dot(std::span<const float> a, std::span<const float> b) {
    assert(a.size() == b.size());
    return kernels().dot(a.data(), b.data(), a.size());
}

void dot_batch(const float* keys, std::size_t rows, std::size_t dim, const float* query,
               float* out) {
    kernels().dot_batch(keys, rows, dim, query, out);
}

const char* active_kernel() { return kernels().name; }

}  // namespace geosolve::simd
