#pragma once

#include <cstddef>

// Low-level array kernels behind the fractional-convolution loops.
//
// Every kernel has a plain scalar reference implementation and, where the
// host CPU supports it, a vectorized variant (AVX2+FMA on x86-64, NEON on
// aarch64).  The active variant is chosen once at startup from CPU feature
// detection; set FRACSIGN_KERNEL=scalar|avx2|neon to force one.  Variants
// are allowed to differ from the reference only by floating-point
// reassociation, which the equivalence tests bound.

namespace fracsign::kernels {

// sum_i a[i]*b[i]
double dot(const double* a, const double* b, std::size_t n);

// y[i] += s*x[i]
void axpy(double s, const double* x, double* y, std::size_t n);

// out[i] = a[i]*b[i]
void mul(const double* a, const double* b, double* out, std::size_t n);

// Name of the variant selected at startup ("scalar", "avx2", "neon").
const char* active_variant();

namespace detail {

struct Variant {
    const char* name;
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*mul)(const double*, const double*, double*, std::size_t);
};

// Reference implementation, always present.
extern const Variant scalar;

// Null when the build or the CPU lacks the instruction set.
const Variant* avx2();
const Variant* neon();

// All variants usable on this machine, reference first, null-terminated.
// Exposed so the equivalence tests can compare them pairwise.
const Variant* const* available();

} // namespace detail

} // namespace fracsign::kernels
