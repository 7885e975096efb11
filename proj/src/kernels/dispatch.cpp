#include "fracsign/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace fracsign::kernels {

namespace detail {

#if defined(__x86_64__) || defined(_M_X64)
const Variant* avx2_impl(); // defined in kernels_avx2.cpp when the compiler can emit AVX2
#endif
#if defined(__aarch64__)
const Variant* neon_impl();
#endif

const Variant* avx2() {
#if (defined(__x86_64__) || defined(_M_X64)) && defined(FRACSIGN_HAVE_AVX2_TU)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return avx2_impl();
#endif
    return nullptr;
}

const Variant* neon() {
#if defined(__aarch64__)
    return neon_impl();
#else
    return nullptr;
#endif
}

const Variant* const* available() {
    static const Variant* table[4] = {nullptr, nullptr, nullptr, nullptr};
    static bool init = [] {
        int k = 0;
        table[k++] = &scalar;
        if (const Variant* v = avx2()) table[k++] = v;
        if (const Variant* v = neon()) table[k++] = v;
        table[k] = nullptr;
        return true;
    }();
    (void)init;
    return table;
}

namespace {

const Variant* select() {
    const char* forced = std::getenv("FRACSIGN_KERNEL");
    if (forced != nullptr) {
        for (const Variant* const* v = available(); *v != nullptr; ++v)
            if (std::strcmp((*v)->name, forced) == 0) return *v;
        // Unknown or unavailable name: fall through to the default choice.
    }
    const Variant* best = &scalar;
    for (const Variant* const* v = available(); *v != nullptr; ++v) best = *v;
    return best;
}

const Variant& active() {
    static const Variant* v = select();
    return *v;
}

} // namespace

} // namespace detail

double dot(const double* a, const double* b, std::size_t n) {
    return detail::active().dot(a, b, n);
}

void axpy(double s, const double* x, double* y, std::size_t n) {
    detail::active().axpy(s, x, y, n);
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
    detail::active().mul(a, b, out, n);
}

const char* active_variant() { return detail::active().name; }

} // namespace fracsign::kernels
