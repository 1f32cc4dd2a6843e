#include "latail/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace latail::kernels {

const Ops* avx2_ops_impl();
const Ops* neon_ops_impl();

const Ops* avx2_ops() {
#if defined(__x86_64__) || defined(__i386__)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return avx2_ops_impl();
#endif
    return nullptr;
}

const Ops* neon_ops() { return neon_ops_impl(); }

const Ops& active() {
    static const Ops* selected = [] {
        const char* req = std::getenv("LATAIL_KERNELS");
        if (req) {
            if (!std::strcmp(req, "scalar")) return &scalar_ops();
            if (!std::strcmp(req, "avx2") && avx2_ops()) return avx2_ops();
            if (!std::strcmp(req, "neon") && neon_ops()) return neon_ops();
            return &scalar_ops();
        }
        if (const Ops* v = avx2_ops()) return v;
        if (const Ops* v = neon_ops()) return v;
        return &scalar_ops();
    }();
    return *selected;
}

} // namespace latail::kernels
