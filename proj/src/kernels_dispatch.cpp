#include "graybatt/kernels.hpp"

#include <cstdlib>
#include <string>

namespace graybatt::kern {

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

const Backend& resolve() {
    const char* env = std::getenv("GRAYBATT_KERNELS");
    if (env != nullptr) {
        const std::string want(env);
        if (want == "scalar") return scalar_backend();
        if (want == "avx2" && avx2_available()) return avx2_backend();
        return scalar_backend();
    }
    return avx2_available() ? avx2_backend() : scalar_backend();
}

}  // namespace

const Backend& active() {
    static const Backend& b = resolve();
    return b;
}

const std::string& active_name() {
    static const std::string name = active().name;
    return name;
}

}  // namespace graybatt::kern
