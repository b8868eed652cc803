#include <cstdlib>
#include <string_view>

#include "prefixseal/kernels/kernels.hpp"

namespace prefixseal::kernels {

namespace {

#if defined(__x86_64__) || defined(_M_X64)
const AesKernel* const kAes[] = {&scalar::aes, &x86::aesni};
const PolyvalKernel* const kPolyval[] = {&scalar::polyval, &x86::clmul};
const Argon2Kernel* const kArgon2[] = {&scalar::argon2, &x86::avx2};
#else
const AesKernel* const kAes[] = {&scalar::aes};
const PolyvalKernel* const kPolyval[] = {&scalar::polyval};
const Argon2Kernel* const kArgon2[] = {&scalar::argon2};
#endif

bool scalar_pinned() noexcept {
    const char* env = std::getenv("PREFIXSEAL_KERNELS");
    return env != nullptr && std::string_view(env) == "scalar";
}

template <typename Kernel, std::size_t N>
const Kernel& pick(const Kernel* const (&table)[N]) noexcept {
    if (!scalar_pinned()) {
        for (std::size_t i = N; i-- > 1;)
            if (table[i]->available()) return *table[i];
    }
    return *table[0];
}

} // namespace

std::span<const AesKernel* const> aes_kernels() noexcept { return kAes; }
std::span<const PolyvalKernel* const> polyval_kernels() noexcept { return kPolyval; }
std::span<const Argon2Kernel* const> argon2_kernels() noexcept { return kArgon2; }

const AesKernel& default_aes() noexcept {
    static const AesKernel& k = pick(kAes);
    return k;
}

const PolyvalKernel& default_polyval() noexcept {
    static const PolyvalKernel& k = pick(kPolyval);
    return k;
}

const Argon2Kernel& default_argon2() noexcept {
    static const Argon2Kernel& k = pick(kArgon2);
    return k;
}

} // namespace prefixseal::kernels
