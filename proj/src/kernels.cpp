#include "kernels_impl.hpp"

#include "dnbs/errors.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace dnbs::kernels {
namespace {

Isa initial_isa() noexcept {
    if (const char* env = std::getenv("DNBS_ISA")) {
        const std::string_view want(env);
        if (want == "scalar") return Isa::scalar;
        if (want == "avx2" && isa_supported(Isa::avx2)) return Isa::avx2;
    }
    return best_isa();
}

std::atomic<const KernelTable*>& active_slot() {
    static std::atomic<const KernelTable*> slot{&kernels_for(initial_isa())};
    return slot;
}

}  // namespace

bool isa_supported(Isa isa) noexcept {
    switch (isa) {
    case Isa::scalar:
        return true;
    case Isa::avx2:
#if defined(DNBS_HAVE_AVX2)
        return __builtin_cpu_supports("avx2");
#else
        return false;
#endif
    }
    return false;
}

Isa best_isa() noexcept { return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar; }

std::string_view isa_name(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

const KernelTable& kernels_for(Isa isa) {
    if (!isa_supported(isa)) {
        throw InvalidArgument("kernel set not supported on this CPU: " + std::string(isa_name(isa)));
    }
#if defined(DNBS_HAVE_AVX2)
    if (isa == Isa::avx2) return detail::avx2_table();
#endif
    return detail::scalar_table();
}

const KernelTable& active() { return *active_slot().load(std::memory_order_acquire); }

void set_active_isa(Isa isa) { active_slot().store(&kernels_for(isa), std::memory_order_release); }

}  // namespace dnbs::kernels
