#include "dilatox/numkit/parallel.hpp"

namespace dilatox::numkit {
namespace {

std::atomic<unsigned>& cap_storage() {
    static std::atomic<unsigned> cap{std::max(1u, std::thread::hardware_concurrency())};
    return cap;
}

}  // namespace

void set_thread_cap(unsigned cap) noexcept { cap_storage().store(std::max(1u, cap)); }

unsigned thread_cap() noexcept { return cap_storage().load(); }

}  // namespace dilatox::numkit
