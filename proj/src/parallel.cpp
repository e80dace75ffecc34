#include "oscswap/parallel.hpp"

#include <cstdlib>

namespace oscswap {

std::size_t thread_count() {
  if (const char* env = std::getenv("OSCSWAP_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) return static_cast<std::size_t>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace oscswap
