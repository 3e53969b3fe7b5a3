#include "subdiff/parallel.hpp"

namespace subdiff {

namespace {
std::atomic<int> g_threads{1};
}

int default_threads() noexcept { return g_threads.load(); }

void set_default_threads(int threads) noexcept { g_threads.store(threads > 0 ? threads : 1); }

}  // namespace subdiff
