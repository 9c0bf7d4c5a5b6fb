#include "umbra/parallel.hpp"

#include <algorithm>

namespace umbra {

namespace {
std::atomic<unsigned> g_thread_cap{0};

constexpr std::size_t kChunks = 64;
}  // namespace

void set_thread_cap(unsigned n) { g_thread_cap.store(n); }

unsigned thread_cap() {
    unsigned cap = g_thread_cap.load();
    if (cap == 0) {
        cap = std::thread::hardware_concurrency();
        if (cap == 0) cap = 1;
    }
    return cap;
}

void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    std::size_t chunks = std::min(n, kChunks);
    std::size_t per = (n + chunks - 1) / chunks;
    unsigned workers = std::min<std::size_t>(thread_cap(), chunks);
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c)
            fn(c, c * per, std::min(n, (c + 1) * per));
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t c = next.fetch_add(1);
                if (c >= chunks) break;
                fn(c, c * per, std::min(n, (c + 1) * per));
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace umbra
