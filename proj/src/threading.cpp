#include "glacier/threading.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace glacier {

namespace {
int g_threads = 1;
}

void set_thread_count(int n) { g_threads = std::max(1, n); }
int thread_count() { return g_threads; }

void parallel_rows(int rows, const std::function<void(int, int)>& fn) {
    int workers = std::min(g_threads, rows);
    if (workers <= 1) {
        if (rows > 0) fn(0, rows);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    int base = rows / workers;
    int extra = rows % workers;
    int begin = 0;
    for (int i = 0; i < workers; ++i) {
        int len = base + (i < extra ? 1 : 0);
        int end = begin + len;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
        begin = end;
    }
    for (auto& t : pool) t.join();
}

} // namespace glacier
