#pragma once

#include <functional>

namespace glacier {

// Process-wide worker count used by parallel_rows. 1 disables threading.
void set_thread_count(int n);
int thread_count();

// Splits [0, rows) into contiguous blocks, one worker per block. Workers
// write disjoint row ranges only, so results are identical for any count.
void parallel_rows(int rows, const std::function<void(int row_begin, int row_end)>& fn);

} // namespace glacier
