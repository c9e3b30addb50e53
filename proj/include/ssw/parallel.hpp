#pragma once

#include <functional>

namespace ssw {

// Worker count used by parallel_for; defaults to 1.
void set_thread_count(int n);
int thread_count();

// Runs body(k) for k in [0, n) on up to thread_count() threads; the first exception is rethrown.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace ssw
