#pragma once

#include <exception>
#include <mutex>

namespace cos2q {

template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  std::exception_ptr error;
  std::size_t error_index = n;
  std::mutex guard;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      // keep the lowest index so the reported error does not depend on scheduling
      if (static_cast<std::size_t>(i) < error_index) {
        error_index = static_cast<std::size_t>(i);
        error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace cos2q
