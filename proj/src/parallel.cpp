#include "carleson_frames/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <string_view>

namespace cframes {

std::size_t thread_cap() {
  std::size_t hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("CARLESON_FRAMES_THREADS")) {
    const std::string_view text(env);
    std::size_t cap = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), cap);
    if (ec == std::errc() && ptr == text.data() + text.size() && cap > 0) return cap;
  }
  return hw;
}

}  // namespace cframes
