#include "spectral_atlas/common.hpp"

#include <atomic>
#include <charconv>
#include <cstdlib>

namespace atlas {
namespace {

std::atomic<int> g_thread_override{0};

std::vector<double> parse_numbers(const std::string& text, std::size_t expected,
                                  const char* what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    std::string field = text.substr(pos, comma - pos);
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    while (!field.empty() && field.back() == ' ') field.pop_back();
    double v = 0;
    auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || end != field.data() + field.size() ||
        !std::isfinite(v))
      throw UsageError(std::string("malformed ") + what + ": '" + text + "'");
    out.push_back(v);
    pos = comma + 1;
  }
  if (out.size() != expected)
    throw UsageError(std::string("malformed ") + what + ": expected " +
                     std::to_string(expected) + " comma-separated numbers, got '" +
                     text + "'");
  return out;
}

}  // namespace

Box parse_box(const std::string& text) {
  auto v = parse_numbers(text, 4, "box");
  Box b{v[0], v[1], v[2], v[3]};
  if (!(b.x1 > b.x0) || !(b.y1 > b.y0))
    throw UsageError("box must satisfy x0 < x1 and y0 < y1: '" + text + "'");
  return b;
}

Complex parse_complex(const std::string& text) {
  auto v = parse_numbers(text, 2, "complex number");
  return {v[0], v[1]};
}

int thread_count() {
  if (int o = g_thread_override.load(); o > 0) return o;
  if (const char* env = std::getenv("SPECTRAL_ATLAS_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void set_thread_count(int n) { g_thread_override.store(n > 0 ? n : 0); }

}  // namespace atlas
