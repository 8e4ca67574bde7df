#pragma once

#include <optional>
#include <string>

#if defined(__unix__) || defined(__APPLE__)
#include <sys/resource.h>
#include <unistd.h>
#endif

#include "slobench/io_util.hpp"

namespace slobench {

struct ResourceSample {
  std::optional<double> cpu_ms_delta;
  std::optional<long long> rss_bytes;
};

// Cumulative process CPU time in milliseconds (user + system).
inline std::optional<double> process_cpu_ms() {
#if defined(__unix__) || defined(__APPLE__)
  rusage usage{};
  if (getrusage(RUSAGE_SELF, &usage) != 0) return std::nullopt;
  const double user =
      usage.ru_utime.tv_sec * 1000.0 + usage.ru_utime.tv_usec / 1000.0;
  const double sys = usage.ru_stime.tv_sec * 1000.0 + usage.ru_stime.tv_usec / 1000.0;
  return user + sys;
#else
  return std::nullopt;
#endif
}

// Point-in-time resident set size in bytes.
inline std::optional<long long> process_rss_bytes() {
#if defined(__linux__)
  try {
    const std::string statm = read_file("/proc/self/statm");
    // second field: resident pages
    std::size_t pos = statm.find(' ');
    if (pos == std::string::npos) return std::nullopt;
    const long long pages = std::stoll(statm.substr(pos + 1));
    return pages * static_cast<long long>(sysconf(_SC_PAGESIZE));
  } catch (...) {
    return std::nullopt;
  }
#else
  return std::nullopt;
#endif
}

// Per-batch resource meter: CPU time deltas against the previous call plus
// the current resident set. Unavailable counters are recorded as absent and
// the run continues.
class ResourceMeter {
 public:
  ResourceMeter() { last_cpu_ms_ = process_cpu_ms(); }

  ResourceSample sample() {
    ResourceSample s;
    const auto now = process_cpu_ms();
    if (now && last_cpu_ms_) s.cpu_ms_delta = *now - *last_cpu_ms_;
    if (now) last_cpu_ms_ = now;
    s.rss_bytes = process_rss_bytes();
    return s;
  }

 private:
  std::optional<double> last_cpu_ms_;
};

}  // namespace slobench
