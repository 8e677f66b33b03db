#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace fairspace {

using Vec = std::vector<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Library error with a stable machine-readable kind tag (used by the CLI
/// to map failures onto exit codes and messages).
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& msg)
      : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

[[noreturn]] inline void fail(const std::string& kind, const std::string& msg) {
  throw Error(kind, msg);
}

inline void require(bool cond, const std::string& kind, const std::string& msg) {
  if (!cond) fail(kind, msg);
}

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

inline double dist2(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline Vec sub(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec add(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec scaled(const Vec& a, double c) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * c;
  return r;
}

inline Vec normalized(const Vec& a) {
  double n = norm(a);
  if (n == 0.0) fail("zero-vector", "cannot normalize the zero vector");
  return scaled(a, 1.0 / n);
}

inline double vec_sum(const Vec& a) {
  double s = 0.0;
  for (double v : a) s += v;
  return s;
}

/// Worker count for parallel restarts: min(wanted, hardware, FAIRSPACE_THREADS).
inline int thread_budget(int wanted) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  int cap = hw;
  if (const char* env = std::getenv("FAIRSPACE_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) cap = v;
  }
  return std::max(1, std::min(wanted, cap));
}

}  // namespace fairspace
