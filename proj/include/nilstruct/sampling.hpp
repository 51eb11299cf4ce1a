#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace nilstruct {

// Seeded sampling configuration shared by all residual checks. Points are
// drawn uniformly from the box [lo, hi]^dim; identical settings always
// produce the identical point list.
struct Sampling {
  int points = 20;
  double lo = -1.0;
  double hi = 1.0;
  std::uint64_t seed = 42;
  double tolerance = 1e-9;
};

// Deterministic uniform deviates. mt19937_64 output bits are mapped to
// [0,1) directly; the standard specifies the engine bit-exactly, so the
// stream is reproducible everywhere (library distributions are not).
class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed) : engine_(seed) {}
  double next() { return static_cast<double>(engine_() >> 11) * 0x1p-53; }
  double next(double lo, double hi) { return lo + (hi - lo) * next(); }

 private:
  std::mt19937_64 engine_;
};

std::vector<std::vector<double>> sample_points(const Sampling& s, int dim);

}  // namespace nilstruct
