#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nilstruct/manifold.hpp"

namespace nilstruct {

// Error with manifest coordinates (section and line number).
class ManifestError : public Error {
 public:
  ManifestError(const std::string& what, const std::string& section, int line)
      : Error(what + " (section [" + section + "], line " +
              std::to_string(line) + ")"),
        section_(section), line_(line) {}
  const std::string& section() const { return section_; }
  int line() const { return line_; }

 private:
  std::string section_;
  int line_;
};

// Parsed manifest. Sections: [manifold] (n, m, coords, name), [metric]
// (row = ... per matrix row), optional [structure] (row = ...), optional
// [base] (n, coords, row = ...), optional [transition] (phi, theta),
// [conformal] (h), [form] (q), [sampling] (points, seed, box, tolerance),
// [curve] (z0, v0, w0, t_end, step, a, b), [surface] (base, reparam_h,
// reparam_t). Values are comma lists of expression strings or numbers.
struct Manifest {
  int schema_version = 1;
  std::string name;
  int n = 1;
  int m = 0;
  std::vector<std::string> coords;  // empty -> z1..z{2n+m}
  std::vector<std::vector<std::string>> metric_rows;
  std::vector<std::vector<std::string>> structure_rows;

  struct Base {
    int n = 0;
    std::vector<std::string> coords;
    std::vector<std::vector<std::string>> rows;
  };
  std::optional<Base> base;

  std::vector<std::string> phi;
  std::vector<std::string> theta;

  std::string conformal_h;
  std::vector<std::string> form_q;

  Sampling sampling;

  struct Curve {
    std::vector<double> z0, v0, w0;
    double t_end = 1.0;
    double step = 1e-3;
    std::string a = "0";
    std::string b = "0";
  };
  std::optional<Curve> curve;

  struct Surface {
    std::vector<std::string> base;
    std::string reparam_h;
    std::string reparam_t;
  };
  std::optional<Surface> surface;

  std::string digest;  // FNV-1a of the source text, 16 hex digits
};

Manifest parse_manifest_text(const std::string& text);
Manifest parse_manifest_file(const std::string& path);

// Builds the chart (coordinate table, metric and structure fields, base
// chart when present). Expression errors are rethrown as ManifestError
// with the entry position.
ChartManifold manifest_to_chart(const Manifest& m);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace nilstruct
