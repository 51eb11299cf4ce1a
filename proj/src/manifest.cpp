#include "nilstruct/manifest.hpp"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace nilstruct {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t comma = s.find(',', start);
    if (comma == std::string::npos) {
      std::string piece = trim(s.substr(start));
      if (!piece.empty()) out.push_back(piece);
      break;
    }
    out.push_back(trim(s.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

double parse_number(const std::string& v, const std::string& section,
                    int line) {
  char* end = nullptr;
  double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ManifestError("expected a number, got '" + v + "'", section, line);
  return x;
}

int parse_int(const std::string& v, const std::string& section, int line) {
  double x = parse_number(v, section, line);
  int i = static_cast<int>(x);
  if (static_cast<double>(i) != x)
    throw ManifestError("expected an integer, got '" + v + "'", section, line);
  return i;
}

std::vector<double> parse_number_list(const std::string& v,
                                      const std::string& section, int line) {
  std::vector<double> out;
  for (const std::string& piece : split_list(v))
    out.push_back(parse_number(piece, section, line));
  return out;
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Manifest parse_manifest_text(const std::string& text) {
  Manifest m;
  m.digest = fnv1a_hex(text);

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;

  Manifest::Base base;
  bool saw_base = false;
  Manifest::Curve curve;
  bool saw_curve = false;
  Manifest::Surface surface;
  bool saw_surface = false;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ManifestError("unterminated section header", section, line_no);
      section = trim(line.substr(1, line.size() - 2));
      if (section != "manifold" && section != "metric" &&
          section != "structure" && section != "base" &&
          section != "transition" && section != "conformal" &&
          section != "form" && section != "sampling" && section != "curve" &&
          section != "surface")
        throw ManifestError("unknown section", section, line_no);
      if (section == "base") saw_base = true;
      if (section == "curve") saw_curve = true;
      if (section == "surface") saw_surface = true;
      continue;
    }

    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ManifestError("expected 'key = value'", section, line_no);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));

    if (section.empty()) {
      if (key == "schema_version") {
        m.schema_version = parse_int(value, section, line_no);
        continue;
      }
      throw ManifestError("key '" + key + "' outside any section", section,
                          line_no);
    }

    auto unknown = [&]() -> ManifestError {
      return ManifestError("unknown key '" + key + "'", section, line_no);
    };

    if (section == "manifold") {
      if (key == "name") m.name = value;
      else if (key == "n") m.n = parse_int(value, section, line_no);
      else if (key == "m") m.m = parse_int(value, section, line_no);
      else if (key == "coords") m.coords = split_list(value);
      else throw unknown();
    } else if (section == "metric") {
      if (key == "row") m.metric_rows.push_back(split_list(value));
      else throw unknown();
    } else if (section == "structure") {
      if (key == "row") m.structure_rows.push_back(split_list(value));
      else throw unknown();
    } else if (section == "base") {
      if (key == "n") base.n = parse_int(value, section, line_no);
      else if (key == "coords") base.coords = split_list(value);
      else if (key == "row") base.rows.push_back(split_list(value));
      else throw unknown();
    } else if (section == "transition") {
      if (key == "phi") m.phi = split_list(value);
      else if (key == "theta") m.theta = split_list(value);
      else throw unknown();
    } else if (section == "conformal") {
      if (key == "h") m.conformal_h = value;
      else throw unknown();
    } else if (section == "form") {
      if (key == "q") m.form_q = split_list(value);
      else throw unknown();
    } else if (section == "sampling") {
      if (key == "points") m.sampling.points = parse_int(value, section, line_no);
      else if (key == "seed")
        m.sampling.seed =
            static_cast<std::uint64_t>(parse_number(value, section, line_no));
      else if (key == "tolerance")
        m.sampling.tolerance = parse_number(value, section, line_no);
      else if (key == "box") {
        auto v = parse_number_list(value, section, line_no);
        if (v.size() != 2 || v[0] >= v[1])
          throw ManifestError("box needs 'lo, hi' with lo < hi", section,
                              line_no);
        m.sampling.lo = v[0];
        m.sampling.hi = v[1];
      } else throw unknown();
    } else if (section == "curve") {
      if (key == "z0") curve.z0 = parse_number_list(value, section, line_no);
      else if (key == "v0") curve.v0 = parse_number_list(value, section, line_no);
      else if (key == "w0") curve.w0 = parse_number_list(value, section, line_no);
      else if (key == "t_end") curve.t_end = parse_number(value, section, line_no);
      else if (key == "step") curve.step = parse_number(value, section, line_no);
      else if (key == "a") curve.a = value;
      else if (key == "b") curve.b = value;
      else throw unknown();
    } else if (section == "surface") {
      if (key == "base") surface.base = split_list(value);
      else if (key == "reparam_h") surface.reparam_h = value;
      else if (key == "reparam_t") surface.reparam_t = value;
      else throw unknown();
    }
  }

  if (saw_base) m.base = std::move(base);
  if (saw_curve) m.curve = std::move(curve);
  if (saw_surface) m.surface = std::move(surface);
  return m;
}

Manifest parse_manifest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open manifest file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest_text(buf.str());
}

namespace {

TensorField rows_to_field(const std::vector<std::vector<std::string>>& rows,
                          int dim, const VarTablePtr& vars, Signature sig,
                          const std::string& section) {
  if (static_cast<int>(rows.size()) != dim)
    throw ManifestError("matrix has " + std::to_string(rows.size()) +
                            " rows, expected " + std::to_string(dim),
                        section, 0);
  TensorField out(dim, std::move(sig), vars);
  for (int r = 0; r < dim; ++r) {
    const auto& row = rows[(std::size_t)r];
    if (static_cast<int>(row.size()) != dim)
      throw ManifestError("row " + std::to_string(r + 1) + " has " +
                              std::to_string(row.size()) +
                              " entries, expected " + std::to_string(dim),
                          section, 0);
    for (int c = 0; c < dim; ++c) {
      try {
        out.at({r, c}) = parse_expression(row[(std::size_t)c], vars);
      } catch (const ParseError& e) {
        throw ManifestError("row " + std::to_string(r + 1) + ", column " +
                                std::to_string(c + 1) + ": " + e.what(),
                            section, 0);
      }
    }
  }
  return out;
}

}  // namespace

ChartManifold manifest_to_chart(const Manifest& m) {
  if (m.n < 1 || m.m < 0)
    throw ManifestError("need n >= 1 and m >= 0", "manifold", 0);
  int dim = 2 * m.n + m.m;

  ChartManifold chart;
  chart.name = m.name.empty() ? "manifest" : m.name;
  chart.n = m.n;
  chart.m = m.m;
  if (m.coords.empty()) {
    chart.coords = default_coords(dim);
  } else {
    if (static_cast<int>(m.coords.size()) != dim)
      throw ManifestError("coords lists " + std::to_string(m.coords.size()) +
                              " names, expected 2n+m = " + std::to_string(dim),
                          "manifold", 0);
    chart.coords = make_vars(m.coords);
  }

  if (m.metric_rows.empty())
    throw ManifestError("missing [metric] section", "metric", 0);
  chart.metric = rows_to_field(m.metric_rows, dim, chart.coords,
                               sig_of({Slot::Lower, Slot::Lower}), "metric");

  if (m.structure_rows.empty()) {
    chart.f = adapted_f(m.n, m.m, chart.coords);
  } else {
    chart.f = rows_to_field(m.structure_rows, dim, chart.coords,
                            sig_of({Slot::Upper, Slot::Lower}), "structure");
  }

  if (m.base.has_value()) {
    ChartManifold::BaseChart base;
    base.n = m.base->n > 0 ? m.base->n : m.n;
    base.coords = m.base->coords.empty() ? default_coords(base.n)
                                         : make_vars(m.base->coords);
    if (static_cast<int>(base.coords->size()) != base.n)
      throw ManifestError("base coords size does not match base n", "base", 0);
    base.metric = rows_to_field(m.base->rows, base.n, base.coords,
                                sig_of({Slot::Lower, Slot::Lower}), "base");
    // when the chart is the lift of the base, the lift machinery rehosts
    // base expressions onto the chart table, so the names must line up
    if (dim == 2 * base.n)
      for (int i = 0; i < base.n; ++i)
        if ((*base.coords)[(std::size_t)i] != (*chart.coords)[(std::size_t)i])
          throw ManifestError(
              "base coordinates must be a prefix of the chart coordinates",
              "base", 0);
    chart.base = std::move(base);
  }
  return chart;
}

}  // namespace nilstruct
