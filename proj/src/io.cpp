#include "spectral_atlas/io.hpp"

#include <zlib.h>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace atlas {

namespace {

Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw UsageError("complex numbers are written [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<double> reals(const Json& j, const char* what) {
  if (!j.is_array()) throw UsageError(std::string(what) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) throw UsageError(std::string(what) + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

const Json& field(const Json& j, const char* name) {
  if (!j.contains(name)) throw UsageError(std::string("potential is missing \"") + name + "\"");
  return j.at(name);
}

std::string number(double x, const char* fmt = "%.17g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, x);
  return buf;
}

}  // namespace

Potential potential_from_json(const Json& j) {
  if (!j.is_object()) throw UsageError("potential must be a JSON object");
  const std::string type = field(j, "type").get<std::string>();
  if (type == "trig") {
    const int l = field(j, "l").get<int>(), m = field(j, "m").get<int>();
    const Json& cs = field(j, "coeffs");
    if (!cs.is_array() || static_cast<int>(cs.size()) != m - l + 1)
      throw UsageError("trig potential needs m - l + 1 coefficients");
    std::vector<Complex> coeffs;
    for (const auto& c : cs) coeffs.push_back(complex_from_json(c));
    return Potential(TrigPolynomial1D(l, std::move(coeffs)));
  }
  if (type == "separable") {
    const Json& parts = field(j, "parts");
    if (!parts.is_array() || parts.empty()) throw UsageError("separable potential needs parts");
    std::vector<Potential> ps;
    for (const auto& p : parts) ps.push_back(potential_from_json(p));
    return Potential(SeparableSum(std::move(ps)));
  }
  if (type == "pwl")
    return Potential(PiecewiseLinear1D(reals(field(j, "breaks"), "breaks"),
                                       reals(field(j, "values"), "values")));
  throw UsageError("unknown potential type '" + type + "'");
}

Json potential_to_json(const Potential& v) {
  Json j;
  if (const auto* t = v.as<TrigPolynomial1D>()) {
    j["type"] = "trig";
    j["l"] = t->low();
    j["m"] = t->high();
    j["coeffs"] = complex_array(t->coefficients());
  } else if (const auto* s = v.as<SeparableSum>()) {
    j["type"] = "separable";
    j["parts"] = Json::array();
    for (const auto& p : s->parts()) j["parts"].push_back(potential_to_json(p));
  } else if (const auto* p = v.as<PiecewiseLinear1D>()) {
    j["type"] = "pwl";
    j["breaks"] = p->breaks();
    j["values"] = p->values();
  } else {
    throw UsageError("sampled potentials have no JSON form");
  }
  return j;
}

Potential load_potential(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(read_text(path));
  } catch (const Json::exception& e) {
    throw UsageError("cannot parse potential " + path.string() + ": " + e.what());
  }
  try {
    return potential_from_json(j);
  } catch (const Json::exception& e) {
    throw UsageError("bad potential " + path.string() + ": " + e.what());
  }
}

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json complex_array(std::span<const Complex> zs) {
  Json a = Json::array();
  for (const auto& z : zs) a.push_back(complex_json(z));
  return a;
}

Json polylines_json(std::span<const Polyline> lines) {
  Json a = Json::array();
  for (const auto& l : lines) {
    Json o;
    o["closed"] = l.closed;
    o["points"] = complex_array(l.points);
    a.push_back(std::move(o));
  }
  return a;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint32_t crc32_of(const std::string& bytes) {
  uLong c = crc32(0L, Z_NULL, 0);
  std::size_t done = 0;
  while (done < bytes.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - done, 1u << 30));
    c = crc32(c, reinterpret_cast<const Bytef*>(bytes.data() + done), chunk);
    done += chunk;
  }
  return static_cast<std::uint32_t>(c);
}

std::string grid_csv(const SpectrumSet& s) {
  std::string out = "x,y,label,G\n";
  for (int j = 0; j < s.n; ++j)
    for (int i = 0; i < s.n; ++i) {
      const Complex z = s.node(i, j);
      const auto& c = s.at(i, j);
      out += number(z.real()) + "," + number(z.imag()) + "," + label_code(c.label) + "," +
             number(c.g) + "\n";
    }
  return out;
}

namespace {

unsigned char shade(Label l) {
  switch (l) {
    case Label::Resolvent: return 255;
    case Label::Range: return 128;
    case Label::LevelSet: return 0;
  }
  return 255;
}

}  // namespace

std::string ppm_image(const SpectrumSet& s) {
  const int scale = std::max(1, 512 / std::max(1, s.n));
  const int side = s.n * scale;
  std::string out = "P6\n" + std::to_string(side) + " " + std::to_string(side) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(side) * side * 3);
  for (int row = 0; row < side; ++row) {
    const int j = s.n - 1 - row / scale;
    for (int col = 0; col < side; ++col) {
      const unsigned char v = shade(s.label(col / scale, j));
      out.append(3, static_cast<char>(v));
    }
  }
  return out;
}

std::string svg_image(const SpectrumSet& s, std::span<const Polyline> overlays) {
  const double w = s.box.width(), h = s.box.height();
  const double px = 600.0 / std::max(w, h);
  const double sw = 1.5 / px;  // stroke width of 1.5 px in data units
  auto X = [&](double x) { return number(x, "%.6g"); };
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + number(w * px, "%.0f") +
         "\" height=\"" + number(h * px, "%.0f") + "\" viewBox=\"" + X(s.box.x0) + " " +
         X(-s.box.y1) + " " + X(w) + " " + X(h) + "\">\n";
  out += "<rect x=\"" + X(s.box.x0) + "\" y=\"" + X(-s.box.y1) + "\" width=\"" + X(w) +
         "\" height=\"" + X(h) + "\" fill=\"white\"/>\n";
  out += "<g transform=\"scale(1,-1)\" shape-rendering=\"crispEdges\">\n";
  // One rectangle per run of equal non-resolvent labels along a row.
  for (int j = 0; j < s.n; ++j) {
    int i = 0;
    while (i < s.n) {
      const Label l = s.label(i, j);
      int k = i;
      while (k + 1 < s.n && s.label(k + 1, j) == l) ++k;
      if (l != Label::Resolvent) {
        const double x0 = s.box.x0 + (i - 0.5) * s.hx, y0 = s.box.y0 + (j - 0.5) * s.hy;
        out += "<rect x=\"" + X(x0) + "\" y=\"" + X(y0) + "\" width=\"" + X((k - i + 1) * s.hx) +
               "\" height=\"" + X(s.hy) + "\" fill=\"" +
               (l == Label::LevelSet ? "#404040" : "#a0a0a0") + "\"/>\n";
      }
      i = k + 1;
    }
  }
  out += "</g>\n<g transform=\"scale(1,-1)\" fill=\"none\">\n";
  auto path = [&](const Polyline& line, const std::string& style) {
    if (line.points.size() < 2) return;
    std::string d = "M";
    for (std::size_t k = 0; k < line.points.size(); ++k)
      d += (k ? " " : "") + X(line.points[k].real()) + "," + X(line.points[k].imag());
    if (line.closed) d += " Z";
    out += "<path d=\"" + d + "\" " + style + "/>\n";
  };
  for (const auto& c : s.curves) path(c, "stroke=\"black\" stroke-width=\"" + X(sw) + "\"");
  for (const auto& c : overlays)
    path(c, "stroke=\"#c03030\" stroke-width=\"" + X(sw) + "\" stroke-dasharray=\"" + X(6 * sw) +
                " " + X(4 * sw) + "\"");
  out += "</g>\n<g transform=\"scale(1,-1)\" fill=\"#606060\">\n";
  for (const auto& z : s.range_points)
    out += "<circle cx=\"" + X(z.real()) + "\" cy=\"" + X(z.imag()) + "\" r=\"" + X(1.2 * sw) + "\"/>\n";
  out += "</g>\n</svg>\n";
  return out;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

ArtifactWriter::ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw UsageError("cannot create output directory " + dir_.string() + ": " + ec.message());
}

void ArtifactWriter::write(const std::string& name, const std::string& bytes) {
  const auto path = dir_ / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
  written_.emplace_back(name, bytes);
}

void ArtifactWriter::write_json(const std::string& name, const Json& j) { write(name, dump(j)); }

void ArtifactWriter::write_manifest(const std::string& command, const Json& config, bool ok,
                                    const Json& notes) {
  Json m;
  m["schema"] = "v1";
  m["command"] = command;
  m["config"] = config;
  m["artifacts"] = Json::array();
  for (const auto& [name, bytes] : written_) {
    char hex[16];
    std::snprintf(hex, sizeof hex, "%08x", crc32_of(bytes));
    m["artifacts"].push_back({{"name", name}, {"bytes", bytes.size()}, {"crc32", hex}});
  }
  m["status"] = ok ? "ok" : "failed";
  if (!notes.empty()) m["notes"] = notes;
  const std::string text = dump(m);
  std::ofstream out(dir_ / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write manifest in " + dir_.string());
  out << text;
}

}  // namespace atlas
