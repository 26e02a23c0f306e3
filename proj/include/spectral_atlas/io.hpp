#pragma once

#include "spectral_atlas/common.hpp"
#include "spectral_atlas/potentials.hpp"
#include "spectral_atlas/spectrum.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace atlas {

using Json = nlohmann::ordered_json;

// {"type": "trig", "l", "m", "coeffs": [[re, im], ...]}
// {"type": "separable", "parts": [...]}
// {"type": "pwl", "breaks": [...], "values": [...]}
Potential potential_from_json(const Json& j);
Json potential_to_json(const Potential& v);
Potential load_potential(const std::filesystem::path& path);

Json complex_json(Complex z);
Json complex_array(std::span<const Complex> zs);
Json polylines_json(std::span<const Polyline> lines);

std::string read_text(const std::filesystem::path& path);
std::uint32_t crc32_of(const std::string& bytes);

// x, y, label, G per node (row-major from the lower-left corner).
std::string grid_csv(const SpectrumSet& s);
// Binary P6: resolvent white, C gray, P black; top row is the largest y.
std::string ppm_image(const SpectrumSet& s);
// Shaded grid, stroked level curves, dotted C points, dashed overlays.
std::string svg_image(const SpectrumSet& s, std::span<const Polyline> overlays = {});

// Writes files into one directory and remembers their checksums for the
// manifest.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  void write(const std::string& name, const std::string& bytes);
  void write_json(const std::string& name, const Json& j);
  // manifest.json: schema, command, resolved config, checksums, status.
  void write_manifest(const std::string& command, const Json& config, bool ok,
                      const Json& notes = Json::object());

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::string>> written_;  // name, bytes
};

// Canonical two-space JSON text with a trailing newline.
std::string dump(const Json& j);

}  // namespace atlas
