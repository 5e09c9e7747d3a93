#pragma once

// File formats: polyhedron / partition JSON, spectral images (raw + JSON
// header, or CSV), density maps (raw f32 + JSON header), PGM previews.

#include <filesystem>
#include <string>
#include <vector>

#include "polyx/classify.hpp"
#include "polyx/density.hpp"
#include "polyx/geom.hpp"
#include "polyx/unmix.hpp"

namespace polyx::io {

namespace fs = std::filesystem;

// {"dim": n, "halfspaces": [{"offset": s, "normal": [...]}, ...]}
// Normals are normalised on load; the writer uses 17 significant digits.
std::string polyhedron_to_json(const geom::PolyhedronH& p, int indent = 2);
geom::PolyhedronH polyhedron_from_json(const std::string& text);
geom::PolyhedronH load_polyhedron(const fs::path& path);
void save_polyhedron(const geom::PolyhedronH& p, const fs::path& path);

// {"classes": K, "provenance": "kmeans"|"gmm-svm", "dim": n,
//  "polyhedra": [<polyhedron>, ...], "centroids": [[...], ...]}
std::string partition_to_json(const classify::PartitionModel& m);
classify::PartitionModel partition_from_json(const std::string& text);
void save_partition(const classify::PartitionModel& m, const fs::path& path);
classify::PartitionModel load_partition(const fs::path& path);

enum class Dtype { kF32, kF64 };

// Header: {"width", "height", "bands", "dtype": "f32"|"f64",
//          "layout": "pixel-major", "data_file": "<relative path>"}
// A .csv path is read as a pixels x bands matrix (width = pixels, height = 1),
// with an optional non-numeric header row.
unmix::SpectralImage load_image(const fs::path& path);
void save_image(const unmix::SpectralImage& img, const fs::path& header_path, Dtype dtype = Dtype::kF64);
Matrix parse_csv_matrix(const std::string& text);

// Density maps are stored as little-endian f32, pixel-major, class-minor,
// next to a header {"width", "height", "classes", "dtype": "f32",
// "layout": "pixel-major", "data_file", "class_names"}.
void save_density(const density::DensityMap& map, Index width, Index height, const fs::path& header_path);
density::DensityMap load_density(const fs::path& header_path, Index* width = nullptr, Index* height = nullptr);

/// 8-bit binary PGM of column `cls`, values clamped to [0, 1].
void write_pgm(const Matrix& values, Index cls, Index width, Index height, const fs::path& path);

void write_csv(const Matrix& m, const fs::path& path, const std::vector<std::string>& header = {});

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

}  // namespace polyx::io
