#include "polyx/io.hpp"

#include <bit>
#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "polyx/error.hpp"

namespace polyx::io {
namespace {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "raw formats assume a little-endian host");

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kMalformedJson, what + ": " + e.what());
  }
}

template <typename T>
T get_field(const json& j, const char* key, const std::string& what) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorCode::kMalformedJson, what + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::kMalformedJson, what + ": bad field '" + key + "': " + e.what());
  }
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

geom::PolyhedronH polyhedron_from(const json& j) {
  const auto dim = get_field<Index>(j, "dim", "polyhedron");
  if (!j.contains("halfspaces") || !j["halfspaces"].is_array()) {
    fail(ErrorCode::kMalformedJson, "polyhedron: 'halfspaces' must be an array");
  }
  std::vector<geom::Halfspace> hs;
  for (const auto& h : j["halfspaces"]) {
    const auto offset = get_field<double>(h, "offset", "halfspace");
    const auto normal = get_field<std::vector<double>>(h, "normal", "halfspace");
    if (static_cast<Index>(normal.size()) != dim) {
      fail(ErrorCode::kInput, "polyhedron: normal length does not match dim");
    }
    hs.emplace_back(offset, Eigen::Map<const Vector>(normal.data(), dim));
  }
  return geom::PolyhedronH(dim, std::move(hs));
}

std::string polyhedron_body(const geom::PolyhedronH& p, const std::string& pad, const std::string& step) {
  std::string out = "{\n" + pad + step + "\"dim\": " + std::to_string(p.dim()) + ",\n" + pad + step +
                    "\"halfspaces\": [";
  for (std::size_t i = 0; i < p.size(); ++i) {
    out += (i ? ",\n" : "\n") + pad + step + step + "{\"offset\": " + fmt17(p[i].offset()) + ", \"normal\": [";
    for (Index c = 0; c < p.dim(); ++c) out += (c ? ", " : "") + fmt17(p[i].normal()(c));
    out += "]}";
  }
  out += "\n" + pad + step + "]\n" + pad + "}";
  return out;
}

Matrix matrix_from(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) fail(ErrorCode::kMalformedJson, what + ": expected a non-empty array of rows");
  const auto first = j[0].get<std::vector<double>>();
  Matrix m(static_cast<Index>(j.size()), static_cast<Index>(first.size()));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const auto row = j[r].get<std::vector<double>>();
    if (row.size() != first.size()) fail(ErrorCode::kMalformedJson, what + ": ragged rows");
    for (std::size_t c = 0; c < row.size(); ++c) m(static_cast<Index>(r), static_cast<Index>(c)) = row[c];
  }
  return m;
}

std::vector<char> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  return std::vector<char>((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_bytes(const fs::path& path, const void* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out) fail(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

Dtype dtype_from(const std::string& s) {
  if (s == "f32") return Dtype::kF32;
  if (s == "f64") return Dtype::kF64;
  fail(ErrorCode::kUnknownDtype, "unknown dtype '" + s + "'");
}

std::size_t dtype_size(Dtype d) { return d == Dtype::kF32 ? 4 : 8; }

Matrix decode_raw(const std::vector<char>& bytes, Dtype dtype, Index rows, Index cols, const fs::path& path) {
  const std::size_t expected = static_cast<std::size_t>(rows * cols) * dtype_size(dtype);
  if (bytes.size() != expected) {
    fail(ErrorCode::kLengthMismatch, "'" + path.string() + "' has " + std::to_string(bytes.size()) +
                                         " bytes, header declares " + std::to_string(expected));
  }
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      const std::size_t i = static_cast<std::size_t>(r * cols + c);
      if (dtype == Dtype::kF32) {
        float f;
        std::memcpy(&f, bytes.data() + i * 4, 4);
        m(r, c) = f;
      } else {
        double d;
        std::memcpy(&d, bytes.data() + i * 8, 8);
        m(r, c) = d;
      }
    }
  }
  return m;
}

}  // namespace

std::string read_text(const fs::path& path) {
  const auto bytes = read_bytes(path);
  return std::string(bytes.begin(), bytes.end());
}

void write_text(const fs::path& path, const std::string& text) { write_bytes(path, text.data(), text.size()); }

std::string polyhedron_to_json(const geom::PolyhedronH& p, int indent) {
  return polyhedron_body(p, "", std::string(static_cast<std::size_t>(std::max(indent, 0)), ' ')) + "\n";
}

geom::PolyhedronH polyhedron_from_json(const std::string& text) {
  return polyhedron_from(parse_json(text, "polyhedron"));
}

geom::PolyhedronH load_polyhedron(const fs::path& path) { return polyhedron_from_json(read_text(path)); }

void save_polyhedron(const geom::PolyhedronH& p, const fs::path& path) { write_text(path, polyhedron_to_json(p)); }

std::string partition_to_json(const classify::PartitionModel& m) {
  std::string out = "{\n  \"classes\": " + std::to_string(m.classes) + ",\n  \"provenance\": \"" +
                    classify::to_string(m.provenance) + "\",\n  \"dim\": " + std::to_string(m.dim()) +
                    ",\n  \"polyhedra\": [";
  for (std::size_t i = 0; i < m.polyhedra.size(); ++i) {
    out += (i ? ",\n    " : "\n    ") + polyhedron_body(m.polyhedra[i], "    ", "  ");
  }
  out += "\n  ]";
  if (m.centroids) {
    out += ",\n  \"centroids\": [";
    for (Index r = 0; r < m.centroids->rows(); ++r) {
      out += (r ? ",\n    [" : "\n    [");
      for (Index c = 0; c < m.centroids->cols(); ++c) out += (c ? ", " : "") + fmt17((*m.centroids)(r, c));
      out += "]";
    }
    out += "\n  ]";
  }
  out += "\n}\n";
  return out;
}

classify::PartitionModel partition_from_json(const std::string& text) {
  const json j = parse_json(text, "partition");
  classify::PartitionModel m;
  m.classes = get_field<int>(j, "classes", "partition");
  m.provenance = classify::provenance_from_string(get_field<std::string>(j, "provenance", "partition"));
  if (!j.contains("polyhedra") || !j["polyhedra"].is_array()) {
    fail(ErrorCode::kMalformedJson, "partition: 'polyhedra' must be an array");
  }
  for (const auto& p : j["polyhedra"]) m.polyhedra.push_back(polyhedron_from(p));
  if (static_cast<int>(m.polyhedra.size()) != m.classes) {
    fail(ErrorCode::kMalformedJson, "partition: polyhedra count != classes");
  }
  if (j.contains("centroids")) m.centroids = matrix_from(j["centroids"], "partition centroids");
  return m;
}

void save_partition(const classify::PartitionModel& m, const fs::path& path) {
  write_text(path, partition_to_json(m));
}

classify::PartitionModel load_partition(const fs::path& path) { return partition_from_json(read_text(path)); }

Matrix parse_csv_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ls, cell, ',')) {
      const char* begin = cell.c_str();
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(begin, &end);
      while (end && (*end == ' ' || *end == '\t')) ++end;
      if (end == begin || (end && *end != '\0') || errno == ERANGE) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (rows.empty() && line_no == 1) continue;  // header row
      fail(ErrorCode::kMalformedCsv, "csv: non-numeric cell on line " + std::to_string(line_no));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      fail(ErrorCode::kMalformedCsv, "csv: line " + std::to_string(line_no) + " has a different column count");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty()) fail(ErrorCode::kMalformedCsv, "csv: no data rows");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  }
  return m;
}

unmix::SpectralImage load_image(const fs::path& path) {
  unmix::SpectralImage img;
  if (path.extension() == ".csv") {
    img.data = parse_csv_matrix(read_text(path));
    img.width = img.data.rows();
    img.height = 1;
    img.validate();
    return img;
  }
  const json h = parse_json(read_text(path), "image header");
  img.width = get_field<Index>(h, "width", "image header");
  img.height = get_field<Index>(h, "height", "image header");
  const auto bands = get_field<Index>(h, "bands", "image header");
  const Dtype dtype = dtype_from(get_field<std::string>(h, "dtype", "image header"));
  if (h.contains("layout") && h["layout"] != "pixel-major") {
    fail(ErrorCode::kMalformedJson, "image header: only pixel-major layout is supported");
  }
  if (img.width < 1 || img.height < 1 || bands < 1) fail(ErrorCode::kMalformedJson, "image header: bad shape");
  const fs::path data_path = path.parent_path() / get_field<std::string>(h, "data_file", "image header");
  img.data = decode_raw(read_bytes(data_path), dtype, img.width * img.height, bands, data_path);
  img.validate();
  return img;
}

void save_image(const unmix::SpectralImage& img, const fs::path& header_path, Dtype dtype) {
  img.validate();
  fs::path data_path = header_path;
  data_path.replace_extension(".bin");
  std::vector<char> bytes(static_cast<std::size_t>(img.data.size()) * dtype_size(dtype));
  for (Index r = 0; r < img.data.rows(); ++r) {
    for (Index c = 0; c < img.data.cols(); ++c) {
      const std::size_t i = static_cast<std::size_t>(r * img.data.cols() + c);
      if (dtype == Dtype::kF32) {
        const float f = static_cast<float>(img.data(r, c));
        std::memcpy(bytes.data() + i * 4, &f, 4);
      } else {
        const double d = img.data(r, c);
        std::memcpy(bytes.data() + i * 8, &d, 8);
      }
    }
  }
  write_bytes(data_path, bytes.data(), bytes.size());
  const json h = {{"width", img.width},
                  {"height", img.height},
                  {"bands", img.bands()},
                  {"dtype", dtype == Dtype::kF32 ? "f32" : "f64"},
                  {"layout", "pixel-major"},
                  {"data_file", data_path.filename().string()}};
  write_text(header_path, h.dump(2) + "\n");
}

void save_density(const density::DensityMap& map, Index width, Index height, const fs::path& header_path) {
  if (width * height != map.pixels()) fail(ErrorCode::kInput, "save_density: width * height != pixels");
  fs::path data_path = header_path;
  data_path.replace_extension(".bin");
  std::vector<float> buf(static_cast<std::size_t>(map.values.size()));
  for (Index r = 0; r < map.pixels(); ++r) {
    for (Index c = 0; c < map.classes(); ++c) {
      buf[static_cast<std::size_t>(r * map.classes() + c)] = static_cast<float>(map.values(r, c));
    }
  }
  write_bytes(data_path, buf.data(), buf.size() * sizeof(float));
  json h = {{"width", width},
            {"height", height},
            {"classes", map.classes()},
            {"dtype", "f32"},
            {"layout", "pixel-major"},
            {"data_file", data_path.filename().string()}};
  if (!map.class_names.empty()) h["class_names"] = map.class_names;
  write_text(header_path, h.dump(2) + "\n");
}

density::DensityMap load_density(const fs::path& header_path, Index* width, Index* height) {
  const json h = parse_json(read_text(header_path), "density header");
  const auto w = get_field<Index>(h, "width", "density header");
  const auto ht = get_field<Index>(h, "height", "density header");
  const auto classes = get_field<Index>(h, "classes", "density header");
  const Dtype dtype = dtype_from(get_field<std::string>(h, "dtype", "density header"));
  const fs::path data_path = header_path.parent_path() / get_field<std::string>(h, "data_file", "density header");
  density::DensityMap map;
  map.values = decode_raw(read_bytes(data_path), dtype, w * ht, classes, data_path);
  if (h.contains("class_names")) map.class_names = h["class_names"].get<std::vector<std::string>>();
  if (width) *width = w;
  if (height) *height = ht;
  return map;
}

void write_pgm(const Matrix& values, Index cls, Index width, Index height, const fs::path& path) {
  if (values.rows() != width * height || cls < 0 || cls >= values.cols()) {
    fail(ErrorCode::kInput, "write_pgm: shape mismatch");
  }
  std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  for (Index i = 0; i < values.rows(); ++i) {
    const double v = std::clamp(values(i, cls), 0.0, 1.0);
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
  }
  write_text(path, out);
}

void write_csv(const Matrix& m, const fs::path& path, const std::vector<std::string>& header) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  if (!header.empty()) out += "\n";
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) out += (c ? "," : "") + fmt17(m(r, c));
    out += "\n";
  }
  write_text(path, out);
}

}  // namespace polyx::io
