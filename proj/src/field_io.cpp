#include <cloudscope/field_io.hpp>

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

namespace cloudscope {
namespace fs = std::filesystem;

namespace {

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw DataError("cannot open '" + path.string() + "'");
  return f;
}

// --- PGM -------------------------------------------------------------------

// Next header token, skipping whitespace and '#' comments.
std::string pgm_token(std::istream& in) {
  std::string token;
  char c;
  while (in.get(c)) {
    if (c == '#') {
      std::string comment;
      std::getline(in, comment);
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      if (!token.empty()) break;
    } else {
      token.push_back(c);
    }
  }
  return token;
}

long pgm_number(std::istream& in, const fs::path& path) {
  const std::string token = pgm_token(in);
  try {
    std::size_t used = 0;
    const long value = std::stol(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return value;
  } catch (const std::exception&) {
    throw DataError("malformed PGM header in '" + path.string() + "'");
  }
}

ScalarField load_pgm(const fs::path& path, double pixel_size) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  const std::string magic = pgm_token(in);
  if (magic == "P6" || magic == "P3" || magic == "P7")
    throw DataError("'" + path.string() + "': multi-channel unsupported");
  if (magic != "P5") throw DataError("'" + path.string() + "': not a binary PGM (P5) file");
  const long width = pgm_number(in, path);
  const long height = pgm_number(in, path);
  const long maxval = pgm_number(in, path);
  if (width <= 0 || height <= 0) throw DataError("'" + path.string() + "': zero-area image");
  if (maxval <= 0 || maxval > 65535) throw DataError("'" + path.string() + "': bad PGM maxval");

  const int bytes = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(static_cast<std::size_t>(width * height * bytes));
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size()))
    throw DataError("'" + path.string() + "': truncated PGM data");

  Grid<double> values(height, width);
  double* out = values.data();
  for (std::size_t i = 0; i < static_cast<std::size_t>(width * height); ++i)
    out[i] = bytes == 1 ? raw[i] : (raw[2 * i] << 8) | raw[2 * i + 1];
  return {std::move(values), pixel_size, FieldKind::gray_image};
}

void save_pgm(const Grid<double>& levels, const fs::path& path, int depth) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "P5\n" << levels.cols() << ' ' << levels.rows() << '\n' << (depth == 16 ? 65535 : 255)
      << '\n';
  std::vector<unsigned char> raw;
  raw.reserve(static_cast<std::size_t>(levels.size() * (depth / 8)));
  for (Eigen::Index i = 0; i < levels.size(); ++i) {
    const auto v = static_cast<unsigned>(levels.data()[i]);
    if (depth == 16) raw.push_back(static_cast<unsigned char>(v >> 8));
    raw.push_back(static_cast<unsigned char>(v & 0xff));
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

// --- PNG -------------------------------------------------------------------

[[noreturn]] void png_fail(png_structp png, png_const_charp message) {
  auto* what = static_cast<std::string*>(png_get_error_ptr(png));
  if (what) *what = message;
  png_longjmp(png, 1);
}

void png_warn(png_structp, png_const_charp) {}

ScalarField load_png(const fs::path& path, double pixel_size) {
  FilePtr file = open_file(path, "rb");
  unsigned char signature[8] = {};
  if (std::fread(signature, 1, 8, file.get()) != 8 || png_sig_cmp(signature, 0, 8) != 0)
    throw DataError("'" + path.string() + "': not a PNG file");

  std::string message;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message, png_fail, png_warn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("libpng initialisation failed");
  }

  // Everything that owns memory across the setjmp lives outside of it.
  std::vector<unsigned char> pixels;
  std::vector<png_bytep> rows;
  png_uint_32 width = 0, height = 0;
  int bit_depth = 0, color_type = 0;
  std::string error;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("'" + path.string() + "': " + (message.empty() ? "PNG decode error" : message));
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  png_get_IHDR(png, info, &width, &height, &bit_depth, &color_type, nullptr, nullptr, nullptr);

  if (color_type == PNG_COLOR_TYPE_GRAY) {
    if (bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    png_read_update_info(png, info);
    bit_depth = png_get_bit_depth(png, info);
    const std::size_t stride = png_get_rowbytes(png, info);
    pixels.resize(stride * height);
    rows.resize(height);
    for (png_uint_32 r = 0; r < height; ++r) rows[r] = pixels.data() + r * stride;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  } else if (color_type == PNG_COLOR_TYPE_PALETTE) {
    error = "palette images unsupported";
  } else {
    error = "multi-channel unsupported";
  }
  png_destroy_read_struct(&png, &info, nullptr);

  if (!error.empty()) throw DataError("'" + path.string() + "': " + error);
  if (width == 0 || height == 0) throw DataError("'" + path.string() + "': zero-area image");

  Grid<double> values(height, width);
  for (png_uint_32 r = 0; r < height; ++r) {
    const unsigned char* row = rows[r];
    for (png_uint_32 c = 0; c < width; ++c)
      values(r, c) = bit_depth == 16 ? (row[2 * c] << 8) | row[2 * c + 1] : row[c];
  }
  return {std::move(values), pixel_size, FieldKind::gray_image};
}

void save_png(const Grid<double>& levels, const fs::path& path, int depth) {
  FilePtr file = open_file(path, "wb");
  std::string message;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message, png_fail, png_warn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw DataError("libpng initialisation failed");
  }

  const auto width = static_cast<png_uint_32>(levels.cols());
  const auto height = static_cast<png_uint_32>(levels.rows());
  const std::size_t stride = static_cast<std::size_t>(width) * (depth / 8);
  std::vector<unsigned char> pixels(stride * height);
  std::vector<png_bytep> rows(height);
  for (png_uint_32 r = 0; r < height; ++r) {
    rows[r] = pixels.data() + r * stride;
    for (png_uint_32 c = 0; c < width; ++c) {
      const auto v = static_cast<unsigned>(levels(r, c));
      if (depth == 16) {
        rows[r][2 * c] = static_cast<unsigned char>(v >> 8);
        rows[r][2 * c + 1] = static_cast<unsigned char>(v & 0xff);
      } else {
        rows[r][c] = static_cast<unsigned char>(v);
      }
    }
  }

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw DataError("'" + path.string() + "': " + (message.empty() ? "PNG encode error" : message));
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, width, height, depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

bool is_png(const fs::path& path) { return lower_extension(path) == ".png"; }
bool is_pgm(const fs::path& path) {
  const std::string ext = lower_extension(path);
  return ext == ".pgm" || ext == ".pnm";
}

} // namespace

double ImageMapping::quantization_step() const {
  if (scaling == Scaling::raw || max <= min) return 0.0;
  return (max - min) / full_scale();
}

nlohmann::ordered_json ImageMapping::to_json() const {
  nlohmann::ordered_json j;
  j["min"] = min;
  j["max"] = max;
  j["depth"] = depth;
  j["scaling"] = scaling == Scaling::raw ? "raw" : "stretch";
  return j;
}

ImageMapping ImageMapping::from_json(const nlohmann::json& j) {
  ImageMapping m;
  try {
    m.min = j.at("min").get<double>();
    m.max = j.at("max").get<double>();
    m.depth = j.at("depth").get<int>();
    m.scaling = j.value("scaling", std::string("stretch")) == "raw" ? Scaling::raw : Scaling::stretch;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed image sidecar: ") + e.what());
  }
  if (m.depth != 8 && m.depth != 16) throw DataError("image sidecar: depth must be 8 or 16");
  return m;
}

ScalarField load_image(const fs::path& path, double pixel_size) {
  if (!(pixel_size > 0) || !std::isfinite(pixel_size))
    throw UsageError("pixel size must be positive");
  if (!fs::is_regular_file(path)) throw DataError("cannot read '" + path.string() + "'");
  if (is_png(path)) return load_png(path, pixel_size);
  if (is_pgm(path)) return load_pgm(path, pixel_size);

  // Unknown extension: sniff the magic bytes.
  std::ifstream in(path, std::ios::binary);
  char head[2] = {};
  in.read(head, 2);
  if (head[0] == 'P') return load_pgm(path, pixel_size);
  return load_png(path, pixel_size);
}

ImageMapping save_image(const ScalarField& field, const fs::path& path, int depth) {
  return save_image(field, path, depth,
                    field.kind() == FieldKind::gray_image ? ImageMapping::Scaling::raw
                                                          : ImageMapping::Scaling::stretch);
}

ImageMapping save_image(const ScalarField& field, const fs::path& path, int depth,
                        ImageMapping::Scaling scaling) {
  if (depth != 8 && depth != 16) throw UsageError("image depth must be 8 or 16");
  if (!is_png(path) && !is_pgm(path))
    throw UsageError("unsupported image extension '" + path.extension().string() + "'");

  ImageMapping mapping;
  mapping.depth = depth;
  mapping.scaling = scaling;
  mapping.min = field.values().minCoeff();
  mapping.max = field.values().maxCoeff();

  const double top = mapping.full_scale();
  Grid<double> levels;
  if (scaling == ImageMapping::Scaling::raw) {
    levels = field.values().round().max(0.0).min(top);
  } else if (mapping.max > mapping.min) {
    levels = ((field.values() - mapping.min) * (top / (mapping.max - mapping.min))).round();
  } else {
    levels = Grid<double>::Constant(field.height(), field.width(), std::ceil(top / 2));
  }

  if (is_png(path))
    save_png(levels, path, depth);
  else
    save_pgm(levels, path, depth);
  return mapping;
}

ScalarField unmap(const ScalarField& loaded, const ImageMapping& mapping, FieldKind kind) {
  if (mapping.scaling == ImageMapping::Scaling::raw) return loaded.with_kind(kind);
  if (mapping.max <= mapping.min)
    return loaded.with_values(Grid<double>::Constant(loaded.height(), loaded.width(), mapping.min),
                              kind);
  return loaded.with_values(mapping.min + loaded.values() * mapping.quantization_step(), kind);
}

fs::path sidecar_path(const fs::path& image_path) {
  fs::path p = image_path;
  p += ".json";
  return p;
}

void write_sidecar(const fs::path& image_path, const ImageMapping& mapping,
                   const nlohmann::ordered_json& extra) {
  nlohmann::ordered_json j = mapping.to_json();
  for (const auto& [key, value] : extra.items()) j[key] = value;
  const fs::path path = sidecar_path(image_path);
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

ImageMapping read_sidecar(const fs::path& image_path) {
  const fs::path path = sidecar_path(image_path);
  std::ifstream in(path);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  try {
    return ImageMapping::from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("'" + path.string() + "': " + e.what());
  }
}

} // namespace cloudscope
