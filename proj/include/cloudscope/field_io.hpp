#pragma once

#include <cloudscope/field.hpp>

#include <json.hpp>

#include <filesystem>

namespace cloudscope {

/// How field values were mapped to integer gray levels when saving.
///
/// `stretch` maps [min, max] linearly onto [0, 2^depth - 1]; a constant field
/// goes to mid-gray. `raw` rounds the values and clamps them to the depth range;
/// it is used for gray images, whose values already live in that range.
struct ImageMapping {
  enum class Scaling { stretch, raw };

  double min = 0.0;
  double max = 0.0;
  int depth = 8;
  Scaling scaling = Scaling::stretch;

  double full_scale() const { return depth == 16 ? 65535.0 : 255.0; }
  /// Size of one gray level in field units (0 for raw or constant fields).
  double quantization_step() const;

  nlohmann::ordered_json to_json() const;
  static ImageMapping from_json(const nlohmann::json& j);
};

/// Reads an 8- or 16-bit single-channel binary PGM (P5) or PNG. Gray values are
/// kept in their native range (0..255 or 0..65535) without rescaling.
ScalarField load_image(const std::filesystem::path& path, double pixel_size);

/// Writes PGM or PNG (chosen by extension) at 8 or 16 bits. Gray images are
/// written raw; every other kind is stretched. Returns the mapping used.
ImageMapping save_image(const ScalarField& field, const std::filesystem::path& path, int depth);

ImageMapping save_image(const ScalarField& field, const std::filesystem::path& path, int depth,
                        ImageMapping::Scaling scaling);

/// Inverts a stretch mapping on a loaded image: value = min + level * step.
ScalarField unmap(const ScalarField& loaded, const ImageMapping& mapping, FieldKind kind);

/// Sidecar metadata file next to an image: `<image path>.json`.
std::filesystem::path sidecar_path(const std::filesystem::path& image_path);

/// Writes {"min","max","depth","scaling"} followed by the entries of `extra`.
void write_sidecar(const std::filesystem::path& image_path, const ImageMapping& mapping,
                   const nlohmann::ordered_json& extra = nlohmann::ordered_json::object());

ImageMapping read_sidecar(const std::filesystem::path& image_path);

} // namespace cloudscope
