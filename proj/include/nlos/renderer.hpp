#pragma once

#include "nlos/plan.hpp"
#include "nlos/radiosity.hpp"
#include "nlos/scene.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace nlos {

// Linear grayscale radiance image, row 0 at the top.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;
  double exposure = 1.0;
  std::optional<std::uint64_t> noise_seed;
  double noise_sigma = 0.0;

  Image() = default;
  Image(int w, int h, double fill = 0.0);

  [[nodiscard]] double& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  [[nodiscard]] double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  [[nodiscard]] double mean() const;
  [[nodiscard]] double max() const;
};

// Integer raster after exposure and quantization.
struct Raster {
  int width = 0;
  int height = 0;
  int depth = 16;
  std::vector<std::uint16_t> codes;
};

// Unit primary-ray direction through the center of pixel (x, y).
[[nodiscard]] Vec3 primary_ray(const CameraModel& camera, int x, int y);

// Flat-shaded pinhole view of the LOS patches. The patch seen by each pixel is
// resolved once; every render afterwards is a lookup into a radiosity report.
class Renderer {
 public:
  explicit Renderer(Scene scene);
  explicit Renderer(std::shared_ptr<const Transport> transport);

  [[nodiscard]] const Transport& transport() const { return *transport_; }
  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] int height() const { return height_; }
  // Patch id per pixel; -1 where the ray hits nothing, an occluder, or a back face.
  [[nodiscard]] const std::vector<int>& pixel_patch() const { return pixel_patch_; }

  [[nodiscard]] Image render(const IlluminationPlan& plan, const std::optional<NlosProxy>& object) const;
  [[nodiscard]] Image render(const RadiosityReport& report) const;
  // Image of a single per-patch field (e.g. the third-bounce NLOS vector).
  [[nodiscard]] Image render_field(const std::vector<double>& per_patch) const;

 private:
  void resolve_pixels();

  std::shared_ptr<const Transport> transport_;
  int width_ = 0;
  int height_ = 0;
  std::vector<int> pixel_patch_;
};

[[nodiscard]] Image render(const Scene& scene, const IlluminationPlan& plan,
                           const std::optional<NlosProxy>& object);

// Zero-mean Gaussian noise, clamped at zero. sigma = 0 leaves pixels untouched.
[[nodiscard]] Image add_noise(const Image& image, double sigma, std::uint64_t seed);

[[nodiscard]] Raster quantize(const Image& image, int depth, double exposure);

// Exposure mapping the brightest pixel of `reference` to `target` of full scale.
[[nodiscard]] double auto_exposure(const Image& reference, double target = 0.8);

[[nodiscard]] std::vector<std::uint8_t> encode_png(const Raster& raster);
[[nodiscard]] Raster decode_png(const std::vector<std::uint8_t>& bytes);
void write_png(const std::filesystem::path& path, const Raster& raster);
[[nodiscard]] Raster read_png(const std::filesystem::path& path);

void write_float_raster(std::ostream& out, const Image& image);
[[nodiscard]] Image read_float_raster(std::istream& in);

}  // namespace nlos
