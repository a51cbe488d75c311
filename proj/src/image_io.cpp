#include "nlos/error.hpp"
#include "nlos/renderer.hpp"

#include <fmt/format.h>
#include <png.h>

#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

namespace nlos {

namespace {

struct ReadCursor {
  const std::vector<std::uint8_t>* bytes;
  std::size_t offset;
};

void on_write(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void on_flush(png_structp) {}

void on_read(png_structp png, png_bytep data, png_size_t length) {
  auto* cur = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cur->offset + length > cur->bytes->size()) {
    png_error(png, "truncated PNG stream");
  }
  std::memcpy(data, cur->bytes->data() + cur->offset, length);
  cur->offset += length;
}

// libpng reports errors by longjmp; the message is kept for the C++ side.
void on_error(png_structp png, png_const_charp message) {
  auto* slot = static_cast<std::string*>(png_get_error_ptr(png));
  *slot = message;
  png_longjmp(png, 1);
}

void on_warning(png_structp, png_const_charp) {}

}  // namespace

std::vector<std::uint8_t> encode_png(const Raster& r) {
  std::vector<std::uint8_t> out;
  std::string message;
  std::vector<png_byte> row(static_cast<std::size_t>(r.width) * (r.depth == 16 ? 2 : 1));
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message, on_error, on_warning);
  if (png == nullptr) {
    throw IoError("PNG: cannot create write struct");
  }
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError(fmt::format("PNG: {}", message));
  }
  {
    png_set_write_fn(png, &out, on_write, on_flush);
    png_set_IHDR(png, info, static_cast<png_uint_32>(r.width), static_cast<png_uint_32>(r.height),
                 r.depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < r.height; ++y) {
      for (int x = 0; x < r.width; ++x) {
        const std::uint16_t v = r.codes[static_cast<std::size_t>(y) * r.width + x];
        if (r.depth == 16) {
          row[2 * x] = static_cast<png_byte>(v >> 8);  // PNG samples are big-endian
          row[2 * x + 1] = static_cast<png_byte>(v & 0xff);
        } else {
          row[x] = static_cast<png_byte>(v);
        }
      }
      png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
  }
  png_destroy_write_struct(&png, &info);
  return out;
}

Raster decode_png(const std::vector<std::uint8_t>& bytes) {
  std::string message;
  ReadCursor cursor{&bytes, 0};
  Raster r;
  std::vector<png_byte> row;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message, on_error, on_warning);
  if (png == nullptr) {
    throw IoError("PNG: cannot create read struct");
  }
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(fmt::format("PNG: {}", message));
  }
  try {
    png_set_read_fn(png, &cursor, on_read);
    png_read_info(png, info);
    if (png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY) {
      throw IoError("PNG: expected a grayscale image");
    }
    r.width = static_cast<int>(png_get_image_width(png, info));
    r.height = static_cast<int>(png_get_image_height(png, info));
    r.depth = png_get_bit_depth(png, info);
    if (r.depth != 8 && r.depth != 16) {
      throw IoError("PNG: expected 8- or 16-bit samples");
    }
    const std::size_t bytes_per = r.depth == 16 ? 2 : 1;
    row.resize(static_cast<std::size_t>(r.width) * bytes_per);
    r.codes.resize(static_cast<std::size_t>(r.width) * r.height);
    for (int y = 0; y < r.height; ++y) {
      png_read_row(png, row.data(), nullptr);
      for (int x = 0; x < r.width; ++x) {
        r.codes[static_cast<std::size_t>(y) * r.width + x] =
            bytes_per == 2 ? static_cast<std::uint16_t>((row[2 * x] << 8) | row[2 * x + 1]) : row[x];
      }
    }
  } catch (...) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw;
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return r;
}

void write_png(const std::filesystem::path& path, const Raster& raster) {
  const std::vector<std::uint8_t> bytes = encode_png(raster);
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError(fmt::format("cannot write '{}'", path.string()));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Raster read_png(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(fmt::format("cannot read '{}'", path.string()));
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_png(bytes);
}

void write_float_raster(std::ostream& out, const Image& image) {
  out << "# nlos-radiant float raster v1\n" << image.width << ' ' << image.height << '\n';
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      out << (x ? " " : "") << fmt::format("{:.17g}", image.at(x, y));
    }
    out << '\n';
  }
}

Image read_float_raster(std::istream& in) {
  std::string line;
  do {
    if (!std::getline(in, line)) {
      throw ParseError("float raster: missing dimensions");
    }
  } while (!line.empty() && line[0] == '#');
  std::istringstream dims(line);
  int w = 0;
  int h = 0;
  if (!(dims >> w >> h) || w < 1 || h < 1) {
    throw ParseError("float raster: bad dimensions line");
  }
  Image img(w, h);
  for (double& p : img.pixels) {
    if (!(in >> p)) {
      throw ParseError("float raster: too few samples");
    }
  }
  return img;
}

}  // namespace nlos
