#include "smot/image.hpp"

#include <zlib.h>

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "smot/error.hpp"
#include "smot/hash.hpp"

namespace smot {

std::string to_hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

Image::Image(FrameSize size, Rgb fill) : size_(size), data_(size.pixel_count() * 3) {
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = fill[0];
    data_[i + 1] = fill[1];
    data_[i + 2] = fill[2];
  }
}

namespace {

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::string_view bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    if (bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
      ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  return std::string(bytes.substr(start, pos - start));
}

int parse_header_int(const std::string& token, const std::string& where) {
  if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos) {
    throw DataError("bad PPM header field '" + token + "'", where);
  }
  return std::stoi(token);
}

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>((v >> 24) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>(v & 0xff));
}

void put_chunk(std::string& out, const char* type, const std::string& payload) {
  put_u32(out, static_cast<std::uint32_t>(payload.size()));
  std::string body(type, 4);
  body += payload;
  out += body;
  const uLong crc = crc32(0L, reinterpret_cast<const Bytef*>(body.data()),
                          static_cast<uInt>(body.size()));
  put_u32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

Image decode_ppm(std::string_view bytes, const std::string& where) {
  std::size_t pos = 0;
  if (next_token(bytes, pos) != "P6") throw DataError("not a binary PPM (P6) image", where);
  const int width = parse_header_int(next_token(bytes, pos), where);
  const int height = parse_header_int(next_token(bytes, pos), where);
  const int maxval = parse_header_int(next_token(bytes, pos), where);
  if (width <= 0 || height <= 0) throw DataError("PPM with empty dimensions", where);
  if (maxval != 255) throw DataError("only 8-bit PPM is supported", where);
  ++pos;  // single whitespace byte before the raster
  Image image(FrameSize{width, height});
  const std::size_t need = image.bytes().size();
  if (bytes.size() < pos + need) throw DataError("truncated PPM raster", where);
  std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(pos), need, image.bytes().begin());
  return image;
}

Image read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open image", path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_ppm(ss.str(), path.string());
}

std::string encode_ppm(const Image& image) {
  std::string out = "P6\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) +
                    "\n255\n";
  out.append(reinterpret_cast<const char*>(image.bytes().data()), image.bytes().size());
  return out;
}

void write_ppm(const Image& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write image", path.string());
  const std::string bytes = encode_ppm(image);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string encode_png(const Image& image) {
  std::string raw;
  const std::size_t stride = static_cast<std::size_t>(image.width()) * 3;
  raw.reserve((stride + 1) * image.height());
  for (int y = 0; y < image.height(); ++y) {
    raw.push_back('\0');  // filter type: none
    raw.append(reinterpret_cast<const char*>(image.bytes().data()) + y * stride, stride);
  }
  uLongf zsize = compressBound(static_cast<uLong>(raw.size()));
  std::string z(zsize, '\0');
  if (compress2(reinterpret_cast<Bytef*>(z.data()), &zsize,
                reinterpret_cast<const Bytef*>(raw.data()), static_cast<uLong>(raw.size()),
                Z_BEST_SPEED) != Z_OK) {
    throw Error("zlib compression failed");
  }
  z.resize(zsize);

  std::string out("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(image.width()));
  put_u32(ihdr, static_cast<std::uint32_t>(image.height()));
  ihdr += std::string("\x08\x02\x00\x00\x00", 5);  // 8-bit, truecolor, deflate, no filter/interlace
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", z);
  put_chunk(out, "IEND", {});
  return out;
}

std::uint64_t image_digest(const Image& image) {
  std::uint64_t h = fnv1a(std::to_string(image.width()) + "x" + std::to_string(image.height()));
  return fnv1a(image.bytes(), h);
}

}  // namespace smot
