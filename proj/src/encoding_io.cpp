#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "hipose/encoding.hpp"
#include "hipose/error.hpp"

namespace hipose {
namespace {

constexpr char kMagic[8] = {'H', 'S', 'E', 'N', 'C', '\0', '\r', '\n'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderSize = 8 + 4 + 4 + 8;

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  template <typename T>
  void le(T value) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
    U u = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(U); ++i) out_.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }
  const std::vector<std::uint8_t>& view() const { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

template <typename T>
T read_le(const std::uint8_t* p) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
  U u = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) u |= static_cast<U>(U(p[i]) << (8 * i));
  return std::bit_cast<T>(u);
}

std::uint32_t crc_of(std::span<const std::uint8_t> data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  std::size_t off = 0;
  while (off < data.size()) {
    const std::size_t chunk = std::min<std::size_t>(data.size() - off, 1u << 30);
    crc = crc32(crc, data.data() + off, static_cast<uInt>(chunk));
    off += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::vector<std::uint8_t> serialize_encoding(const SurfaceEncoding& enc) {
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.le(kVersion);
  w.le(static_cast<std::uint32_t>(enc.bits()));
  w.le(static_cast<std::uint64_t>(enc.size()));
  for (const Vec3& p : enc.vertices()) {
    w.le(p.x());
    w.le(p.y());
    w.le(p.z());
  }
  const bool narrow = enc.bits() <= 16;
  for (std::uint32_t c : enc.codes()) {
    if (narrow) {
      w.le(static_cast<std::uint16_t>(c));
    } else {
      w.le(c);
    }
  }
  w.le(crc_of(w.view()));
  return w.take();
}

SurfaceEncoding deserialize_encoding(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize) throw ChecksumError("encoding file truncated inside header");
  if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) throw FormatError("not an .hsenc file (bad magic)");
  const auto version = read_le<std::uint32_t>(bytes.data() + 8);
  if (version != kVersion) {
    throw FormatError("unsupported .hsenc version " + std::to_string(version) + " (expected " +
                      std::to_string(kVersion) + ")");
  }
  const auto bits = read_le<std::uint32_t>(bytes.data() + 12);
  const auto count = read_le<std::uint64_t>(bytes.data() + 16);
  if (bits < 1 || bits > static_cast<std::uint32_t>(kMaxEncodingBits)) {
    throw FormatError("bit depth " + std::to_string(bits) + " out of range");
  }
  if (count != (std::uint64_t{1} << bits)) {
    throw FormatError("header declares d = " + std::to_string(bits) + " but " +
                      std::to_string(count) + " codes (expected 2^d)");
  }
  const std::size_t code_bytes = bits <= 16 ? 2 : 4;
  const std::size_t expected = kHeaderSize + count * (24 + code_bytes) + 4;
  if (bytes.size() != expected) {
    throw ChecksumError("encoding file has " + std::to_string(bytes.size()) + " bytes, expected " +
                        std::to_string(expected) + " (truncated or padded)");
  }
  const std::uint32_t stored = read_le<std::uint32_t>(bytes.data() + expected - 4);
  if (stored != crc_of(bytes.first(expected - 4))) throw ChecksumError("CRC32 mismatch");

  std::vector<Vec3> vertices(count);
  const std::uint8_t* p = bytes.data() + kHeaderSize;
  for (auto& v : vertices) {
    v = Vec3(read_le<double>(p), read_le<double>(p + 8), read_le<double>(p + 16));
    if (!v.allFinite()) throw FormatError("non-finite vertex coordinate");
    p += 24;
  }
  std::vector<std::uint32_t> codes(count);
  for (auto& c : codes) {
    c = code_bytes == 2 ? read_le<std::uint16_t>(p) : read_le<std::uint32_t>(p);
    p += code_bytes;
  }
  return SurfaceEncoding::from_codes(std::move(vertices), std::move(codes), static_cast<int>(bits));
}

void save_encoding(const SurfaceEncoding& enc, const std::filesystem::path& path) {
  const auto bytes = serialize_encoding(enc);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for " + path.string());
}

SurfaceEncoding load_encoding(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open encoding file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_encoding(bytes);
}

}  // namespace hipose
