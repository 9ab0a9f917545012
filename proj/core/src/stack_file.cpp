#include "npsa/stack_file.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "npsa/errors.hpp"

namespace npsa {
namespace {

constexpr std::uint8_t kMagic[4] = {'N', 'P', 'S', 'A'};
constexpr std::size_t kHeaderSize = 17;

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  template <typename T>
  void le(T value) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
              std::conditional_t<sizeof(T) == 4, std::uint32_t,
              std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint8_t>>>;
    const U u = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
  }
  std::vector<std::uint8_t>& buffer() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  template <typename T>
  T le() {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
              std::conditional_t<sizeof(T) == 4, std::uint32_t,
              std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint8_t>>>;
    if (pos_ + sizeof(T) > in_.size()) throw InvalidInput("stack file is truncated");
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<U>(U{in_[pos_ + i]} << (8 * i));
    pos_ += sizeof(T);
    return std::bit_cast<T>(u);
  }
  std::size_t position() const { return pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  std::size_t done = 0;
  while (done < bytes.size()) {
    const auto chunk = static_cast<uInt>(
        std::min<std::size_t>(bytes.size() - done, std::numeric_limits<uInt>::max()));
    crc = ::crc32(crc, bytes.data() + done, chunk);
    done += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::vector<std::uint8_t> encode_stack(const FringeStack& stack) {
  if (stack.size() == 0) throw InvalidInput("cannot encode an empty stack");
  if (stack.size() > std::numeric_limits<std::uint16_t>::max()) {
    throw InvalidInput("stack has too many frames for the file format");
  }
  if (stack.width() > std::numeric_limits<std::uint32_t>::max() ||
      stack.height() > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidInput("frame dimensions exceed the file format");
  }
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.le(kStackFileVersion);
  w.le(static_cast<std::uint16_t>(stack.size()));
  w.le(static_cast<std::uint32_t>(stack.height()));
  w.le(static_cast<std::uint32_t>(stack.width()));
  w.le(static_cast<std::uint8_t>(stack.steps() ? 1 : 0));
  if (stack.steps()) {
    for (double t : stack.steps()->values()) w.le(t);
  }
  for (const Image& f : stack.frames()) {
    for (double v : f.values()) w.le(v);
  }
  const std::uint32_t crc = crc32(w.buffer());
  w.le(crc);
  return std::move(w.buffer());
}

FringeStack decode_stack(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize + 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw InvalidInput("not a stack file (bad magic)");
  }
  Reader r(bytes.subspan(4));
  const auto version = r.le<std::uint16_t>();
  if (version != kStackFileVersion) {
    throw InvalidInput("unsupported stack file version " + std::to_string(version));
  }
  const std::size_t n = r.le<std::uint16_t>();
  const std::size_t height = r.le<std::uint32_t>();
  const std::size_t width = r.le<std::uint32_t>();
  const auto flag = r.le<std::uint8_t>();
  if (flag > 1) throw InvalidInput("invalid steps-present flag");
  if (n == 0 || width == 0 || height == 0) throw InvalidInput("stack file declares an empty stack");

  if (width > bytes.size() / height / n / 8) {
    throw InvalidInput("stack file is smaller than its declared dimensions");
  }
  const std::size_t expected =
      kHeaderSize + (flag ? 8 * n : 0) + 8 * n * width * height + 4;
  if (bytes.size() != expected) {
    throw InvalidInput("stack file size " + std::to_string(bytes.size()) +
                       " does not match declared size " + std::to_string(expected));
  }
  const std::uint32_t stored = Reader(bytes.subspan(bytes.size() - 4)).le<std::uint32_t>();
  if (crc32(bytes.first(bytes.size() - 4)) != stored) {
    throw InvalidInput("stack file CRC mismatch (corrupt file)");
  }

  std::optional<PhaseSteps> steps;
  if (flag) {
    std::vector<double> t(n);
    for (double& v : t) v = r.le<double>();
    steps.emplace(std::move(t));
  }
  std::vector<Image> frames(n, Image(width, height));
  for (Image& f : frames) {
    for (double& v : f.values()) v = r.le<double>();
  }
  return FringeStack(std::move(frames), std::move(steps));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return bytes;
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("error writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "'");
  }
}

void write_stack(const std::filesystem::path& path, const FringeStack& stack) {
  write_file_atomic(path, encode_stack(stack));
}

FringeStack read_stack(const std::filesystem::path& path) {
  return decode_stack(read_file(path));
}

}  // namespace npsa
