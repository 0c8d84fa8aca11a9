#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace b3c {

// Little-endian byte packing for the on-disk container formats. Multi-byte
// values are written explicitly byte by byte so files are identical across
// hosts.
class ByteWriter {
 public:
  void put_u8(uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void put_u32(uint32_t v);
  void put_u64(uint64_t v);
  void put_f32(float v);
  void put_f64(double v);
  void put_string(const std::string& s);  // u32 length prefix + bytes
  void put_bytes(const void* p, size_t n);

  const std::string& bytes() const { return buf_; }
  std::string& bytes() { return buf_; }

 private:
  std::string buf_;
};

// Bounded reader over a byte range; overruns throw IoError(kTruncated).
class ByteReader {
 public:
  ByteReader(const char* data, size_t size) : data_(data), size_(size) {}

  uint8_t u8();
  uint32_t u32();
  uint64_t u64();
  float f32();
  double f64();
  std::string string();

  size_t remaining() const { return size_ - pos_; }
  bool done() const { return pos_ == size_; }

 private:
  void need(size_t n) const;
  const char* data_;
  size_t size_;
  size_t pos_ = 0;
};

// CRC-32 (IEEE 802.3, reflected, polynomial 0xEDB88320).
uint32_t crc32(const void* data, size_t n);

// Whole-file helpers; failures throw IoError(kOpenFailed).
void write_file(const std::string& path, const std::string& bytes);
std::string read_file(const std::string& path);

}  // namespace b3c
