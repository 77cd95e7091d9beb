#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

namespace surveyqe::detail {

// Little-endian, length-prefixed encoding shared by the index and model
// files. Values are appended to an in-memory buffer so the fingerprint can be
// taken over exactly the bytes that hit disk.
class BinaryWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void str(std::string_view s);
  void raw(std::string_view s) { buf_.append(s); }

  const std::string& bytes() const { return buf_; }

 private:
  std::string buf_;
};

class BinaryReader {
 public:
  BinaryReader(std::string_view data, std::string source)
      : data_(data), source_(std::move(source)) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  std::string str();
  std::string_view raw(std::size_t n);

  bool at_end() const { return pos_ == data_.size(); }
  const std::string& source() const { return source_; }

 private:
  void need(std::size_t n);

  std::string_view data_;
  std::size_t pos_ = 0;
  std::string source_;
};

std::uint64_t fnv1a64(std::string_view bytes);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

}  // namespace surveyqe::detail
