#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cer::io {

/// Little-endian byte sink. Strings are written as u32 byte length + bytes.
class BinaryWriter {
  public:
    void bytes(std::string_view raw);
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void f32(float v);
    void f64(double v);
    void str(std::string_view s);

    [[nodiscard]] const std::string& buffer() const { return buf_; }

    /// Writes the buffer to `path` via a temporary file and rename.
    void save(const std::filesystem::path& path) const;

  private:
    std::string buf_;
};

/// Bounds-checked little-endian reader; truncation throws FormatError.
class BinaryReader {
  public:
    explicit BinaryReader(std::string data, std::string source_name = "buffer");
    static BinaryReader open(const std::filesystem::path& path);

    std::string bytes(std::size_t n);
    std::uint32_t u32();
    std::uint64_t u64();
    float f32();
    double f64();
    std::string str();

    [[nodiscard]] bool at_end() const { return pos_ == data_.size(); }
    [[nodiscard]] std::size_t remaining() const { return data_.size() - pos_; }
    [[nodiscard]] const std::string& source() const { return source_; }

  private:
    void need(std::size_t n) const;

    std::string data_;
    std::string source_;
    std::size_t pos_ = 0;
};

/// Writes `content` to `path` atomically (temp file in the same directory,
/// then rename).
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace cer::io
