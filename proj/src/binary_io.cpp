#include "cer/binary_io.hpp"

#include <atomic>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include <unistd.h>

#include "cer/error.hpp"

namespace cer::io {
namespace {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

template <typename T>
void put(std::string& buf, T v) {
    char raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    buf.append(raw, sizeof(T));
}

}  // namespace

void BinaryWriter::bytes(std::string_view raw) { buf_.append(raw); }
void BinaryWriter::u32(std::uint32_t v) { put(buf_, v); }
void BinaryWriter::u64(std::uint64_t v) { put(buf_, v); }
void BinaryWriter::f32(float v) { put(buf_, v); }
void BinaryWriter::f64(double v) { put(buf_, v); }

void BinaryWriter::str(std::string_view s) {
    if (s.size() > UINT32_MAX) throw InvalidArgument("string too long for u32 length prefix");
    u32(static_cast<std::uint32_t>(s.size()));
    buf_.append(s);
}

void BinaryWriter::save(const std::filesystem::path& path) const { write_file_atomic(path, buf_); }

BinaryReader::BinaryReader(std::string data, std::string source_name)
    : data_(std::move(data)), source_(std::move(source_name)) {}

BinaryReader BinaryReader::open(const std::filesystem::path& path) { return BinaryReader(read_file(path), path.string()); }

void BinaryReader::need(std::size_t n) const {
    if (data_.size() - pos_ < n) {
        throw FormatError(source_ + ": truncated at byte " + std::to_string(pos_) + " (need " + std::to_string(n) +
                          " more bytes)");
    }
}

std::string BinaryReader::bytes(std::size_t n) {
    need(n);
    std::string out = data_.substr(pos_, n);
    pos_ += n;
    return out;
}

#define CER_READ_SCALAR(T)                              \
    need(sizeof(T));                                    \
    T v;                                                \
    std::memcpy(&v, data_.data() + pos_, sizeof(T));    \
    pos_ += sizeof(T);                                  \
    return v

std::uint32_t BinaryReader::u32() { CER_READ_SCALAR(std::uint32_t); }
std::uint64_t BinaryReader::u64() { CER_READ_SCALAR(std::uint64_t); }
float BinaryReader::f32() { CER_READ_SCALAR(float); }
double BinaryReader::f64() { CER_READ_SCALAR(double); }

#undef CER_READ_SCALAR

std::string BinaryReader::str() {
    const std::uint32_t n = u32();
    return bytes(n);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    static std::atomic<unsigned> counter{0};
    const auto parent = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);

    std::ostringstream suffix;
    suffix << ".tmp." << ::getpid() << "." << std::hash<std::thread::id>{}(std::this_thread::get_id()) << "."
           << counter.fetch_add(1);
    const auto tmp = parent / (path.filename().string() + suffix.str());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("error while reading " + path.string());
    return ss.str();
}

}  // namespace cer::io
