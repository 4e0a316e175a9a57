#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace covis {

/// Streams lines from a plain or gzip-compressed text file. zlib reads
/// uncompressed files transparently, so both go through one code path.
/// Trailing '\n' and '\r' are stripped; the last line may lack a newline.
class LineReader {
public:
    explicit LineReader(const std::filesystem::path& path);  // throws IoError
    ~LineReader();

    LineReader(const LineReader&) = delete;
    LineReader& operator=(const LineReader&) = delete;

    /// Fills `line` with the next line; returns false at end of input.
    /// Throws IoError naming the byte offset on a read failure.
    bool next(std::string& line);

    /// Uncompressed bytes consumed so far.
    std::uint64_t byte_offset() const { return byte_offset_; }

    const std::filesystem::path& path() const { return path_; }

private:
    void* gz_ = nullptr;  // gzFile
    std::filesystem::path path_;
    std::uint64_t byte_offset_ = 0;
    std::string pending_;
    std::size_t consumed_ = 0;  // prefix of pending_ already handed out
    bool eof_ = false;
};

}  // namespace covis
