#include "covis/line_reader.hpp"

#include <zlib.h>

#include "covis/errors.hpp"

namespace covis {

namespace {
constexpr unsigned kGzBufferBytes = 1 << 18;
constexpr std::size_t kChunkBytes = 1 << 16;

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
}
}  // namespace

LineReader::LineReader(const std::filesystem::path& path) : path_(path) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (f == nullptr) {
        throw IoError("cannot open input file: " + path.string());
    }
    gzbuffer(f, kGzBufferBytes);
    gz_ = f;
}

LineReader::~LineReader() {
    if (gz_ != nullptr) {
        gzclose(static_cast<gzFile>(gz_));
    }
}

bool LineReader::next(std::string& line) {
    gzFile f = static_cast<gzFile>(gz_);
    line.clear();
    while (true) {
        if (std::size_t nl = pending_.find('\n', consumed_); nl != std::string::npos) {
            line.assign(pending_, consumed_, nl - consumed_);
            consumed_ = nl + 1;
            strip_cr(line);
            return true;
        }
        // No full line buffered: compact and refill.
        pending_.erase(0, consumed_);
        consumed_ = 0;
        if (eof_) {
            if (pending_.empty()) {
                return false;
            }
            line.swap(pending_);
            pending_.clear();
            strip_cr(line);
            return true;
        }
        char chunk[kChunkBytes];
        int n = gzread(f, chunk, kChunkBytes);
        if (n < 0) {
            int errnum = 0;
            const char* msg = gzerror(f, &errnum);
            throw IoError("read error in " + path_.string() + " at byte offset " +
                          std::to_string(byte_offset_) + ": " + (msg != nullptr ? msg : "unknown"));
        }
        if (n == 0) {
            eof_ = true;
            continue;
        }
        byte_offset_ += static_cast<std::uint64_t>(n);
        pending_.append(chunk, static_cast<std::size_t>(n));
    }
}

}  // namespace covis
