#pragma once

#include <stdexcept>
#include <string>

namespace covis {

// Bad configuration: invalid bounding box, column layout, flag values.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Unreadable/unwritable files, malformed snapshots, fatal parse failures
// under strict mode.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// A metric precondition does not hold (empty graph, too few fit points).
class MetricError : public std::runtime_error {
public:
    explicit MetricError(const std::string& msg) : std::runtime_error(msg) {}
};

// Broken internal contract, e.g. a non-canonical edge stream.
class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace covis
