#pragma once

#include <iostream>
#include <stdexcept>
#include <string>

namespace vchange {

// Error taxonomy mirrored by the CLI exit codes:
//   UsageError -> 1, IoError -> 2, ValidationError -> 3, InternalError -> 4.

// Bad parameters or option combinations (overlap >= patch, fraction <= 0, ...).
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// File and codec problems (unreadable file, bad magic, truncated payload, ...).
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Data-content problems (invalid manifest, dimension mismatch, degenerate polygon, ...).
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Broken internal invariants; reaching one is a bug.
struct InternalError : std::logic_error {
    explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

inline void warn(const std::string& msg) {
    std::cerr << "warning: " << msg << "\n";
}

}  // namespace vchange
