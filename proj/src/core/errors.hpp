#pragma once

#include <stdexcept>
#include <string>

namespace fade {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad parameter values, unknown config keys, missing required keys.
struct ConfigError : Error {
    using Error::Error;
};

// Filesystem and decode failures; message names the offending file.
struct IoError : Error {
    using Error::Error;
};

// Malformed input content (image headers, XML, JSON schemas).
struct FormatError : Error {
    using Error::Error;
};

// Train/val/test scene overlap reported by check_split.
struct SplitError : Error {
    using Error::Error;
};

}  // namespace fade
