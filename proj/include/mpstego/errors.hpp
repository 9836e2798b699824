#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mpstego {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed container (bad RIFF chunk, short file).
class FormatError : public Error {
public:
    using Error::Error;
};

class UnsupportedFormatError : public Error {
public:
    using Error::Error;
};

/// Not enough hidden capacity; carries the missing amount.
class CapacityError : public Error {
public:
    CapacityError(const std::string& what, std::size_t shortfall)
        : Error(what), shortfall_(shortfall) {}

    std::size_t shortfall() const noexcept { return shortfall_; }

private:
    std::size_t shortfall_;
};

/// A header field does not fit its wire width.
class EncodingError : public Error {
public:
    EncodingError(const std::string& field, const std::string& what)
        : Error(field + ": " + what), field_(field) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class TruncationError : public Error {
public:
    using Error::Error;
};

class ProtocolError : public Error {
public:
    using Error::Error;
};

class SegmentationError : public Error {
public:
    using Error::Error;
};

class StreamConfusionError : public Error {
public:
    using Error::Error;
};

class ChannelClosedError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace mpstego
