#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tissue {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParamError : public Error {
public:
    using Error::Error;
};

/// Raised by the log, map, config and policy readers. Carries the 1-based
/// line number of the offending line (0 when the whole input is at fault).
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ProtocolError : public Error {
public:
    using Error::Error;
};

/// Broken or refused connection. Callers may retry.
class TransportError : public Error {
public:
    using Error::Error;
};

class TickError : public Error {
public:
    TickError(std::size_t cell, const std::string& what)
        : Error("cell " + std::to_string(cell) + ": " + what), cell_(cell) {}

    std::size_t cell() const noexcept { return cell_; }

private:
    std::size_t cell_;
};

}  // namespace tissue
