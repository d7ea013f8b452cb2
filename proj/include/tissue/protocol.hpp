#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace tissue {

enum class Role { antigen, signal, response };

std::string_view role_name(Role role) noexcept;
std::optional<Role> parse_role(std::string_view name) noexcept;

namespace wire {

struct Hello {
    Role role;
    friend bool operator==(const Hello&, const Hello&) = default;
};

struct AntigenMsg {
    std::uint32_t value;
    friend bool operator==(const AntigenMsg&, const AntigenMsg&) = default;
};

struct SignalMsg {
    std::uint32_t index;
    double level;
    friend bool operator==(const SignalMsg&, const SignalMsg&) = default;
};

struct ResponseMsg {
    std::uint64_t tick;
    std::uint32_t value;
    friend bool operator==(const ResponseMsg&, const ResponseMsg&) = default;
};

struct ErrorMsg {
    std::string text;
    friend bool operator==(const ErrorMsg&, const ErrorMsg&) = default;
};

}  // namespace wire

using WireMessage = std::variant<wire::Hello, wire::AntigenMsg, wire::SignalMsg, wire::ResponseMsg, wire::ErrorMsg>;

/// Newline-terminated ASCII line:
///   H <role> | A <u32> | S <index> <level> | R <tick> <u32> | E <text>
/// Levels are written in shortest round-trip form. Newlines inside error
/// text are replaced by spaces. Non-finite levels throw ProtocolError.
std::string encode_message(const WireMessage& msg);

/// Inverse of encode_message. Accepts the line with or without its `\n`
/// (or `\r\n`). Throws ProtocolError on anything malformed.
WireMessage decode_message(std::string_view line);

}  // namespace tissue
