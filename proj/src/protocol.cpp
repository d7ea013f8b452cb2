#include "tissue/protocol.hpp"

#include "tissue/error.hpp"
#include "tissue/text.hpp"

#include <algorithm>
#include <cmath>

namespace tissue {

std::string_view role_name(Role role) noexcept {
    switch (role) {
        case Role::antigen: return "antigen";
        case Role::signal: return "signal";
        case Role::response: return "response";
    }
    return "?";
}

std::optional<Role> parse_role(std::string_view name) noexcept {
    if (name == "antigen") return Role::antigen;
    if (name == "signal") return Role::signal;
    if (name == "response") return Role::response;
    return std::nullopt;
}

namespace {

struct Encoder {
    std::string operator()(const wire::Hello& m) const { return "H " + std::string(role_name(m.role)); }
    std::string operator()(const wire::AntigenMsg& m) const { return "A " + std::to_string(m.value); }
    std::string operator()(const wire::SignalMsg& m) const {
        if (!std::isfinite(m.level)) throw ProtocolError("signal level must be finite");
        return "S " + std::to_string(m.index) + ' ' + format_double(m.level);
    }
    std::string operator()(const wire::ResponseMsg& m) const {
        return "R " + std::to_string(m.tick) + ' ' + std::to_string(m.value);
    }
    std::string operator()(const wire::ErrorMsg& m) const {
        std::string text = m.text;
        std::replace(text.begin(), text.end(), '\n', ' ');
        std::replace(text.begin(), text.end(), '\r', ' ');
        return "E " + text;
    }
};

[[noreturn]] void malformed(std::string_view why, std::string_view line) {
    std::string shown(line.substr(0, 64));
    for (auto& ch : shown)
        if (static_cast<unsigned char>(ch) < 0x20 || static_cast<unsigned char>(ch) > 0x7e) ch = '?';
    throw ProtocolError(std::string(why) + ": '" + shown + "'");
}

}  // namespace

std::string encode_message(const WireMessage& msg) { return std::visit(Encoder{}, msg) + '\n'; }

WireMessage decode_message(std::string_view line) {
    if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) malformed("empty line", line);
    if (line.size() > 1 && line[1] != ' ') malformed("kind tag must be one character", line);

    const char kind = line[0];
    if (kind == 'E') {
        // error text is free-form; everything after the first space
        return wire::ErrorMsg{std::string(line.size() > 2 ? line.substr(2) : std::string_view{})};
    }
    const auto fields = split_ws(line.substr(1));
    const auto expect = [&](std::size_t n) {
        if (fields.size() != n) malformed("wrong field count", line);
    };
    switch (kind) {
        case 'H': {
            expect(1);
            auto role = parse_role(fields[0]);
            if (!role) malformed("unknown role", line);
            return wire::Hello{*role};
        }
        case 'A': {
            expect(1);
            auto v = to_u32(fields[0]);
            if (!v) malformed("antigen must be an unsigned 32-bit integer", line);
            return wire::AntigenMsg{*v};
        }
        case 'S': {
            expect(2);
            auto idx = to_u32(fields[0]);
            auto level = to_double(fields[1]);
            if (!idx || !level) malformed("signal needs <index> <finite level>", line);
            return wire::SignalMsg{*idx, *level};
        }
        case 'R': {
            expect(2);
            auto tick = to_u64(fields[0]);
            auto v = to_u32(fields[1]);
            if (!tick || !v) malformed("response needs <tick> <u32>", line);
            return wire::ResponseMsg{*tick, *v};
        }
        default: malformed("unknown kind tag", line);
    }
}

}  // namespace tissue
