#include "tissue/syscalls.hpp"

#include "tissue/error.hpp"
#include "tissue/text.hpp"

#include <array>
#include <fstream>
#include <istream>
#include <ostream>

namespace tissue {

namespace {

constexpr std::array<SyscallInfo, 50> table{{
    {"chdir", 12, 2},
    {"execve", 11, 2},
    {"personality", 136, 2},
    {"setsid", 66, 2},
    {"fork", 2, 2},
    {"write", 4, 2},
    {"send", 309, 2},
    {"time", 13, 2},
    {"fstat64", 197, 2},
    {"lseek", 19, 2},
    {"fsync", 118, 2},
    {"getrlimit", 191, 2},
    {"listen", 304, 2},
    {"select", 142, 3},
    {"gettimeofday", 78, 4},
    {"getsockname", 306, 4},
    {"exit", 1, 4},
    {"uname", 122, 4},
    {"stat", 106, 4},
    {"connect", 303, 5},
    {"getdents", 141, 8},
    {"mprotect", 125, 8},
    {"poll", 168, 8},
    {"sendto", 311, 9},
    {"recvfrom", 312, 9},
    {"rt_sigaction", 174, 10},
    {"getpid", 20, 10},
    {"fcntl", 55, 12},
    {"bind", 302, 12},
    {"munmap", 91, 15},
    {"brk", 45, 16},
    {"fstat", 108, 23},
    {"ioctl", 54, 24},
    {"socket", 301, 25},
    {"old_mmap", 90, 27},
    {"read", 3, 27},
    {"open", 5, 30},
    {"close", 6, 557},
    // attack-only
    {"waitpid", 7, 0},
    {"unlink", 10, 0},
    {"chmod", 15, 0},
    {"setuid", 23, 0},
    {"getuid", 24, 0},
    {"kill", 37, 0},
    {"pipe", 42, 0},
    {"setgid", 46, 0},
    {"dup2", 63, 0},
    {"nanosleep", 162, 0},
    {"rt_sigprocmask", 175, 0},
    {"vfork", 190, 0},
}};

constexpr std::size_t normal_count = 38;

}  // namespace

std::span<const SyscallInfo> builtin_syscalls() noexcept { return table; }
std::span<const SyscallInfo> normal_syscalls() noexcept { return std::span(table).first(normal_count); }

SyscallMap SyscallMap::builtin() {
    SyscallMap m;
    for (const auto& s : table) m.add(std::string(s.name), s.number);
    return m;
}

void SyscallMap::add(std::string name, std::uint32_t number) {
    if (auto it = by_name_.find(name); it != by_name_.end() && it->second != number)
        throw ParamError("syscall '" + name + "' mapped to both " + std::to_string(it->second) + " and " +
                         std::to_string(number));
    by_number_.try_emplace(number, name);
    by_name_[std::move(name)] = number;
}

SyscallMap SyscallMap::parse(std::istream& in) {
    SyscallMap m;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        auto text = trim(raw);
        if (const auto hash = text.find('#'); hash != std::string_view::npos) text = trim(text.substr(0, hash));
        if (text.empty()) continue;
        const auto fields = split_ws(text);
        if (fields.size() != 2) throw ParseError(line, "expected '<name> <number>'");
        const auto number = to_u32(fields[1]);
        if (!number) throw ParseError(line, "bad syscall number '" + std::string(fields[1]) + "'");
        try {
            m.add(std::string(fields[0]), *number);
        } catch (const ParamError& e) {
            throw ParseError(line, e.what());
        }
    }
    return m;
}

SyscallMap SyscallMap::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open syscall map '" + path + "'");
    return parse(in);
}

void SyscallMap::write(std::ostream& out) const {
    for (const auto& [number, name] : by_number_) out << name << ' ' << number << '\n';
}

std::optional<std::uint32_t> SyscallMap::number(std::string_view name) const {
    if (auto it = by_name_.find(name); it != by_name_.end()) return it->second;
    return std::nullopt;
}

std::optional<std::string> SyscallMap::name(std::uint32_t number) const {
    if (auto it = by_number_.find(number); it != by_number_.end()) return it->second;
    return std::nullopt;
}

}  // namespace tissue
