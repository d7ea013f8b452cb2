#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace tissue {

struct SyscallInfo {
    std::string_view name;
    std::uint32_t number;
    /// Occurrences in the reference normal-usage traces; 0 for calls that
    /// only appear in attack traffic.
    std::uint32_t normal_freq;
};

/// The 38 syscalls of the reference normal policy (i386 numbering as
/// recorded), followed by the extra calls the synthetic attacks use.
std::span<const SyscallInfo> builtin_syscalls() noexcept;
std::span<const SyscallInfo> normal_syscalls() noexcept;

/// Bidirectional syscall name <-> number table.
class SyscallMap {
public:
    SyscallMap() = default;

    static SyscallMap builtin();
    /// `name number` per line; `#` comments and blank lines skipped.
    /// Throws ParseError on malformed lines or conflicting entries.
    static SyscallMap parse(std::istream& in);
    static SyscallMap load(const std::string& path);

    void add(std::string name, std::uint32_t number);
    void write(std::ostream& out) const;

    std::optional<std::uint32_t> number(std::string_view name) const;
    std::optional<std::string> name(std::uint32_t number) const;
    bool empty() const noexcept { return by_name_.empty(); }
    std::size_t size() const noexcept { return by_name_.size(); }

private:
    std::map<std::string, std::uint32_t, std::less<>> by_name_;
    std::map<std::uint32_t, std::string> by_number_;
};

}  // namespace tissue
