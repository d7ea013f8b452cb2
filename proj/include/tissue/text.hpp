#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tissue {

std::string_view trim(std::string_view s) noexcept;

/// Splits on runs of spaces/tabs; empty fields are never produced.
std::vector<std::string_view> split_ws(std::string_view s);

std::optional<std::uint64_t> to_u64(std::string_view s) noexcept;
std::optional<std::uint32_t> to_u32(std::string_view s) noexcept;
/// Finite decimal only; "nan"/"inf" are rejected.
std::optional<double> to_double(std::string_view s) noexcept;

/// Shortest text that parses back to exactly `v`.
std::string format_double(double v);

/// Fixed-point with `digits` decimals.
std::string format_fixed(double v, int digits);

}  // namespace tissue
