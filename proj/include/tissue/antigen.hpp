#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>

namespace tissue {

/// A syscall token. Only the syscall number is carried.
struct Antigen {
    std::uint32_t value = 0;

    friend constexpr auto operator<=>(const Antigen&, const Antigen&) = default;
};

/// An antigen copy resident somewhere in the system. Every copy made by the
/// multiplier gets its own serial so its path to destruction can be traced.
struct StoredAntigen {
    Antigen antigen;
    std::uint64_t serial = 0;

    friend constexpr bool operator==(const StoredAntigen&, const StoredAntigen&) = default;
};

enum class AntigenEventKind : std::uint8_t {
    created,            // copy written into the tissue store
    tissue_overwritten, // destroyed by a newer copy landing on its tissue slot
    transferred,        // moved from tissue into a cell store
    cell_overwritten,   // destroyed by a transfer landing on its cell slot
    displayed,          // moved from a cell store onto an antigen producer
    expired,            // display finished, destroyed
    removed,            // destroyed by a cell cycle callback
};

struct AntigenEvent {
    AntigenEventKind kind;
    std::uint64_t serial;
    Antigen antigen;
    std::uint64_t tick;
    std::size_t cell = 0;  // owning cell slot for cell-side events
};

constexpr bool is_destruction(AntigenEventKind kind) noexcept {
    return kind == AntigenEventKind::tissue_overwritten || kind == AntigenEventKind::cell_overwritten ||
           kind == AntigenEventKind::expired || kind == AntigenEventKind::removed;
}

}  // namespace tissue
