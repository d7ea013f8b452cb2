#pragma once

#include "tissue/antigen.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace tissue {

/// One response producer firing: which cell, on which tick, for which value.
struct ResponseRecord {
    std::uint64_t tick = 0;
    std::size_t cell = 0;
    Antigen value;

    friend bool operator==(const ResponseRecord&, const ResponseRecord&) = default;
};

/// Response log CSV: `tick,cell_id,syscall`.
void write_response_log(std::ostream& out, const std::vector<ResponseRecord>& records);
std::vector<ResponseRecord> read_response_log(std::istream& in);
std::vector<ResponseRecord> load_response_log(const std::string& path);

}  // namespace tissue
