#pragma once

#include "tissue/text.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace tissue {

/// Compartment-level parameters. Defaults are the twocell settings.
struct TissueParams {
    std::uint32_t max_antigen = 1000;
    std::uint32_t max_cytokines = 0;
    std::uint32_t max_cells = 100;
    std::uint64_t cell_update_rate = 100000;  // microseconds per tick
    std::uint32_t antigen_multiplier = 10;
    std::uint64_t probe_rate = 1000000;  // microseconds per probe sample
    std::uint32_t antigen_alphabet = 1024;
    std::uint64_t rng_seed = 0;

    friend bool operator==(const TissueParams&, const TissueParams&) = default;
};

/// Returns `raw` unchanged when every invariant holds; throws ParamError
/// naming the first violated one otherwise.
TissueParams validate_params(const TissueParams& raw);

struct KeyValue {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

/// Reads flat `key=value` text. Blank lines and `#` comments are skipped;
/// whitespace around keys and values is trimmed.
std::vector<KeyValue> read_key_values(std::istream& in);

std::uint64_t parse_unsigned(const KeyValue& kv, std::uint64_t max_value = UINT64_MAX);

/// Applies one tissue-level key. Returns false for a key it does not own.
bool apply_tissue_key(TissueParams& params, const KeyValue& kv);

/// Parses a tissue parameter file and validates it. Unknown keys are errors.
TissueParams parse_params(std::istream& in);
TissueParams load_params(const std::string& path);

void write_params(std::ostream& out, const TissueParams& params);

}  // namespace tissue
