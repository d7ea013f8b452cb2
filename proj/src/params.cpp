#include "tissue/params.hpp"

#include "tissue/error.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

namespace tissue {

TissueParams validate_params(const TissueParams& raw) {
    if (raw.max_antigen == 0) throw ParamError("empty antigen store: max_antigen must be >= 1");
    if (raw.max_cells == 0) throw ParamError("empty cell store: max_cells must be >= 1");
    if (raw.antigen_multiplier == 0) throw ParamError("antigen_multiplier must be >= 1");
    if (raw.cell_update_rate == 0) throw ParamError("cell_update_rate must be > 0");
    if (raw.probe_rate == 0) throw ParamError("probe_rate must be > 0");
    if (raw.antigen_alphabet == 0) throw ParamError("empty antigen alphabet: antigen_alphabet must be >= 1");
    return raw;
}

std::vector<KeyValue> read_key_values(std::istream& in) {
    std::vector<KeyValue> out;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        auto text = trim(raw);
        if (text.empty() || text.front() == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) throw ParseError(line, "expected key=value");
        auto key = trim(text.substr(0, eq));
        if (key.empty()) throw ParseError(line, "empty key");
        out.push_back({std::string(key), std::string(trim(text.substr(eq + 1))), line});
    }
    return out;
}

std::uint64_t parse_unsigned(const KeyValue& kv, std::uint64_t max_value) {
    std::uint64_t v = 0;
    const auto* first = kv.value.data();
    const auto* last = first + kv.value.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || kv.value.empty())
        throw ParseError(kv.line, kv.key + ": expected an unsigned integer, got '" + kv.value + "'");
    if (v > max_value) throw ParseError(kv.line, kv.key + ": value out of range");
    return v;
}

bool apply_tissue_key(TissueParams& p, const KeyValue& kv) {
    const auto u32 = [&] { return static_cast<std::uint32_t>(parse_unsigned(kv, UINT32_MAX)); };
    if (kv.key == "max_antigen") p.max_antigen = u32();
    else if (kv.key == "max_cytokines") p.max_cytokines = u32();
    else if (kv.key == "max_cells") p.max_cells = u32();
    else if (kv.key == "cell_update_rate") p.cell_update_rate = parse_unsigned(kv);
    else if (kv.key == "antigen_multiplier") p.antigen_multiplier = u32();
    else if (kv.key == "probe_rate") p.probe_rate = parse_unsigned(kv);
    else if (kv.key == "antigen_alphabet") p.antigen_alphabet = u32();
    else if (kv.key == "rng_seed") p.rng_seed = parse_unsigned(kv);
    else return false;
    return true;
}

TissueParams parse_params(std::istream& in) {
    TissueParams p;
    for (const auto& kv : read_key_values(in)) {
        if (!apply_tissue_key(p, kv)) throw ParseError(kv.line, "unknown key '" + kv.key + "'");
    }
    return validate_params(p);
}

TissueParams load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open parameter file '" + path + "'");
    return parse_params(in);
}

void write_params(std::ostream& out, const TissueParams& p) {
    out << "max_antigen=" << p.max_antigen << '\n'
        << "max_cytokines=" << p.max_cytokines << '\n'
        << "max_cells=" << p.max_cells << '\n'
        << "cell_update_rate=" << p.cell_update_rate << '\n'
        << "antigen_multiplier=" << p.antigen_multiplier << '\n'
        << "probe_rate=" << p.probe_rate << '\n'
        << "antigen_alphabet=" << p.antigen_alphabet << '\n'
        << "rng_seed=" << p.rng_seed << '\n';
}

}  // namespace tissue
