#include "tissue/response.hpp"

#include "tissue/error.hpp"
#include "tissue/text.hpp"

#include <fstream>
#include <istream>
#include <ostream>

namespace tissue {

void write_response_log(std::ostream& out, const std::vector<ResponseRecord>& records) {
    out << "tick,cell_id,syscall\n";
    for (const auto& r : records) out << r.tick << ',' << r.cell << ',' << r.value.value << '\n';
}

std::vector<ResponseRecord> read_response_log(std::istream& in) {
    std::vector<ResponseRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (lineno == 1) {
            if (line != "tick,cell_id,syscall") throw ParseError(lineno, "expected header tick,cell_id,syscall");
            continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string::npos) throw ParseError(lineno, "expected three columns");
        const std::string_view sv(line);
        auto tick = to_u64(sv.substr(0, c1));
        auto cell = to_u64(sv.substr(c1 + 1, c2 - c1 - 1));
        auto value = to_u32(sv.substr(c2 + 1));
        if (!tick || !cell || !value) throw ParseError(lineno, "malformed response record");
        out.push_back({*tick, static_cast<std::size_t>(*cell), Antigen{*value}});
    }
    return out;
}

std::vector<ResponseRecord> load_response_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open response log '" + path + "'");
    return read_response_log(in);
}

}  // namespace tissue
