#include "tissue/probe.hpp"

#include "tissue/error.hpp"
#include "tissue/text.hpp"

#include <istream>
#include <ostream>

namespace tissue {

const ProbeValue* ProbeSample::find(const std::string& name) const {
    for (const auto& f : fields)
        if (f.name == name) return &f.value;
    return nullptr;
}

namespace {

void write_value(std::ostream& out, const ProbeValue& v) {
    if (const auto* d = std::get_if<double>(&v)) {
        out << format_double(*d);
        return;
    }
    const auto& list = std::get<std::vector<double>>(v);
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (i) out << ';';
        out << format_double(list[i]);
    }
    // a one-element list keeps a trailing separator so it reads back as a list
    if (list.size() == 1) out << ';';
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

void ProbeCsvWriter::append(const ProbeSample& sample) {
    if (sample.error) return;
    if (header_.empty()) {
        *out_ << "tick,wall_us";
        for (const auto& f : sample.fields) {
            header_.push_back(f.name);
            *out_ << ',' << f.name;
        }
        *out_ << '\n';
    }
    *out_ << sample.tick << ',' << sample.wall_us;
    for (const auto& f : sample.fields) {
        *out_ << ',';
        write_value(*out_, f.value);
    }
    *out_ << '\n';
    out_->flush();
}

std::vector<ProbeSample> read_probe_csv(std::istream& in) {
    std::vector<ProbeSample> out;
    std::string line;
    std::vector<std::string> header;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split(line, ',');
        if (header.empty()) {
            if (cells.size() < 2 || cells[0] != "tick" || cells[1] != "wall_us")
                throw ParseError(lineno, "probe header must start with tick,wall_us");
            for (auto c : cells) header.emplace_back(c);
            continue;
        }
        if (cells.size() != header.size()) throw ParseError(lineno, "probe row has wrong number of columns");
        ProbeSample s;
        auto tick = to_u64(cells[0]);
        auto wall = to_u64(cells[1]);
        if (!tick || !wall) throw ParseError(lineno, "bad tick or wall_us");
        s.tick = *tick;
        s.wall_us = *wall;
        for (std::size_t i = 2; i < cells.size(); ++i) {
            const auto cell = cells[i];
            if (cell.empty() || cell.find(';') != std::string_view::npos) {
                std::vector<double> list;
                for (auto part : split(cell, ';')) {
                    if (part.empty()) continue;
                    auto v = to_double(part);
                    if (!v) throw ParseError(lineno, "bad list value in column " + header[i]);
                    list.push_back(*v);
                }
                s.fields.push_back({header[i], std::move(list)});
            } else {
                auto v = to_double(cell);
                if (!v) throw ParseError(lineno, "bad value in column " + header[i]);
                s.fields.push_back({header[i], *v});
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace tissue
