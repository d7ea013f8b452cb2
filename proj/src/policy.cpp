#include "tissue/policy.hpp"

#include "tissue/error.hpp"
#include "tissue/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>

namespace tissue {

std::string_view provenance_name(Provenance p) noexcept {
    switch (p) {
        case Provenance::naive: return "naive";
        case Provenance::generated: return "generated";
        case Provenance::merged: return "merged";
    }
    return "generated";
}

std::optional<Provenance> parse_provenance(std::string_view s) noexcept {
    if (s == "naive") return Provenance::naive;
    if (s == "generated") return Provenance::generated;
    if (s == "merged") return Provenance::merged;
    return std::nullopt;
}

Policy naive_policy(const std::vector<std::vector<std::uint32_t>>& traces) {
    Policy p{{}, Provenance::naive};
    for (const auto& t : traces) p.permitted.insert(t.begin(), t.end());
    return p;
}

Policy policy_from_responses(const std::vector<ResponseRecord>& responses) {
    Policy p{{}, Provenance::generated};
    for (const auto& r : responses) p.permitted.insert(r.value.value);
    return p;
}

Policy merge_policies(const std::vector<Policy>& policies) {
    if (policies.empty()) throw ParamError("nothing to merge: empty policy list");
    Policy p{{}, Provenance::merged};
    for (const auto& q : policies) p.permitted.insert(q.permitted.begin(), q.permitted.end());
    return p;
}

void write_policy(std::ostream& out, const Policy& policy, const SyscallMap& names) {
    out << "# provenance " << provenance_name(policy.provenance) << '\n';
    for (auto n : policy.permitted) {
        out << "permit " << n;
        if (auto name = names.name(n)) out << " # " << *name;
        out << '\n';
    }
}

Policy parse_policy(std::istream& in) {
    Policy p;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        auto text = trim(raw);
        if (text.empty()) continue;
        if (text.front() == '#') {
            const auto f = split_ws(text.substr(1));
            if (f.size() == 2 && f[0] == "provenance") {
                auto prov = parse_provenance(f[1]);
                if (!prov) throw ParseError(line, "unknown provenance '" + std::string(f[1]) + "'");
                p.provenance = *prov;
            }
            continue;
        }
        if (const auto hash = text.find('#'); hash != std::string_view::npos) text = trim(text.substr(0, hash));
        const auto f = split_ws(text);
        if (f.size() != 2 || f[0] != "permit") throw ParseError(line, "expected 'permit <number>'");
        const auto n = to_u32(f[1]);
        if (!n) throw ParseError(line, "bad syscall number '" + std::string(f[1]) + "'");
        p.permitted.insert(*n);
    }
    return p;
}

Policy load_policy(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open policy '" + path + "'");
    return parse_policy(in);
}

std::optional<std::int64_t> coefficient_of_variation(double mean, double sd) noexcept {
    if (mean == 0.0) return std::nullopt;
    return std::llround(100.0 * sd / mean);
}

RunCounts count_responses(const std::vector<ResponseRecord>& responses) {
    RunCounts c;
    for (const auto& r : responses) ++c[r.value.value];
    return c;
}

std::map<std::uint32_t, SyscallStats> response_stats(const std::vector<RunCounts>& runs,
                                                     const std::set<std::uint32_t>& universe) {
    std::set<std::uint32_t> keys = universe;
    for (const auto& r : runs)
        for (const auto& [k, v] : r) keys.insert(k);

    std::map<std::uint32_t, SyscallStats> out;
    const double n = double(runs.size());
    for (auto k : keys) {
        SyscallStats s;
        if (!runs.empty()) {
            std::vector<double> xs;
            for (const auto& r : runs) {
                auto it = r.find(k);
                xs.push_back(it == r.end() ? 0.0 : double(it->second));
            }
            s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
            if (runs.size() >= 2) {
                double ss = 0.0;
                for (double x : xs) ss += (x - s.mean) * (x - s.mean);
                s.sd = std::sqrt(ss / (n - 1));
            }
        }
        s.cv = coefficient_of_variation(s.mean, s.sd);
        out[k] = s;
    }
    return out;
}

namespace {

std::string_view tag_name(Tag t) { return t == Tag::attack ? "attack" : "normal"; }

}  // namespace

void write_label_file(std::ostream& out, const LabeledTrace& trace) {
    out << "# source " << trace.source << '\n' << "offset_us,syscall,tag\n";
    for (const auto& e : trace.events) out << e.offset_us << ',' << e.syscall << ',' << tag_name(e.tag) << '\n';
}

LabeledTrace parse_label_file(std::istream& in) {
    LabeledTrace t;
    std::string raw;
    std::size_t line = 0;
    bool header = false;
    while (std::getline(in, raw)) {
        ++line;
        const auto text = trim(raw);
        if (text.empty()) continue;
        if (text.front() == '#') {
            const auto f = split_ws(text.substr(1));
            if (f.size() == 2 && f[0] == "source") t.source = std::string(f[1]);
            continue;
        }
        if (!header) {
            if (text != "offset_us,syscall,tag") throw ParseError(line, "expected header 'offset_us,syscall,tag'");
            header = true;
            continue;
        }
        const auto c1 = text.find(',');
        const auto c2 = c1 == std::string_view::npos ? c1 : text.find(',', c1 + 1);
        if (c2 == std::string_view::npos) throw ParseError(line, "expected 3 fields");
        const auto off = to_u64(text.substr(0, c1));
        const auto sys = to_u32(text.substr(c1 + 1, c2 - c1 - 1));
        const auto tag = text.substr(c2 + 1);
        if (!off || !sys || (tag != "normal" && tag != "attack")) throw ParseError(line, "malformed label row");
        t.events.push_back({*off, *sys, tag == "attack" ? Tag::attack : Tag::normal});
    }
    if (!header) throw ParseError(0, "label file has no header");
    return t;
}

LabeledTrace load_label_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open label file '" + path + "'");
    return parse_label_file(in);
}

PolicyReport evaluate_policy(const Policy& policy, const LabeledTrace& trace) {
    if (trace.events.empty()) throw ParamError("cannot evaluate a policy on an empty trace");
    std::uint64_t permitted = 0, normal = 0, attack = 0, normal_ok = 0, attack_denied = 0;
    for (const auto& e : trace.events) {
        const bool ok = policy.permits(e.syscall);
        permitted += ok;
        if (e.tag == Tag::attack) {
            ++attack;
            attack_denied += !ok;
        } else {
            ++normal;
            normal_ok += ok;
        }
    }
    const auto pct = [](std::uint64_t part, std::uint64_t whole) -> std::int64_t {
        return whole ? std::int64_t(100 * part / whole) : 0;
    };
    const auto n = trace.events.size();
    return {pct(permitted, n), pct(n - permitted, n), pct(normal, n), pct(attack, n), pct(normal_ok, normal),
            pct(attack_denied, attack)};
}

void write_report_header(std::ostream& out) { out << "dataset,policy,permit_pct,deny_pct,normal_pct,attack_pct\n"; }

void write_report_row(std::ostream& out, std::string_view dataset, std::string_view policy, const PolicyReport& r) {
    out << dataset << ',' << policy << ',' << r.permit_pct << ',' << r.deny_pct << ',' << r.normal_pct << ','
        << r.attack_pct << '\n';
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = (double(i) + double(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

double pearson(const double* x, const double* y, std::size_t n) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (n < 2) return nan;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0 || syy == 0) return nan;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ParamError("spearman: series lengths differ");
    const auto rx = ranks(x), ry = ranks(y);
    return pearson(rx.data(), ry.data(), rx.size());
}

std::vector<double> cross_correlation(const std::vector<double>& x, const std::vector<double>& y, std::size_t max_lag) {
    if (x.size() != y.size()) throw ParamError("cross_correlation: series lengths differ");
    std::vector<double> out;
    const auto n = x.size();
    for (std::size_t i = 0; i <= 2 * max_lag; ++i) {
        const auto lag = std::int64_t(i) - std::int64_t(max_lag);
        const auto shift = std::size_t(lag < 0 ? -lag : lag);
        if (shift >= n) {
            out.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        // lag >= 0 pairs x[t] with y[t + lag]
        out.push_back(lag >= 0 ? pearson(x.data(), y.data() + shift, n - shift)
                               : pearson(x.data() + shift, y.data(), n - shift));
    }
    return out;
}

}  // namespace tissue
