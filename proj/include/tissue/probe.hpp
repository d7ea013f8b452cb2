#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tissue {

struct Compartment;

using ProbeValue = std::variant<double, std::vector<double>>;

struct ProbeField {
    std::string name;
    ProbeValue value;

    friend bool operator==(const ProbeField&, const ProbeField&) = default;
};

struct ProbeSample {
    std::uint64_t tick = 0;
    std::uint64_t wall_us = 0;
    std::vector<ProbeField> fields;
    std::optional<std::string> error;  // set when the callback threw

    const ProbeValue* find(const std::string& name) const;

    friend bool operator==(const ProbeSample&, const ProbeSample&) = default;
};

/// User sampler. Receives a read-only view between ticks.
using ProbeFn = std::function<std::vector<ProbeField>(const Compartment&)>;

/// Append-only probe CSV: `tick,wall_us,<field>...`. The header is taken
/// from the first successful sample; list values are `;`-joined; failed
/// samples are skipped.
class ProbeCsvWriter {
public:
    explicit ProbeCsvWriter(std::ostream& out) : out_(&out) {}

    void append(const ProbeSample& sample);

private:
    std::ostream* out_;
    std::vector<std::string> header_;
};

/// Reads a probe CSV back. Numeric cells become doubles; cells containing
/// `;` (or empty list cells) become lists.
std::vector<ProbeSample> read_probe_csv(std::istream& in);

}  // namespace tissue
