#pragma once

#include "tissue/cell_dynamics.hpp"
#include "tissue/compartment.hpp"
#include "tissue/ingest_queue.hpp"
#include "tissue/probe.hpp"
#include "tissue/response.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stop_token>
#include <vector>

namespace tissue {

class Tissue;

/// What a cell cycle callback gets to work with.
struct CycleContext {
    Tissue& tissue;
    Compartment& compartment;
    Cell& cell;
    std::size_t index;

    /// Fires one of the cell's response producers with `value`.
    void respond(Antigen value) const;
};

using CycleFn = std::function<void(CycleContext&)>;
using ResponseSink = std::function<void(const ResponseRecord&)>;

enum class RunMode { virtual_time, realtime };

struct RunOptions {
    RunMode mode = RunMode::virtual_time;
    /// Ticks to execute. Unset runs until `stop` is requested.
    std::optional<std::uint64_t> ticks;
    ProbeFn probe;
    std::function<void(const ProbeSample&)> on_probe;
    /// Called before every tick with the index of the tick about to run.
    std::function<void(Tissue&, std::uint64_t)> before_tick;
    std::stop_token stop;
};

/// Antigen ingestion: antigen_multiplier copies, each into an independently
/// drawn tissue slot. Occupants of those slots are destroyed.
void ingest_antigen(Compartment& tissue, Antigen antigen);

/// Overwrites one tissue signal. Throws std::out_of_range for a bad index.
void set_tissue_signal(Compartment& tissue, std::size_t index, double level);

/// A compartment plus its scheduler, cell behaviours, ingest queue and
/// response stream. Owned by a single scheduler thread; only the queue is
/// shared with client sessions.
class Tissue {
public:
    explicit Tissue(const TissueParams& params);

    Compartment& compartment() noexcept { return compartment_; }
    const Compartment& compartment() const noexcept { return compartment_; }
    std::shared_ptr<IngestQueue> queue() const noexcept { return queue_; }

    void register_cell_type(CellType type, CycleFn cycle);
    /// Builds a cell from `spec` with the compartment generator and places it.
    /// Throws ParamError for an unregistered type or a full store.
    std::size_t add_cell(const CellSpec& spec);

    void set_match_fn(MatchFn fn) { match_ = std::move(fn); }
    void set_response_sink(ResponseSink sink) { sink_ = std::move(sink); }
    const std::vector<ResponseRecord>& responses() const noexcept { return responses_; }
    void emit_response(std::size_t cell, Antigen value);

    /// One scheduler step: drain queue, shuffle cells, receptor phase for
    /// all cells, callbacks for all cells, producer phase, cytokine phase,
    /// tick_count + 1. A throwing callback aborts with TickError.
    void tick();

    void run(const RunOptions& options);

    ProbeSample sample_probe(const ProbeFn& probe, std::uint64_t wall_us) const;

private:
    void drain_queue();

    Compartment compartment_;
    std::shared_ptr<IngestQueue> queue_ = std::make_shared<IngestQueue>();
    std::map<CellType, CycleFn> behaviours_;
    MatchFn match_ = exact_match;
    ResponseSink sink_;
    std::vector<ResponseRecord> responses_;
    std::vector<std::size_t> order_;
};

}  // namespace tissue
