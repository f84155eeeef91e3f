#pragma once

#include <optional>

#include "wd/operad.hpp"
#include "wd/propagator.hpp"

namespace wd {

// A diagram with a 1-historical propagator installed in every interior slot.
struct Filling {
    WiringDiagram diagram;
    std::vector<Propagator> fillers;
};

// Throws unless every slot is filled by a degree-1 propagator whose
// coordinates match the box, and the diagram itself validates.
void validate_filling(const Filling& f);

// Shuttle: move values from supply columns to the demand columns they feed.
// The full form covers every demand; the internal form restricts to interior
// inputs and delays; the output form reads codomain outputs off the internal
// supply table. Coordinates of diagram tables are rendered wire names.
TupleList shuttle(const WiringDiagram& wd, const TupleList& supplies);
TupleList shuttle_internal(const WiringDiagram& wd, const TupleList& supplies);
TupleList shuttle_output(const WiringDiagram& wd, const TupleList& internal_supplies);

// Evaluate: one application of every filler and the one-step delay to a full
// internal demand prefix; output is one row longer than the input.
TupleList advance_internal(const Filling& f, const TupleList& internal_demands);

// Cascade: the supply prefix of length |l| grown iteratively from the
// exterior input prefix, re-evaluating the fillers on each round exactly as
// the defining recursion does.
TupleList cascade(const Filling& f, const TupleList& exterior_inputs);

// The algebra map on morphisms, literally shuttle-evaluate-shuttle-cascade;
// this is the oracle every faster path is checked against. Input coordinates
// are codomain input ports; the result covers codomain output ports and has
// length |l| + 1.
TupleList evaluate_diagram(const Filling& f, const TupleList& exterior_inputs);

// Wraps a filling as a reusable 1-historical propagator shaped like the
// codomain box, so evaluated diagrams can fill boxes in turn.
Propagator composite_propagator(const Filling& f);

// Per-step table of every supply wire plus the exterior output, with demand
// rows derived from the supplier assignment rather than stored.
class TraceBundle {
public:
    TraceBundle() = default;
    TraceBundle(std::string diagram, std::vector<Coord> supply_coords,
                std::vector<Coord> demand_coords, std::vector<std::size_t> demand_source,
                std::vector<std::vector<Value>> supply_rows, TupleList output);

    const std::string& diagram() const { return diagram_; }
    std::size_t steps() const { return supply_rows_.size(); }
    const std::vector<Coord>& supply_coords() const { return supply_coords_; }
    const std::vector<Coord>& demand_coords() const { return demand_coords_; }
    const std::vector<std::size_t>& demand_source() const { return demand_source_; }
    const std::vector<std::vector<Value>>& supply_rows() const { return supply_rows_; }
    std::vector<std::vector<Value>> demand_rows() const;
    const TupleList& output() const { return output_; }

    friend bool operator==(const TraceBundle& a, const TraceBundle& b);

private:
    std::string diagram_;
    std::vector<Coord> supply_coords_;
    std::vector<Coord> demand_coords_;
    std::vector<std::size_t> demand_source_;  // demand j is fed by supply demand_source_[j]
    std::vector<std::vector<Value>> supply_rows_;
    TupleList output_;
};

TraceBundle trace(const Filling& f, const TupleList& exterior_inputs);

// Incremental evaluation. Step t consumes exterior input row t and returns
// exterior output row t; finish returns the one lookahead row t+1. Moore
// fillers advance in O(1); prefix-function fillers are re-applied to their
// accumulated input prefix, preserving the interface.
class EvalSession {
public:
    explicit EvalSession(Filling f);

    std::size_t elapsed() const { return elapsed_; }
    bool finished() const { return finished_; }

    std::vector<Value> step(std::span<const Value> exterior_input_row);
    std::vector<Value> finish();

private:
    struct SlotState {
        std::vector<Value> moore_state;
        TupleList inputs;  // accumulated prefix, for prefix-function fillers
    };

    std::vector<Value> output_row() const;
    void advance_one(std::span<const Value> exterior_input_row);

    Filling filling_;
    std::size_t elapsed_ = 0;
    bool finished_ = false;
    std::vector<SlotState> slots_;
    std::vector<Value> pending_;  // internal supply row for step elapsed_+1
    std::vector<std::size_t> out_src_;   // codomain outputs <- internal supply index
    std::vector<std::size_t> idem_src_;  // internal demands <- supply index
    std::size_t n_ext_in_ = 0;
};

struct FunctorialityReport {
    std::size_t samples_checked = 0;
    std::vector<std::string> mismatches;
    bool ok() const { return mismatches.empty(); }
};

// Compares evaluating the composed diagram against composing the evaluations,
// value for value, on every sample list.
FunctorialityReport check_functoriality(const WiringDiagram& outer,
                                        std::span<const std::optional<WiringDiagram>> inners,
                                        std::span<const Propagator> innermost_fillers,
                                        std::span<const TupleList> samples);

}  // namespace wd
