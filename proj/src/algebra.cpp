#include "wd/algebra.hpp"

#include <algorithm>
#include <sstream>

namespace wd {

namespace {

std::vector<Coord> port_coords(const std::vector<Port>& ports) {
    std::vector<Coord> out;
    for (const auto& p : ports) out.push_back({p.label, p.domain});
    return out;
}

// Index plumbing shared by the evaluation paths. Requires a valid diagram.
struct Engine {
    const WiringDiagram& wd;
    WireTables tables;
    std::vector<Coord> supply_coords;    // rendered wire names
    std::vector<Coord> demand_coords;
    std::vector<std::size_t> demand_src;        // demand j <- supply demand_src[j]
    std::size_t n_ext_in, n_ext_out;
    std::vector<Coord> internal_demand_coords;  // demands minus codomain outputs
    std::vector<Coord> internal_supply_coords;  // supplies minus codomain inputs
    std::vector<std::size_t> internal_demand_src;  // internal demand <- full supply index
    std::vector<std::size_t> out_src;  // codomain output <- internal supply index

    explicit Engine(const WiringDiagram& d) : wd(d), tables(wire_tables(d)) {
        ValidationReport report = validate_diagram(wd);
        if (!report.ok())
            throw Error("diagram '" + wd.name() + "' does not validate:\n" + report.summary());

        n_ext_in = wd.codomain().inputs().size();
        n_ext_out = wd.codomain().outputs().size();
        for (const auto& w : tables.supplies)
            supply_coords.push_back({wd.wire_name(w), wd.domain_of(w)});
        for (const auto& w : tables.demands)
            demand_coords.push_back({wd.wire_name(w), wd.domain_of(w)});
        for (const auto& w : tables.demands)
            demand_src.push_back(*tables.supply_index(*wd.supplier_of(w)));

        internal_demand_coords.assign(demand_coords.begin() + n_ext_out, demand_coords.end());
        internal_supply_coords.assign(supply_coords.begin() + n_ext_in, supply_coords.end());
        internal_demand_src.assign(demand_src.begin() + n_ext_out, demand_src.end());
        for (std::size_t j = 0; j < n_ext_out; ++j) {
            // Non-instantaneity puts every codomain-output supplier in the
            // internal supply block.
            out_src.push_back(demand_src[j] - n_ext_in);
        }
    }
};

void check_exterior_inputs(const WiringDiagram& wd, const TupleList& l) {
    auto ports = port_coords(wd.codomain().inputs());
    if (!same_coords(l.coords(), ports))
        throw Error("exterior input coordinates " + coords_str(l.coords()) +
                    " do not match codomain inputs " + coords_str(ports));
}

}  // namespace

void validate_filling(const Filling& f) {
    ValidationReport report = validate_diagram(f.diagram);
    if (!report.ok())
        throw Error("diagram '" + f.diagram.name() + "' does not validate:\n" + report.summary());
    if (f.fillers.size() != f.diagram.interior().size())
        throw Error("filling has " + std::to_string(f.fillers.size()) + " fillers for " +
                    std::to_string(f.diagram.interior().size()) + " interior slots");
    for (std::size_t i = 0; i < f.fillers.size(); ++i) {
        const BlackBox& box = f.diagram.interior()[i];
        const Propagator& p = f.fillers[i];
        if (p.degree() != 1)
            throw Error("filler for slot '" + f.diagram.slot_names()[i] +
                        "' has degree " + std::to_string(p.degree()) + ", boxes need degree 1");
        if (!same_coords(p.inputs(), port_coords(box.inputs())) ||
            !same_coords(p.outputs(), port_coords(box.outputs())))
            throw Error("filler coordinates do not match box '" + box.name() + "' at slot " +
                        std::to_string(i));
    }
}

TupleList shuttle(const WiringDiagram& wd, const TupleList& supplies) {
    Engine e(wd);
    if (!same_coords(supplies.coords(), e.supply_coords))
        throw Error("shuttle expects the full supply table " + coords_str(e.supply_coords));
    return coordinate_project(supplies, e.demand_coords, e.demand_src);
}

TupleList shuttle_internal(const WiringDiagram& wd, const TupleList& supplies) {
    Engine e(wd);
    if (!same_coords(supplies.coords(), e.supply_coords))
        throw Error("shuttle expects the full supply table " + coords_str(e.supply_coords));
    return coordinate_project(supplies, e.internal_demand_coords, e.internal_demand_src);
}

TupleList shuttle_output(const WiringDiagram& wd, const TupleList& internal_supplies) {
    Engine e(wd);
    if (!same_coords(internal_supplies.coords(), e.internal_supply_coords))
        throw Error("shuttle_output expects the internal supply table " +
                    coords_str(e.internal_supply_coords));
    std::vector<Coord> targets(e.demand_coords.begin(), e.demand_coords.begin() + e.n_ext_out);
    return coordinate_project(internal_supplies, std::move(targets), e.out_src);
}

namespace {

TupleList advance_impl(const Filling& f, const Engine& e, const TupleList& internal_demands) {
    if (!same_coords(internal_demands.coords(), e.internal_demand_coords))
        throw Error("advance expects the internal demand table " +
                    coords_str(e.internal_demand_coords));

    // Split into per-slot blocks followed by the delay block.
    std::vector<std::size_t> widths;
    for (const auto& b : f.diagram.interior()) widths.push_back(b.inputs().size());
    widths.push_back(f.diagram.delays().size());
    auto blocks = split_aligned(internal_demands, widths);

    std::vector<TupleList> outs;
    std::size_t off = 0;
    for (std::size_t i = 0; i < f.fillers.size(); ++i) {
        TupleList local = relabel(blocks[i], std::vector<Coord>(f.fillers[i].inputs()));
        TupleList produced = f.fillers[i].apply(local);
        std::vector<Coord> names(e.internal_supply_coords.begin() + off,
                                 e.internal_supply_coords.begin() + off +
                                     f.diagram.interior()[i].outputs().size());
        off += f.diagram.interior()[i].outputs().size();
        outs.push_back(relabel(produced, std::move(names)));
    }
    {
        // Delay nodes advance by the one-moment delay.
        const TupleList& dem = blocks.back();
        std::vector<Coord> names(e.internal_supply_coords.end() - f.diagram.delays().size(),
                                 e.internal_supply_coords.end());
        TupleList sup(names);
        std::vector<Value> base;
        for (const auto& d : f.diagram.delays()) base.push_back(d.domain->basepoint());
        sup.push_row(std::move(base));
        for (std::size_t t = 0; t < dem.length(); ++t) sup.push_row(dem.row(t));
        outs.push_back(std::move(sup));
    }
    return zip_align(outs);
}

TupleList cascade_impl(const Filling& f, const Engine& e, const TupleList& exterior_inputs) {
    TupleList supplies{std::vector<Coord>(e.supply_coords)};
    const std::size_t t = exterior_inputs.length();
    for (std::size_t k = 1; k <= t; ++k) {
        // One unfolding of the recursion: re-derive the internal supplies
        // from the previous supply prefix, then extend by one input row.
        TupleList internal = advance_impl(
            f, e, coordinate_project(supplies, e.internal_demand_coords, e.internal_demand_src));
        TupleList next{std::vector<Coord>(e.supply_coords)};
        for (std::size_t r = 0; r < k; ++r) {
            std::vector<Value> row(exterior_inputs.row(r));
            const auto& irow = internal.row(r);
            row.insert(row.end(), irow.begin(), irow.end());
            next.push_row(std::move(row));
        }
        supplies = std::move(next);
    }
    return supplies;
}

TupleList evaluate_impl(const Filling& f, const Engine& e, const TupleList& exterior_inputs) {
    TupleList supplies = cascade_impl(f, e, exterior_inputs);
    TupleList internal_demands =
        coordinate_project(supplies, e.internal_demand_coords, e.internal_demand_src);
    TupleList internal_supplies = advance_impl(f, e, internal_demands);
    std::vector<Coord> targets(e.demand_coords.begin(), e.demand_coords.begin() + e.n_ext_out);
    TupleList out = coordinate_project(internal_supplies, std::move(targets), e.out_src);
    return relabel(out, port_coords(f.diagram.codomain().outputs()));
}

}  // namespace

TupleList advance_internal(const Filling& f, const TupleList& internal_demands) {
    validate_filling(f);
    return advance_impl(f, Engine(f.diagram), internal_demands);
}

TupleList cascade(const Filling& f, const TupleList& exterior_inputs) {
    validate_filling(f);
    check_exterior_inputs(f.diagram, exterior_inputs);
    return cascade_impl(f, Engine(f.diagram), exterior_inputs);
}

TupleList evaluate_diagram(const Filling& f, const TupleList& exterior_inputs) {
    validate_filling(f);
    check_exterior_inputs(f.diagram, exterior_inputs);
    return evaluate_impl(f, Engine(f.diagram), exterior_inputs);
}

Propagator composite_propagator(const Filling& f) {
    validate_filling(f);
    auto fn = [f](const TupleList& l) { return evaluate_diagram(f, l); };
    return Propagator(port_coords(f.diagram.codomain().inputs()),
                      port_coords(f.diagram.codomain().outputs()), 1, std::move(fn));
}

TraceBundle::TraceBundle(std::string diagram, std::vector<Coord> supply_coords,
                         std::vector<Coord> demand_coords, std::vector<std::size_t> demand_source,
                         std::vector<std::vector<Value>> supply_rows, TupleList output)
    : diagram_(std::move(diagram)),
      supply_coords_(std::move(supply_coords)),
      demand_coords_(std::move(demand_coords)),
      demand_source_(std::move(demand_source)),
      supply_rows_(std::move(supply_rows)),
      output_(std::move(output)) {}

std::vector<std::vector<Value>> TraceBundle::demand_rows() const {
    std::vector<std::vector<Value>> out;
    for (const auto& srow : supply_rows_) {
        std::vector<Value> row;
        row.reserve(demand_source_.size());
        for (std::size_t src : demand_source_) row.push_back(srow.at(src));
        out.push_back(std::move(row));
    }
    return out;
}

bool operator==(const TraceBundle& a, const TraceBundle& b) {
    return a.diagram_ == b.diagram_ && same_coords(a.supply_coords_, b.supply_coords_) &&
           same_coords(a.demand_coords_, b.demand_coords_) &&
           a.demand_source_ == b.demand_source_ && a.supply_rows_ == b.supply_rows_ &&
           a.output_ == b.output_;
}

TraceBundle trace(const Filling& f, const TupleList& exterior_inputs) {
    validate_filling(f);
    check_exterior_inputs(f.diagram, exterior_inputs);
    Engine e(f.diagram);

    TupleList supplies = cascade_impl(f, e, exterior_inputs);
    TupleList output = evaluate_impl(f, e, exterior_inputs);

    return TraceBundle(f.diagram.name(), e.supply_coords, e.demand_coords, e.demand_src,
                       supplies.rows(), std::move(output));
}

EvalSession::EvalSession(Filling f) : filling_(std::move(f)) {
    validate_filling(filling_);
    Engine e(filling_.diagram);
    out_src_ = e.out_src;
    idem_src_ = e.internal_demand_src;
    n_ext_in_ = e.n_ext_in;

    for (const auto& p : filling_.fillers) {
        SlotState s;
        if (p.is_moore())
            s.moore_state = p.moore().init_state;
        else
            s.inputs = TupleList{std::vector<Coord>(p.inputs())};
        slots_.push_back(std::move(s));
        // First output row: the filler's value on the empty prefix.
        TupleList first = p.apply(TupleList{std::vector<Coord>(p.inputs())});
        pending_.insert(pending_.end(), first.row(0).begin(), first.row(0).end());
    }
    for (const auto& d : filling_.diagram.delays()) pending_.push_back(d.domain->basepoint());
}

std::vector<Value> EvalSession::output_row() const {
    std::vector<Value> out;
    out.reserve(out_src_.size());
    for (std::size_t src : out_src_) out.push_back(pending_.at(src));
    return out;
}

void EvalSession::advance_one(std::span<const Value> exterior_input_row) {
    // Full supply row for this step, then the internal demand row it feeds.
    std::vector<Value> supply_row(exterior_input_row.begin(), exterior_input_row.end());
    supply_row.insert(supply_row.end(), pending_.begin(), pending_.end());
    std::vector<Value> demand_row;
    demand_row.reserve(idem_src_.size());
    for (std::size_t src : idem_src_) demand_row.push_back(supply_row.at(src));

    std::vector<Value> next;
    std::size_t off = 0;
    for (std::size_t i = 0; i < filling_.fillers.size(); ++i) {
        const Propagator& p = filling_.fillers[i];
        std::span<const Value> block(demand_row.data() + off, p.inputs().size());
        off += p.inputs().size();
        if (p.is_moore()) {
            auto s = p.moore().step(block, slots_[i].moore_state);
            slots_[i].moore_state = std::move(s.state);
            next.insert(next.end(), s.output.begin(), s.output.end());
        } else {
            slots_[i].inputs.push_row(std::vector<Value>(block.begin(), block.end()));
            TupleList out = p.apply(slots_[i].inputs);
            const auto& last = out.row(out.length() - 1);
            next.insert(next.end(), last.begin(), last.end());
        }
    }
    // Delay block: next supply row is this step's demand row.
    next.insert(next.end(), demand_row.begin() + off, demand_row.end());
    pending_ = std::move(next);
}

std::vector<Value> EvalSession::step(std::span<const Value> exterior_input_row) {
    if (finished_) throw Error("session used after finish");
    if (exterior_input_row.size() != n_ext_in_)
        throw Error("session step expects " + std::to_string(n_ext_in_) + " input values");
    const auto& ports = filling_.diagram.codomain().inputs();
    for (std::size_t i = 0; i < ports.size(); ++i)
        if (!ports[i].domain->contains(exterior_input_row[i]))
            throw Error("session input " + exterior_input_row[i].str() + " not in domain '" +
                        ports[i].domain->name() + "'");
    std::vector<Value> out = output_row();
    advance_one(exterior_input_row);
    ++elapsed_;
    return out;
}

std::vector<Value> EvalSession::finish() {
    if (finished_) throw Error("session used after finish");
    finished_ = true;
    return output_row();
}

FunctorialityReport check_functoriality(const WiringDiagram& outer,
                                        std::span<const std::optional<WiringDiagram>> inners,
                                        std::span<const Propagator> innermost_fillers,
                                        std::span<const TupleList> samples) {
    FunctorialityReport report;

    CompositionPlan plan{outer, {inners.begin(), inners.end()}};
    WiringDiagram composed = compose_diagrams(plan);
    Filling direct{composed, {innermost_fillers.begin(), innermost_fillers.end()}};
    validate_filling(direct);

    // Evaluate each inner diagram into a propagator for its outer slot.
    std::vector<Propagator> slot_fillers;
    std::size_t off = 0;
    for (std::size_t i = 0; i < inners.size(); ++i) {
        WiringDiagram inner = inners[i] ? *inners[i] : identity_diagram(outer.interior()[i]);
        std::size_t take = inner.interior().size();
        std::vector<Propagator> sub(innermost_fillers.begin() + off,
                                    innermost_fillers.begin() + off + take);
        off += take;
        slot_fillers.push_back(composite_propagator(Filling{std::move(inner), std::move(sub)}));
    }
    Filling nested{outer, std::move(slot_fillers)};
    validate_filling(nested);

    for (std::size_t s = 0; s < samples.size(); ++s) {
        report.samples_checked++;
        TupleList lhs = evaluate_diagram(direct, samples[s]);
        TupleList rhs = evaluate_diagram(nested, samples[s]);
        if (!(lhs == rhs)) {
            std::ostringstream os;
            os << "sample " << s << " " << samples[s].str() << ": composed gives " << lhs.str()
               << ", nested gives " << rhs.str();
            report.mismatches.push_back(os.str());
        }
    }
    return report;
}

}  // namespace wd
