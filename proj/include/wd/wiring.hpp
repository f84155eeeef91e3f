#pragma once

#include <compare>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wd/domain.hpp"

namespace wd {

// Identifies one wire inside a diagram context. Boundary wires belong to the
// codomain box (slot = kBoundary); interior wires are keyed by slot index so
// that repeated boxes stay distinct; delay wires are keyed by label alone and
// appear on both the demand and the supply side.
struct WireId {
    enum class Side { input, output, delay };
    static constexpr int kBoundary = -1;

    Side side = Side::input;
    int slot = kBoundary;
    std::string label;

    static WireId boundary_in(std::string l) { return {Side::input, kBoundary, std::move(l)}; }
    static WireId boundary_out(std::string l) { return {Side::output, kBoundary, std::move(l)}; }
    static WireId box_in(int slot, std::string l) { return {Side::input, slot, std::move(l)}; }
    static WireId box_out(int slot, std::string l) { return {Side::output, slot, std::move(l)}; }
    static WireId delay(std::string l) { return {Side::delay, kBoundary, std::move(l)}; }

    bool is_delay() const { return side == Side::delay; }
    bool is_boundary() const { return side != Side::delay && slot == kBoundary; }

    friend bool operator==(const WireId&, const WireId&) = default;
    friend auto operator<=>(const WireId&, const WireId&) = default;
};

struct Port {
    std::string label;
    DomainRef domain;

    friend bool operator==(const Port& a, const Port& b) {
        return a.label == b.label && same_domain(a.domain, b.domain);
    }
};

// A typed interface: named input and output wires, each carrying a domain.
class BlackBox {
public:
    BlackBox() = default;
    BlackBox(std::string name, std::vector<Port> inputs, std::vector<Port> outputs);

    const std::string& name() const { return name_; }
    const std::vector<Port>& inputs() const { return inputs_; }
    const std::vector<Port>& outputs() const { return outputs_; }

    const Port* find_input(const std::string& label) const;
    const Port* find_output(const std::string& label) const;

    // Interface equality: wire labels and domains, in order. Names are tags.
    bool same_shape(const BlackBox& other) const;
    std::string shape_fingerprint() const;

    friend bool operator==(const BlackBox& a, const BlackBox& b) {
        return a.name_ == b.name_ && a.inputs_ == b.inputs_ && a.outputs_ == b.outputs_;
    }

private:
    std::string name_;
    std::vector<Port> inputs_;
    std::vector<Port> outputs_;
};

inline BlackBox make_box(std::string name, std::vector<Port> inputs, std::vector<Port> outputs) {
    return BlackBox(std::move(name), std::move(inputs), std::move(outputs));
}

struct DelayNode {
    std::string label;
    DomainRef domain;

    friend bool operator==(const DelayNode& a, const DelayNode& b) {
        return a.label == b.label && same_domain(a.domain, b.domain);
    }
};

// A wiring diagram: interior boxes and delay nodes inside a codomain box,
// plus the supplier assignment from demand wires to supply wires.
//
// Construction is permissive; validate_diagram reports structural violations
// as data so that rejecting fixtures can be built at all.
class WiringDiagram {
public:
    WiringDiagram() = default;
    WiringDiagram(BlackBox codomain, std::vector<BlackBox> interior,
                  std::vector<DelayNode> delays, std::map<WireId, WireId> supplier,
                  std::string name = {}, std::vector<std::string> slot_names = {});

    const std::string& name() const { return name_; }
    const BlackBox& codomain() const { return codomain_; }
    const std::vector<BlackBox>& interior() const { return interior_; }
    const std::vector<DelayNode>& delays() const { return delays_; }
    const std::map<WireId, WireId>& supplier() const { return supplier_; }
    const std::vector<std::string>& slot_names() const { return slot_names_; }

    const WireId* supplier_of(const WireId& demand) const;
    // Domain carried by a wire, or nullptr when the wire does not exist here.
    DomainRef domain_of(const WireId& w) const;
    const DelayNode* find_delay(const std::string& label) const;

    // "Z.out.c", "X#0.in.a", "delay.d" -- presentation only.
    std::string wire_name(const WireId& w) const;

    // Representation equality, names and slot order included; use
    // canonicalize for equality up to isomorphism.
    friend bool operator==(const WiringDiagram& a, const WiringDiagram& b) {
        return a.name_ == b.name_ && a.codomain_ == b.codomain_ && a.interior_ == b.interior_ &&
               a.slot_names_ == b.slot_names_ && a.delays_ == b.delays_ &&
               a.supplier_ == b.supplier_;
    }

private:
    std::string name_;
    BlackBox codomain_;
    std::vector<BlackBox> interior_;
    std::vector<std::string> slot_names_;
    std::vector<DelayNode> delays_;
    std::map<WireId, WireId> supplier_;
};

struct Violation {
    enum class Code {
        duplicate_wire,        // delay label reused
        missing_supplier,      // demand without a supplier entry
        unknown_demand_wire,   // supplier key is not a demand of this diagram
        unknown_supply_wire,   // supplier value is not a supply of this diagram
        domain_mismatch,       // vset(demand) != vset(supplier(demand))
        delay_domain_mismatch, // ... where the demand is a delay node
        instantaneous_output,  // codomain output supplied by codomain input
    };
    Code code;
    std::vector<std::string> wires;  // rendered names of the offending wire(s)
    std::string detail;
};

const char* violation_code_name(Violation::Code c);

struct ValidationReport {
    std::vector<Violation> issues;
    bool ok() const { return issues.empty(); }
    std::string summary() const;
};

ValidationReport validate_diagram(const WiringDiagram& wd);

// Canonically ordered demand and supply wire lists: codomain wires first,
// then interior boxes in declared order, then delay nodes in declared order.
struct WireTables {
    std::vector<WireId> demands;
    std::vector<WireId> supplies;

    std::optional<std::size_t> demand_index(const WireId& w) const;
    std::optional<std::size_t> supply_index(const WireId& w) const;
};

WireTables wire_tables(const WiringDiagram& wd);

}  // namespace wd
