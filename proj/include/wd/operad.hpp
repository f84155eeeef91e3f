#pragma once

#include <optional>
#include <span>

#include "wd/wiring.hpp"

namespace wd {

// Identity wiring diagram on a box: one interior copy, no delays, identity
// supplier assignment.
WiringDiagram identity_diagram(const BlackBox& box);

// Tensor product: component-wise disjoint union. Boundary wire labels and
// delay labels are qualified with "t<i>." only where parts collide, so a
// one-part tensor is the part itself.
WiringDiagram tensor_diagrams(std::span<const WiringDiagram> parts);

// Substitution plan: an outer diagram plus one inner diagram per interior
// slot; nullopt keeps the slot as-is (identity substitution).
struct CompositionPlan {
    WiringDiagram outer;
    std::vector<std::optional<WiringDiagram>> inner;
};

// Operadic composition via the explicit coproduct decomposition of the
// supply pushout: Sup(w) = Z_in + X_out + D_phi + D_psi, with the closed-form
// gluing maps routing inner boundary wires through the outer supplier and
// outer interior wires through the inner suppliers.
WiringDiagram compose_diagrams(const CompositionPlan& plan);

// The deterministic representative of a diagram's isomorphism class: interior
// slots and delay nodes are reordered by structural key and renamed to
// position-derived names (b0..., d0...). Boxes' given names and delay labels
// do not influence the key, so relabelled or permuted presentations of the
// same diagram canonicalize identically.
struct CanonicalForm {
    WiringDiagram diagram;  // the renamed representative
    std::string key;        // full structural serialization

    friend bool operator==(const CanonicalForm& a, const CanonicalForm& b) {
        return a.key == b.key;
    }
};

CanonicalForm canonicalize(const WiringDiagram& wd);

// Reorders interior slots: result slot k holds old slot perm[k]. The supplier
// assignment is re-keyed accordingly; the canonical form is unchanged.
WiringDiagram permute_interior(const WiringDiagram& wd, std::span<const std::size_t> perm);

}  // namespace wd
