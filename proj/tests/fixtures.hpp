#pragma once

// The running example used across the test suites: natural-number wires with
// default 1, an adder box X inside a running-total box Y inside a sourceless
// box Z, and the two wiring diagrams connecting them.

#include <initializer_list>

#include "wd/algebra.hpp"
#include "wd/operad.hpp"

namespace fx {

inline wd::DomainRef domain_n() {
    static wd::DomainRef n = std::make_shared<const wd::ValueDomain>(wd::ValueDomain::make(
        {"N", wd::DomainKind::naturals, {}, wd::Value::integer(1)}));
    return n;
}

inline wd::BlackBox box_x() {
    return wd::BlackBox("X", {{"a_X", domain_n()}, {"b_X", domain_n()}}, {{"c_X", domain_n()}});
}

inline wd::BlackBox box_y() {
    return wd::BlackBox("Y", {{"a_Y", domain_n()}}, {{"c_Y", domain_n()}});
}

inline wd::BlackBox box_z() { return wd::BlackBox("Z", {}, {{"c_Z", domain_n()}}); }

// phi : X -> Y with supplier c_Y <- c_X, a_X <- a_Y, b_X <- c_X.
inline wd::WiringDiagram diagram_phi() {
    std::map<wd::WireId, wd::WireId> s;
    s.emplace(wd::WireId::boundary_out("c_Y"), wd::WireId::box_out(0, "c_X"));
    s.emplace(wd::WireId::box_in(0, "a_X"), wd::WireId::boundary_in("a_Y"));
    s.emplace(wd::WireId::box_in(0, "b_X"), wd::WireId::box_out(0, "c_X"));
    return wd::WiringDiagram(box_y(), {box_x()}, {}, std::move(s), "phi");
}

// psi : Y -> Z with delay d_psi and supplier c_Z <- d, a_Y <- d, d <- c_Y.
inline wd::WiringDiagram diagram_psi() {
    std::map<wd::WireId, wd::WireId> s;
    s.emplace(wd::WireId::boundary_out("c_Z"), wd::WireId::delay("d_psi"));
    s.emplace(wd::WireId::box_in(0, "a_Y"), wd::WireId::delay("d_psi"));
    s.emplace(wd::WireId::delay("d_psi"), wd::WireId::box_out(0, "c_Y"));
    return wd::WiringDiagram(box_z(), {box_y()}, {{"d_psi", domain_n()}}, std::move(s), "psi");
}

// The adder: first output 1, then the sum of the previous input pair.
inline wd::Propagator plus_propagator() {
    wd::Propagator::MooreBody m;
    m.init_output = {wd::Value::integer(1)};
    m.step = [](std::span<const wd::Value> in, std::span<const wd::Value>) {
        return wd::Propagator::MooreStep{
            {wd::Value::integer(in[0].as_integer() + in[1].as_integer())}, {}};
    };
    return wd::moore_propagator({{"a_X", domain_n()}, {"b_X", domain_n()}},
                                {{"c_X", domain_n()}}, std::move(m));
}

// Running total with initial output 0.
inline wd::Propagator sigma_propagator(wd::DomainRef dom, const std::string& in_label,
                                       const std::string& out_label) {
    wd::Propagator::MooreBody m;
    m.init_output = {wd::Value::integer(0)};
    m.init_state = {wd::Value::integer(0)};
    m.step = [](std::span<const wd::Value> in, std::span<const wd::Value> state) {
        wd::Value acc = wd::Value::integer(state[0].as_integer() + in[0].as_integer());
        return wd::Propagator::MooreStep{{acc}, {acc}};
    };
    return wd::moore_propagator({{in_label, dom}}, {{out_label, dom}}, std::move(m));
}

inline wd::TupleList ints(std::vector<wd::Coord> coords,
                          std::initializer_list<std::initializer_list<long long>> rows) {
    wd::TupleList out(std::move(coords));
    for (const auto& r : rows) {
        std::vector<wd::Value> row;
        for (long long v : r) row.push_back(wd::Value::integer(v));
        out.push_row(std::move(row));
    }
    return out;
}

inline wd::TupleList ints1(const std::string& label, wd::DomainRef dom,
                           std::initializer_list<long long> vals) {
    wd::TupleList out({{label, dom}});
    for (long long v : vals) out.push_row({wd::Value::integer(v)});
    return out;
}

// t empty rows over no coordinates (the unit-product exterior of Z).
inline wd::TupleList ticks(std::size_t t) {
    wd::TupleList out{std::vector<wd::Coord>{}};
    for (std::size_t i = 0; i < t; ++i) out.push_row({});
    return out;
}

}  // namespace fx
