#include <doctest.h>

#include "fixtures.hpp"
#include "wd/wiring.hpp"

using namespace wd;

TEST_CASE("make_box rejects duplicate labels and keeps order") {
    BlackBox x = fx::box_x();
    CHECK(x.inputs().size() == 2);
    CHECK(x.inputs()[0].label == "a_X");
    CHECK(x.find_output("c_X") != nullptr);
    CHECK_THROWS_AS(BlackBox("bad", {{"a", fx::domain_n()}, {"a", fx::domain_n()}}, {}), Error);
    // Degenerate boxes are fine.
    CHECK_NOTHROW(BlackBox("empty", {}, {}));
}

TEST_CASE("phi and psi validate") {
    CHECK(validate_diagram(fx::diagram_phi()).ok());
    CHECK(validate_diagram(fx::diagram_psi()).ok());
}

TEST_CASE("wire tables of psi follow the declared order") {
    WireTables t = wire_tables(fx::diagram_psi());
    REQUIRE(t.demands.size() == 3);
    CHECK(t.demands[0] == WireId::boundary_out("c_Z"));
    CHECK(t.demands[1] == WireId::box_in(0, "a_Y"));
    CHECK(t.demands[2] == WireId::delay("d_psi"));
    REQUIRE(t.supplies.size() == 2);
    CHECK(t.supplies[0] == WireId::box_out(0, "c_Y"));
    CHECK(t.supplies[1] == WireId::delay("d_psi"));
}

TEST_CASE("wire table sizes") {
    WiringDiagram phi = fx::diagram_phi();
    WireTables t = wire_tables(phi);
    CHECK(t.demands.size() ==
          phi.codomain().outputs().size() + phi.interior()[0].inputs().size() +
              phi.delays().size());
    CHECK(t.supplies.size() ==
          phi.codomain().inputs().size() + phi.interior()[0].outputs().size() +
              phi.delays().size());
}

TEST_CASE("structurally equal diagrams produce identical tables") {
    WireTables a = wire_tables(fx::diagram_psi());
    WireTables b = wire_tables(fx::diagram_psi());
    CHECK(a.demands == b.demands);
    CHECK(a.supplies == b.supplies);
}

TEST_CASE("diagram with no boxes and no delays") {
    BlackBox pass("P", {{"a", fx::domain_n()}}, {});
    WiringDiagram empty(pass, {}, {}, {}, "empty");
    CHECK(validate_diagram(empty).ok());
    WireTables t = wire_tables(empty);
    CHECK(t.demands.empty());
    CHECK(t.supplies.size() == 1);
}

namespace {

bool has_violation(const ValidationReport& r, Violation::Code code, const std::string& wire) {
    for (const auto& v : r.issues) {
        if (v.code != code) continue;
        for (const auto& w : v.wires)
            if (w == wire) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("non-instantaneity violation names the output wire") {
    // c_Z supplied directly by an exterior input.
    BlackBox z("Z", {{"a_Z", fx::domain_n()}}, {{"c_Z", fx::domain_n()}});
    std::map<WireId, WireId> s;
    s.emplace(WireId::boundary_out("c_Z"), WireId::boundary_in("a_Z"));
    WiringDiagram bad(z, {}, {}, std::move(s), "bad");
    ValidationReport r = validate_diagram(bad);
    CHECK_FALSE(r.ok());
    CHECK(has_violation(r, Violation::Code::instantaneous_output, "Z.out.c_Z"));
}

TEST_CASE("domain mismatch violation") {
    auto abc = std::make_shared<const ValueDomain>(
        ValueDomain::make({"ABC", DomainKind::finite, {"a", "b", "c"}, std::nullopt}));
    BlackBox z("Z", {{"a_Z", abc}}, {{"c_Z", fx::domain_n()}});
    BlackBox inner("W", {{"i", fx::domain_n()}}, {{"o", fx::domain_n()}});
    std::map<WireId, WireId> s;
    s.emplace(WireId::boundary_out("c_Z"), WireId::box_out(0, "o"));
    s.emplace(WireId::box_in(0, "i"), WireId::boundary_in("a_Z"));  // N demanded, ABC supplied
    WiringDiagram bad(z, {inner}, {}, std::move(s), "bad");
    ValidationReport r = validate_diagram(bad);
    CHECK_FALSE(r.ok());
    CHECK(has_violation(r, Violation::Code::domain_mismatch, "W.in.i"));
}

TEST_CASE("delay domain mismatch is reported distinctly") {
    auto abc = std::make_shared<const ValueDomain>(
        ValueDomain::make({"ABC", DomainKind::finite, {"a", "b", "c"}, std::nullopt}));
    BlackBox z("Z", {}, {{"c_Z", fx::domain_n()}});
    BlackBox inner("W", {}, {{"o", abc}});
    std::map<WireId, WireId> s;
    s.emplace(WireId::boundary_out("c_Z"), WireId::delay("d"));
    s.emplace(WireId::delay("d"), WireId::box_out(0, "o"));  // N delay fed by ABC
    WiringDiagram bad(z, {inner}, {{"d", fx::domain_n()}}, std::move(s), "bad");
    ValidationReport r = validate_diagram(bad);
    CHECK_FALSE(r.ok());
    CHECK(has_violation(r, Violation::Code::delay_domain_mismatch, "delay.d"));
}

TEST_CASE("missing and unknown suppliers") {
    WiringDiagram psi = fx::diagram_psi();
    // Remove one entry.
    std::map<WireId, WireId> s = psi.supplier();
    s.erase(WireId::boundary_out("c_Z"));
    WiringDiagram missing(psi.codomain(), psi.interior(), psi.delays(), s, "missing");
    CHECK(has_violation(validate_diagram(missing), Violation::Code::missing_supplier,
                        "Z.out.c_Z"));

    // Key a supply wire as if it were a demand.
    s = psi.supplier();
    s.emplace(WireId::box_out(0, "c_Y"), WireId::delay("d_psi"));
    WiringDiagram unknown(psi.codomain(), psi.interior(), psi.delays(), s, "unknown");
    CHECK(has_violation(validate_diagram(unknown), Violation::Code::unknown_demand_wire,
                        "Y.out.c_Y"));

    // Point a demand at a wire that does not exist.
    s = psi.supplier();
    s[WireId::boundary_out("c_Z")] = WireId::box_out(3, "nope");
    WiringDiagram dangling(psi.codomain(), psi.interior(), psi.delays(), s, "dangling");
    CHECK_FALSE(validate_diagram(dangling).ok());
}

TEST_CASE("duplicate delay labels are flagged") {
    BlackBox z = fx::box_z();
    std::map<WireId, WireId> s;
    s.emplace(WireId::boundary_out("c_Z"), WireId::delay("d"));
    s.emplace(WireId::delay("d"), WireId::delay("d"));
    WiringDiagram dup(z, {}, {{"d", fx::domain_n()}, {"d", fx::domain_n()}}, std::move(s), "dup");
    ValidationReport r = validate_diagram(dup);
    CHECK(has_violation(r, Violation::Code::duplicate_wire, "delay.d"));
}

TEST_CASE("a self-supplying delay is legal") {
    BlackBox z = fx::box_z();
    std::map<WireId, WireId> s;
    s.emplace(WireId::boundary_out("c_Z"), WireId::delay("d"));
    s.emplace(WireId::delay("d"), WireId::delay("d"));
    WiringDiagram loop(z, {}, {{"d", fx::domain_n()}}, std::move(s), "loop");
    CHECK(validate_diagram(loop).ok());
}
