#include "wd/wiring.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace wd {

namespace {

void check_ports(const std::string& box, const char* side, const std::vector<Port>& ports) {
    std::set<std::string> seen;
    for (const auto& p : ports) {
        if (p.label.empty()) throw Error("box '" + box + "': empty " + side + " label");
        if (!p.domain) throw Error("box '" + box + "': " + side + " '" + p.label + "' has no domain");
        if (!seen.insert(p.label).second)
            throw Error("box '" + box + "': duplicate " + side + " label '" + p.label + "'");
    }
}

}  // namespace

BlackBox::BlackBox(std::string name, std::vector<Port> inputs, std::vector<Port> outputs)
    : name_(std::move(name)), inputs_(std::move(inputs)), outputs_(std::move(outputs)) {
    check_ports(name_, "input", inputs_);
    check_ports(name_, "output", outputs_);
}

const Port* BlackBox::find_input(const std::string& label) const {
    for (const auto& p : inputs_)
        if (p.label == label) return &p;
    return nullptr;
}

const Port* BlackBox::find_output(const std::string& label) const {
    for (const auto& p : outputs_)
        if (p.label == label) return &p;
    return nullptr;
}

bool BlackBox::same_shape(const BlackBox& other) const {
    auto side_eq = [](const std::vector<Port>& a, const std::vector<Port>& b) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i].label != b[i].label || !same_domain(a[i].domain, b[i].domain)) return false;
        return true;
    };
    return side_eq(inputs_, other.inputs_) && side_eq(outputs_, other.outputs_);
}

std::string BlackBox::shape_fingerprint() const {
    std::string fp = "[";
    for (const auto& p : inputs_) fp += p.label + ":" + p.domain->fingerprint() + ";";
    fp += "]->[";
    for (const auto& p : outputs_) fp += p.label + ":" + p.domain->fingerprint() + ";";
    fp += "]";
    return fp;
}

WiringDiagram::WiringDiagram(BlackBox codomain, std::vector<BlackBox> interior,
                             std::vector<DelayNode> delays, std::map<WireId, WireId> supplier,
                             std::string name, std::vector<std::string> slot_names)
    : name_(std::move(name)),
      codomain_(std::move(codomain)),
      interior_(std::move(interior)),
      slot_names_(std::move(slot_names)),
      delays_(std::move(delays)),
      supplier_(std::move(supplier)) {
    if (slot_names_.empty()) {
        // Default instance names: box name when unambiguous, else name#slot.
        std::map<std::string, int> uses;
        for (const auto& b : interior_) ++uses[b.name()];
        for (std::size_t i = 0; i < interior_.size(); ++i) {
            const std::string& n = interior_[i].name();
            if (uses[n] == 1 && n != codomain_.name())
                slot_names_.push_back(n);
            else
                slot_names_.push_back(n + "#" + std::to_string(i));
        }
    }
    if (slot_names_.size() != interior_.size())
        throw Error("diagram '" + name_ + "': slot name count does not match interior count");
}

const WireId* WiringDiagram::supplier_of(const WireId& demand) const {
    auto it = supplier_.find(demand);
    return it == supplier_.end() ? nullptr : &it->second;
}

DomainRef WiringDiagram::domain_of(const WireId& w) const {
    if (w.is_delay()) {
        const DelayNode* d = find_delay(w.label);
        return d ? d->domain : nullptr;
    }
    const BlackBox* box = nullptr;
    if (w.slot == WireId::kBoundary)
        box = &codomain_;
    else if (w.slot >= 0 && static_cast<std::size_t>(w.slot) < interior_.size())
        box = &interior_[w.slot];
    if (!box) return nullptr;
    const Port* p =
        w.side == WireId::Side::input ? box->find_input(w.label) : box->find_output(w.label);
    return p ? p->domain : nullptr;
}

const DelayNode* WiringDiagram::find_delay(const std::string& label) const {
    for (const auto& d : delays_)
        if (d.label == label) return &d;
    return nullptr;
}

std::string WiringDiagram::wire_name(const WireId& w) const {
    if (w.is_delay()) return "delay." + w.label;
    std::string owner;
    if (w.slot == WireId::kBoundary)
        owner = codomain_.name();
    else if (w.slot >= 0 && static_cast<std::size_t>(w.slot) < slot_names_.size())
        owner = slot_names_[w.slot];
    else
        owner = "slot" + std::to_string(w.slot);
    return owner + (w.side == WireId::Side::input ? ".in." : ".out.") + w.label;
}

const char* violation_code_name(Violation::Code c) {
    switch (c) {
        case Violation::Code::duplicate_wire: return "duplicate-wire";
        case Violation::Code::missing_supplier: return "missing-supplier";
        case Violation::Code::unknown_demand_wire: return "unknown-demand-wire";
        case Violation::Code::unknown_supply_wire: return "unknown-supply-wire";
        case Violation::Code::domain_mismatch: return "domain-mismatch";
        case Violation::Code::delay_domain_mismatch: return "delay-domain-mismatch";
        case Violation::Code::instantaneous_output: return "instantaneous-output";
    }
    return "?";
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (const auto& v : issues) {
        os << violation_code_name(v.code);
        for (const auto& w : v.wires) os << ' ' << w;
        if (!v.detail.empty()) os << ": " << v.detail;
        os << '\n';
    }
    return os.str();
}

ValidationReport validate_diagram(const WiringDiagram& wd) {
    ValidationReport report;
    auto flag = [&](Violation::Code code, std::vector<WireId> wires, std::string detail) {
        Violation v{code, {}, std::move(detail)};
        for (const auto& w : wires) v.wires.push_back(wd.wire_name(w));
        report.issues.push_back(std::move(v));
    };

    std::set<std::string> delay_labels;
    for (const auto& d : wd.delays()) {
        if (!delay_labels.insert(d.label).second)
            flag(Violation::Code::duplicate_wire, {WireId::delay(d.label)},
                 "delay label declared twice");
    }

    WireTables tables = wire_tables(wd);
    std::set<WireId> demand_set(tables.demands.begin(), tables.demands.end());
    std::set<WireId> supply_set(tables.supplies.begin(), tables.supplies.end());

    for (const auto& d : tables.demands) {
        if (!wd.supplier_of(d))
            flag(Violation::Code::missing_supplier, {d}, "demand has no supplier");
    }

    for (const auto& [demand, supply] : wd.supplier()) {
        if (!demand_set.count(demand)) {
            flag(Violation::Code::unknown_demand_wire, {demand},
                 "supplier entry keyed by a wire that is not a demand here");
            continue;
        }
        if (!supply_set.count(supply)) {
            flag(Violation::Code::unknown_supply_wire, {demand, supply},
                 "assigned supplier is not a supply wire here");
            continue;
        }
        DomainRef dd = wd.domain_of(demand);
        DomainRef sd = wd.domain_of(supply);
        if (!same_domain(dd, sd)) {
            auto code = demand.is_delay() ? Violation::Code::delay_domain_mismatch
                                          : Violation::Code::domain_mismatch;
            flag(code, {demand, supply},
                 (dd ? dd->name() : "?") + " demanded, " + (sd ? sd->name() : "?") + " supplied");
        }
        if (demand.side == WireId::Side::output && demand.slot == WireId::kBoundary &&
            supply.side == WireId::Side::input && supply.slot == WireId::kBoundary) {
            flag(Violation::Code::instantaneous_output, {demand, supply},
                 "codomain output supplied directly by codomain input");
        }
    }

    return report;
}

WireTables wire_tables(const WiringDiagram& wd) {
    WireTables t;
    for (const auto& p : wd.codomain().outputs()) t.demands.push_back(WireId::boundary_out(p.label));
    for (std::size_t i = 0; i < wd.interior().size(); ++i)
        for (const auto& p : wd.interior()[i].inputs())
            t.demands.push_back(WireId::box_in(static_cast<int>(i), p.label));
    for (const auto& d : wd.delays()) t.demands.push_back(WireId::delay(d.label));

    for (const auto& p : wd.codomain().inputs()) t.supplies.push_back(WireId::boundary_in(p.label));
    for (std::size_t i = 0; i < wd.interior().size(); ++i)
        for (const auto& p : wd.interior()[i].outputs())
            t.supplies.push_back(WireId::box_out(static_cast<int>(i), p.label));
    for (const auto& d : wd.delays()) t.supplies.push_back(WireId::delay(d.label));
    return t;
}

namespace {
std::optional<std::size_t> index_of(const std::vector<WireId>& v, const WireId& w) {
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] == w) return i;
    return std::nullopt;
}
}  // namespace

std::optional<std::size_t> WireTables::demand_index(const WireId& w) const {
    return index_of(demands, w);
}

std::optional<std::size_t> WireTables::supply_index(const WireId& w) const {
    return index_of(supplies, w);
}

}  // namespace wd
