#include "wd/operad.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>
#include <sstream>

namespace wd {

WiringDiagram identity_diagram(const BlackBox& box) {
    std::map<WireId, WireId> supplier;
    for (const auto& p : box.outputs())
        supplier.emplace(WireId::boundary_out(p.label), WireId::box_out(0, p.label));
    for (const auto& p : box.inputs())
        supplier.emplace(WireId::box_in(0, p.label), WireId::boundary_in(p.label));
    return WiringDiagram(box, {box}, {}, std::move(supplier), "id_" + box.name());
}

namespace {

// Labels are qualified with "t<i>." only when the same label occurs in the
// same group of more than one part, so disjoint unions stay readable and a
// one-part tensor is untouched.
class TensorNamer {
public:
    void count(int group, const std::string& label) { ++uses_[{group, label}]; }
    std::string pick(int part, int group, const std::string& label) const {
        auto it = uses_.find({group, label});
        if (it != uses_.end() && it->second > 1)
            return "t" + std::to_string(part) + "." + label;
        return label;
    }

private:
    std::map<std::pair<int, std::string>, int> uses_;
};

enum TensorGroup { kIn = 0, kOut = 1, kDelay = 2, kSlot = 3 };

}  // namespace

WiringDiagram tensor_diagrams(std::span<const WiringDiagram> parts) {
    TensorNamer namer;
    for (const auto& part : parts) {
        for (const auto& p : part.codomain().inputs()) namer.count(kIn, p.label);
        for (const auto& p : part.codomain().outputs()) namer.count(kOut, p.label);
        for (const auto& d : part.delays()) namer.count(kDelay, d.label);
        for (const auto& s : part.slot_names()) namer.count(kSlot, s);
    }

    std::vector<Port> cod_in, cod_out;
    std::vector<BlackBox> interior;
    std::vector<std::string> slot_names;
    std::vector<DelayNode> delays;
    std::map<WireId, WireId> supplier;
    std::string cod_name;

    for (std::size_t i = 0; i < parts.size(); ++i) {
        const WiringDiagram& part = parts[i];
        const int pi = static_cast<int>(i);
        const int off = static_cast<int>(interior.size());

        if (i) cod_name += "*";
        cod_name += part.codomain().name();
        for (const auto& p : part.codomain().inputs())
            cod_in.push_back({namer.pick(pi, kIn, p.label), p.domain});
        for (const auto& p : part.codomain().outputs())
            cod_out.push_back({namer.pick(pi, kOut, p.label), p.domain});
        for (const auto& b : part.interior()) interior.push_back(b);
        for (const auto& s : part.slot_names()) slot_names.push_back(namer.pick(pi, kSlot, s));
        for (const auto& d : part.delays())
            delays.push_back({namer.pick(pi, kDelay, d.label), d.domain});

        auto remap = [&](const WireId& w) -> WireId {
            if (w.is_delay()) return WireId::delay(namer.pick(pi, kDelay, w.label));
            if (w.is_boundary()) {
                int group = w.side == WireId::Side::input ? kIn : kOut;
                return {w.side, WireId::kBoundary, namer.pick(pi, group, w.label)};
            }
            return {w.side, w.slot + off, w.label};
        };
        for (const auto& [dem, sup] : part.supplier()) {
            auto [it, fresh] = supplier.emplace(remap(dem), remap(sup));
            if (!fresh) throw Error("tensor_diagrams: demand collision after namespacing on " +
                                    it->first.label);
        }
    }

    if (parts.empty()) cod_name = "I";
    BlackBox codomain(cod_name, std::move(cod_in), std::move(cod_out));
    return WiringDiagram(std::move(codomain), std::move(interior), std::move(delays),
                         std::move(supplier), cod_name, std::move(slot_names));
}

namespace {

// Composition state: the outer diagram, materialized inner diagrams, slot
// offsets into the composed interior, and the delay renaming.
struct ComposeCtx {
    const WiringDiagram* outer;
    std::vector<WiringDiagram> inner;
    std::vector<int> offset;
    std::map<std::pair<int, std::string>, std::string> delay_name;  // part (-1 = outer)

    WireId inner_delay(int i, const std::string& l) const {
        return WireId::delay(delay_name.at({i, l}));
    }
    WireId outer_delay(const std::string& l) const {
        return WireId::delay(delay_name.at({-1, l}));
    }
};

// f on supplies of the outer diagram: identity on codomain inputs and outer
// delays; outer interior outputs are routed through the matching inner
// supplier, which non-instantaneity keeps inside X_out + D_inner.
WireId glue_outer_supply(const ComposeCtx& ctx, const WireId& w);

// h on supplies of inner diagram i: identity on its interior outputs and
// delays; its boundary inputs are demands of the outer diagram and follow
// the outer supplier through f.
WireId glue_inner_supply(const ComposeCtx& ctx, int i, const WireId& w) {
    if (w.is_delay()) return ctx.inner_delay(i, w.label);
    if (!w.is_boundary()) return {w.side, w.slot + ctx.offset[i], w.label};
    if (w.side != WireId::Side::input)
        throw Error("compose_diagrams: inner supply cannot be a boundary output");
    const WireId* s = ctx.outer->supplier_of(WireId::box_in(i, w.label));
    if (!s)
        throw Error("compose_diagrams: outer diagram has no supplier for " +
                    ctx.outer->wire_name(WireId::box_in(i, w.label)));
    return glue_outer_supply(ctx, *s);
}

WireId glue_outer_supply(const ComposeCtx& ctx, const WireId& w) {
    if (w.is_delay()) return ctx.outer_delay(w.label);
    if (w.is_boundary()) {
        if (w.side != WireId::Side::input)
            throw Error("compose_diagrams: outer supply cannot be a boundary output");
        return w;
    }
    const int i = w.slot;
    const WireId* s = ctx.inner[i].supplier_of(WireId::boundary_out(w.label));
    if (!s)
        throw Error("compose_diagrams: inner diagram " + std::to_string(i) +
                    " has no supplier for boundary output " + w.label);
    if (s->is_boundary() && s->side == WireId::Side::input)
        throw Error("compose_diagrams: inner diagram " + std::to_string(i) +
                    " violates non-instantaneity on " + w.label);
    return glue_inner_supply(ctx, i, *s);
}

}  // namespace

WiringDiagram compose_diagrams(const CompositionPlan& plan) {
    const WiringDiagram& outer = plan.outer;
    if (plan.inner.size() != outer.interior().size())
        throw Error("compose_diagrams: plan has " + std::to_string(plan.inner.size()) +
                    " inner entries for " + std::to_string(outer.interior().size()) + " slots");

    ComposeCtx ctx;
    ctx.outer = &outer;
    for (std::size_t i = 0; i < plan.inner.size(); ++i) {
        if (plan.inner[i]) {
            if (!plan.inner[i]->codomain().same_shape(outer.interior()[i]))
                throw Error("compose_diagrams: inner diagram '" + plan.inner[i]->name() +
                            "' does not fit interior slot " + std::to_string(i) + " ('" +
                            outer.interior()[i].name() + "')");
            ctx.inner.push_back(*plan.inner[i]);
        } else {
            ctx.inner.push_back(identity_diagram(outer.interior()[i]));
        }
    }

    std::vector<BlackBox> interior;
    std::vector<std::string> slot_names;
    for (std::size_t i = 0; i < ctx.inner.size(); ++i) {
        ctx.offset.push_back(static_cast<int>(interior.size()));
        for (const auto& b : ctx.inner[i].interior()) interior.push_back(b);
        for (const auto& s : ctx.inner[i].slot_names()) slot_names.push_back(s);
    }

    // D_omega = D_phi + D_psi; labels keep their names unless sources collide.
    std::map<std::string, int> delay_uses;
    for (std::size_t i = 0; i < ctx.inner.size(); ++i)
        for (const auto& d : ctx.inner[i].delays()) ++delay_uses[d.label];
    for (const auto& d : outer.delays()) ++delay_uses[d.label];
    std::vector<DelayNode> delays;
    auto assign_delay = [&](int part, const DelayNode& d) {
        std::string name = d.label;
        if (delay_uses[d.label] > 1)
            name = (part < 0 ? "o." : "i" + std::to_string(part) + ".") + d.label;
        ctx.delay_name[{part, d.label}] = name;
        delays.push_back({name, d.domain});
    };
    for (std::size_t i = 0; i < ctx.inner.size(); ++i)
        for (const auto& d : ctx.inner[i].delays()) assign_delay(static_cast<int>(i), d);
    for (const auto& d : outer.delays()) assign_delay(-1, d);

    // Disambiguate inherited slot names (presentation only).
    {
        std::map<std::string, int> uses;
        for (const auto& s : slot_names) ++uses[s];
        std::size_t k = 0;
        for (std::size_t i = 0; i < ctx.inner.size(); ++i) {
            for (std::size_t j = 0; j < ctx.inner[i].interior().size(); ++j, ++k) {
                if (uses[slot_names[k]] > 1 || slot_names[k] == outer.codomain().name())
                    slot_names[k] = outer.slot_names()[i] + "." + slot_names[k];
            }
        }
        std::set<std::string> final_check;
        for (std::size_t idx = 0; idx < slot_names.size(); ++idx)
            if (!final_check.insert(slot_names[idx]).second)
                slot_names[idx] += "#" + std::to_string(idx);
    }

    std::map<WireId, WireId> supplier;
    // Demands contributed by the inner diagrams: their interior inputs and
    // their delay nodes.
    for (std::size_t i = 0; i < ctx.inner.size(); ++i) {
        for (const auto& [dem, sup] : ctx.inner[i].supplier()) {
            WireId key;
            if (dem.is_delay())
                key = ctx.inner_delay(static_cast<int>(i), dem.label);
            else if (!dem.is_boundary())
                key = WireId::box_in(dem.slot + ctx.offset[i], dem.label);
            else
                continue;  // inner boundary outputs dissolve into the gluing
            supplier.emplace(key, glue_inner_supply(ctx, static_cast<int>(i), sup));
        }
    }
    // Demands contributed by the outer diagram: codomain outputs and delays.
    for (const auto& [dem, sup] : outer.supplier()) {
        WireId key;
        if (dem.is_delay())
            key = ctx.outer_delay(dem.label);
        else if (dem.is_boundary() && dem.side == WireId::Side::output)
            key = dem;
        else
            continue;  // outer interior inputs dissolve into the gluing
        supplier.emplace(key, glue_outer_supply(ctx, sup));
    }

    return WiringDiagram(outer.codomain(), std::move(interior), std::move(delays),
                         std::move(supplier), outer.name(), std::move(slot_names));
}

namespace {

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[h & 0xf];
        h >>= 4;
    }
    return s;
}

// Color refinement over interior slots and delay nodes. Initial colors come
// from interface shapes; each round folds in the colors of supplier and
// consumer neighbours. Stops when the partition is stable.
struct Refinement {
    const WiringDiagram& wd;
    std::vector<std::string> slot_color;
    std::vector<std::string> delay_color;
    std::map<std::string, int> delay_index;

    explicit Refinement(const WiringDiagram& d) : wd(d) {
        for (std::size_t i = 0; i < wd.interior().size(); ++i)
            slot_color.push_back("S|" + wd.interior()[i].shape_fingerprint());
        for (std::size_t i = 0; i < wd.delays().size(); ++i) {
            delay_color.push_back("d|" + wd.delays()[i].domain->fingerprint());
            delay_index[wd.delays()[i].label] = static_cast<int>(i);
        }
        run();
    }

    std::string describe(const WireId& w) const {
        if (w.is_delay()) return "D" + delay_color[delay_index.at(w.label)];
        if (w.is_boundary())
            return (w.side == WireId::Side::input ? "zi." : "zo.") + w.label;
        return "B" + slot_color[w.slot] + (w.side == WireId::Side::input ? ".in." : ".out.") +
               w.label;
    }

    std::string describe_supplier_of(const WireId& demand) const {
        const WireId* s = wd.supplier_of(demand);
        return s ? describe(*s) : "?";
    }

    std::vector<std::string> consumers_of(const WireId& supply) const {
        std::vector<std::string> out;
        for (const auto& [dem, sup] : wd.supplier())
            if (sup == supply) out.push_back(describe(dem));
        std::sort(out.begin(), out.end());
        return out;
    }

    void run() {
        for (std::size_t round = 0; round <= slot_color.size() + delay_color.size() + 1; ++round) {
            std::vector<std::string> next_slot(slot_color.size());
            std::vector<std::string> next_delay(delay_color.size());
            for (std::size_t s = 0; s < slot_color.size(); ++s) {
                std::string acc = slot_color[s];
                const BlackBox& box = wd.interior()[s];
                for (const auto& p : box.inputs())
                    acc += "|<" + describe_supplier_of(WireId::box_in(static_cast<int>(s), p.label));
                for (const auto& p : box.outputs()) {
                    acc += "|>";
                    for (const auto& c : consumers_of(WireId::box_out(static_cast<int>(s), p.label)))
                        acc += c + ";";
                }
                next_slot[s] = hex64(fnv1a(acc));
            }
            for (std::size_t d = 0; d < delay_color.size(); ++d) {
                WireId w = WireId::delay(wd.delays()[d].label);
                std::string acc = delay_color[d] + "|<" + describe_supplier_of(w) + "|>";
                for (const auto& c : consumers_of(w)) acc += c + ";";
                next_delay[d] = hex64(fnv1a(acc));
            }
            bool same = partition(slot_color, delay_color) == partition(next_slot, next_delay);
            slot_color.swap(next_slot);
            delay_color.swap(next_delay);
            if (same) break;
        }
    }

    static std::vector<std::vector<int>> partition(const std::vector<std::string>& a,
                                                   const std::vector<std::string>& b) {
        std::map<std::string, std::vector<int>> groups;
        for (std::size_t i = 0; i < a.size(); ++i) groups[a[i]].push_back(static_cast<int>(i));
        for (std::size_t i = 0; i < b.size(); ++i)
            groups[b[i]].push_back(static_cast<int>(a.size() + i));
        std::vector<std::vector<int>> out;
        for (auto& [k, v] : groups) out.push_back(std::move(v));
        return out;
    }
};

// Orders consistent with a color partition: members of one color class may
// appear in any relative order, classes follow their color order. When the
// tie space exceeds the cap, only the stable order is returned; within the
// generator bounds used by the law suites the cap is unreachable.
std::vector<std::vector<std::size_t>> class_orders(const std::vector<std::string>& colors,
                                                   std::size_t cap) {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < colors.size(); ++i) groups[colors[i]].push_back(i);

    double total = 1;
    for (const auto& [c, members] : groups)
        for (std::size_t k = 2; k <= members.size(); ++k) total *= static_cast<double>(k);
    if (total > static_cast<double>(cap)) {
        std::vector<std::size_t> order;
        for (const auto& [c, members] : groups)
            order.insert(order.end(), members.begin(), members.end());
        return {order};
    }

    std::vector<std::vector<std::size_t>> orders{{}};
    for (const auto& [c, members] : groups) {
        std::vector<std::size_t> perm = members;  // ascending already
        std::vector<std::vector<std::size_t>> grown;
        do {
            for (const auto& prefix : orders) {
                auto next = prefix;
                next.insert(next.end(), perm.begin(), perm.end());
                grown.push_back(std::move(next));
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        orders = std::move(grown);
    }
    return orders;
}

std::string render_canonical(const WiringDiagram& wd, const std::vector<std::size_t>& slot_order,
                             const std::vector<std::size_t>& delay_order) {
    std::vector<int> slot_pos(slot_order.size());
    for (std::size_t p = 0; p < slot_order.size(); ++p) slot_pos[slot_order[p]] = static_cast<int>(p);
    std::map<std::string, int> delay_pos;
    for (std::size_t p = 0; p < delay_order.size(); ++p)
        delay_pos[wd.delays()[delay_order[p]].label] = static_cast<int>(p);

    auto wire = [&](const WireId& w) -> std::string {
        if (w.is_delay()) return "d" + std::to_string(delay_pos.at(w.label));
        if (w.is_boundary())
            return (w.side == WireId::Side::input ? "z.in." : "z.out.") + w.label;
        return "b" + std::to_string(slot_pos[w.slot]) +
               (w.side == WireId::Side::input ? ".in." : ".out.") + w.label;
    };

    std::ostringstream os;
    os << "cod " << wd.codomain().shape_fingerprint() << '\n';
    for (std::size_t p = 0; p < slot_order.size(); ++p)
        os << "box b" << p << ' ' << wd.interior()[slot_order[p]].shape_fingerprint() << '\n';
    for (std::size_t p = 0; p < delay_order.size(); ++p)
        os << "delay d" << p << ' ' << wd.delays()[delay_order[p]].domain->fingerprint() << '\n';
    std::vector<std::string> pairs;
    for (const auto& [dem, sup] : wd.supplier())
        pairs.push_back(wire(dem) + " <- " + wire(sup));
    std::sort(pairs.begin(), pairs.end());
    for (const auto& p : pairs) os << p << '\n';
    return os.str();
}

}  // namespace

CanonicalForm canonicalize(const WiringDiagram& wd) {
    Refinement ref(wd);

    auto slot_orders = class_orders(ref.slot_color, 2000);
    auto delay_orders = class_orders(ref.delay_color, 2000);

    std::string best;
    std::vector<std::size_t> best_slots, best_delays;
    for (const auto& so : slot_orders) {
        for (const auto& dor : delay_orders) {
            std::string r = render_canonical(wd, so, dor);
            if (best.empty() || r < best) {
                best = r;
                best_slots = so;
                best_delays = dor;
            }
        }
    }

    // Build the representative with path-derived names.
    std::vector<int> slot_pos(best_slots.size());
    for (std::size_t p = 0; p < best_slots.size(); ++p)
        slot_pos[best_slots[p]] = static_cast<int>(p);
    std::map<std::string, std::string> delay_ren;
    std::vector<DelayNode> delays;
    for (std::size_t p = 0; p < best_delays.size(); ++p) {
        const DelayNode& d = wd.delays()[best_delays[p]];
        delay_ren[d.label] = "d" + std::to_string(p);
        delays.push_back({"d" + std::to_string(p), d.domain});
    }
    std::vector<BlackBox> interior;
    std::vector<std::string> slot_names;
    for (std::size_t p = 0; p < best_slots.size(); ++p) {
        const BlackBox& old = wd.interior()[best_slots[p]];
        std::string nm = "b" + std::to_string(p);
        interior.emplace_back(nm, old.inputs(), old.outputs());
        slot_names.push_back(nm);
    }
    auto remap = [&](const WireId& w) -> WireId {
        if (w.is_delay()) return WireId::delay(delay_ren.at(w.label));
        if (w.is_boundary()) return w;
        return {w.side, slot_pos[w.slot], w.label};
    };
    std::map<WireId, WireId> supplier;
    for (const auto& [dem, sup] : wd.supplier()) supplier.emplace(remap(dem), remap(sup));

    CanonicalForm form{WiringDiagram(wd.codomain(), std::move(interior), std::move(delays),
                                     std::move(supplier), wd.name(), std::move(slot_names)),
                       std::move(best)};
    return form;
}

WiringDiagram permute_interior(const WiringDiagram& wd, std::span<const std::size_t> perm) {
    const std::size_t n = wd.interior().size();
    if (perm.size() != n) throw Error("permute_interior: permutation size mismatch");
    std::vector<bool> seen(n, false);
    for (std::size_t s : perm) {
        if (s >= n || seen[s]) throw Error("permute_interior: not a bijection on slots");
        seen[s] = true;
    }
    std::vector<int> pos(n);
    for (std::size_t k = 0; k < n; ++k) pos[perm[k]] = static_cast<int>(k);

    std::vector<BlackBox> interior;
    std::vector<std::string> slot_names;
    for (std::size_t k = 0; k < n; ++k) {
        interior.push_back(wd.interior()[perm[k]]);
        slot_names.push_back(wd.slot_names()[perm[k]]);
    }
    auto remap = [&](const WireId& w) -> WireId {
        if (w.is_delay() || w.is_boundary()) return w;
        return {w.side, pos[w.slot], w.label};
    };
    std::map<WireId, WireId> supplier;
    for (const auto& [dem, sup] : wd.supplier()) supplier.emplace(remap(dem), remap(sup));
    return WiringDiagram(wd.codomain(), std::move(interior), std::vector<DelayNode>(wd.delays()),
                         std::move(supplier), wd.name(), std::move(slot_names));
}

}  // namespace wd
