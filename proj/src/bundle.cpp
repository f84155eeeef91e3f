#include "wd/bundle.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace wd {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

json value_to_json(const Value& v) {
    if (v.is_star()) return "*";
    if (v.is_integer()) return v.as_integer();
    return v.as_symbol();
}

Value value_from_json(const json& j, const std::string& where) {
    if (j.is_number_integer()) return Value::integer(j.get<std::int64_t>());
    if (j.is_string()) {
        auto s = j.get<std::string>();
        return s == "*" ? Value::star() : Value::symbol(std::move(s));
    }
    throw BundleError(BundleError::Kind::parse, where,
                      "expected an integer, a symbol string, or \"*\"");
}

std::vector<Value> row_from_json(const json& j, const std::string& where) {
    if (!j.is_array()) throw BundleError(BundleError::Kind::parse, where, "expected a value row");
    std::vector<Value> row;
    for (std::size_t i = 0; i < j.size(); ++i)
        row.push_back(value_from_json(j[i], where + "[" + std::to_string(i) + "]"));
    return row;
}

DomainKind kind_from_string(const std::string& s, const std::string& where) {
    if (s == "naturals") return DomainKind::naturals;
    if (s == "integers") return DomainKind::integers;
    if (s == "finite") return DomainKind::finite;
    if (s == "unit") return DomainKind::unit;
    throw BundleError(BundleError::Kind::parse, where, "unknown domain kind '" + s + "'");
}

ordered_json domain_to_json(const ValueDomain& d) {
    ordered_json j;
    j["name"] = d.name();
    j["kind"] = domain_kind_name(d.kind());
    if (d.kind() == DomainKind::finite) j["symbols"] = d.symbols();
    if (!d.basepoint().is_star()) j["basepoint"] = value_to_json(d.basepoint());
    return j;
}

ValueDomain::Spec domain_spec_from_json(const json& j, const std::string& where) {
    ValueDomain::Spec spec;
    if (!j.is_object() || !j.contains("name") || !j.contains("kind"))
        throw BundleError(BundleError::Kind::parse, where, "domain needs 'name' and 'kind'");
    spec.name = j.at("name").get<std::string>();
    spec.kind = kind_from_string(j.at("kind").get<std::string>(), where);
    if (j.contains("symbols"))
        for (const auto& s : j.at("symbols")) spec.symbols.push_back(s.get<std::string>());
    if (j.contains("basepoint")) spec.basepoint = value_from_json(j.at("basepoint"), where);
    return spec;
}

// "delay.<label>" or "<owner>.<in|out>.<label>", anchored from the right so
// owners may themselves contain dots. Port labels may not.
WireId parse_wire_ref(const std::string& ref, const WiringDiagram& shape,
                      const std::string& codomain_name, const std::string& where) {
    std::vector<std::string> tokens;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= ref.size(); ++i) {
        if (i == ref.size() || ref[i] == '.') {
            tokens.push_back(ref.substr(start, i - start));
            start = i + 1;
        }
    }
    if (tokens.size() >= 2 && tokens[0] == "delay") {
        std::string label = ref.substr(6);
        return WireId::delay(label);
    }
    if (tokens.size() < 3)
        throw BundleError(BundleError::Kind::parse, where,
                          "wire reference '" + ref + "' is not owner.side.label or delay.label");
    const std::string& label = tokens.back();
    const std::string& side_s = tokens[tokens.size() - 2];
    if (side_s != "in" && side_s != "out")
        throw BundleError(BundleError::Kind::parse, where,
                          "wire reference '" + ref + "' has side '" + side_s + "', expected in|out");
    WireId::Side side = side_s == "in" ? WireId::Side::input : WireId::Side::output;
    std::string owner = ref.substr(0, ref.size() - label.size() - side_s.size() - 2);
    if (owner == codomain_name) return {side, WireId::kBoundary, label};
    for (std::size_t i = 0; i < shape.slot_names().size(); ++i)
        if (shape.slot_names()[i] == owner) return {side, static_cast<int>(i), label};
    throw BundleError(BundleError::Kind::unresolved, where,
                      "wire reference '" + ref + "': unknown owner '" + owner + "'");
}

std::string render_wire_ref(const WiringDiagram& wd, const WireId& w) {
    return wd.wire_name(w);  // same grammar
}

BuiltinSpec::Kind builtin_kind_from_string(const std::string& s, const std::string& where) {
    if (s == "plus") return BuiltinSpec::Kind::plus;
    if (s == "running_sum") return BuiltinSpec::Kind::running_sum;
    if (s == "constant") return BuiltinSpec::Kind::constant;
    if (s == "delay") return BuiltinSpec::Kind::delay;
    if (s == "copy") return BuiltinSpec::Kind::copy;
    if (s == "pointwise") return BuiltinSpec::Kind::pointwise;
    if (s == "table") return BuiltinSpec::Kind::table;
    throw BundleError(BundleError::Kind::parse, where, "unknown builtin kind '" + s + "'");
}

}  // namespace

const char* builtin_kind_name(BuiltinSpec::Kind k) {
    switch (k) {
        case BuiltinSpec::Kind::plus: return "plus";
        case BuiltinSpec::Kind::running_sum: return "running_sum";
        case BuiltinSpec::Kind::constant: return "constant";
        case BuiltinSpec::Kind::delay: return "delay";
        case BuiltinSpec::Kind::copy: return "copy";
        case BuiltinSpec::Kind::pointwise: return "pointwise";
        case BuiltinSpec::Kind::table: return "table";
    }
    return "?";
}

const char* bundle_error_kind_name(BundleError::Kind k) {
    switch (k) {
        case BundleError::Kind::parse: return "parse";
        case BundleError::Kind::unresolved: return "unresolved";
        case BundleError::Kind::validation: return "validation";
        case BundleError::Kind::binding: return "binding";
    }
    return "?";
}

BundleError::BundleError(Kind kind, std::string where, std::string message)
    : Error("error[" + std::string(bundle_error_kind_name(kind)) + "] " + where + ": " + message),
      kind_(kind),
      where_(std::move(where)),
      message_(std::move(message)) {}

const BlackBox* Bundle::find_box(const std::string& name) const {
    for (const auto& b : boxes)
        if (b.name() == name) return &b;
    return nullptr;
}

const WiringDiagram* Bundle::find_diagram(const std::string& name) const {
    for (const auto& d : diagrams)
        if (d.name() == name) return &d;
    return nullptr;
}

bool bundles_equal(const Bundle& a, const Bundle& b) {
    if (a.boxes.size() != b.boxes.size() || a.diagrams.size() != b.diagrams.size()) return false;
    if (a.main_diagram != b.main_diagram || a.bindings != b.bindings) return false;
    const auto& da = a.domains.all();
    const auto& db = b.domains.all();
    if (da.size() != db.size()) return false;
    for (std::size_t i = 0; i < da.size(); ++i)
        if (da[i]->name() != db[i]->name() || !da[i]->same_domain(*db[i])) return false;
    for (std::size_t i = 0; i < a.boxes.size(); ++i)
        if (!(a.boxes[i] == b.boxes[i])) return false;
    for (std::size_t i = 0; i < a.diagrams.size(); ++i)
        if (!(a.diagrams[i] == b.diagrams[i])) return false;
    return true;
}

Bundle load_bundle(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw BundleError(BundleError::Kind::parse, path.string(), "cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_bundle(ss.str(), path.string());
}

Bundle parse_bundle(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw BundleError(BundleError::Kind::parse, origin + ":" + std::to_string(e.byte),
                          e.what());
    }
    if (!root.is_object())
        throw BundleError(BundleError::Kind::parse, origin, "bundle must be a JSON object");

    Bundle bundle;

    if (root.contains("domains")) {
        const auto& arr = root.at("domains");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            std::string where = origin + ":domains[" + std::to_string(i) + "]";
            try {
                bundle.domains.define(domain_spec_from_json(arr[i], where));
            } catch (const BundleError&) {
                throw;
            } catch (const Error& e) {
                throw BundleError(BundleError::Kind::validation, where, e.what());
            }
        }
    }

    if (root.contains("boxes")) {
        const auto& arr = root.at("boxes");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            std::string where = origin + ":boxes[" + std::to_string(i) + "]";
            const auto& jb = arr[i];
            if (!jb.is_object() || !jb.contains("name"))
                throw BundleError(BundleError::Kind::parse, where, "box needs a 'name'");
            auto ports = [&](const char* key) {
                std::vector<Port> out;
                if (!jb.contains(key)) return out;
                for (const auto& jp : jb.at(key)) {
                    std::string label = jp.at("label").get<std::string>();
                    if (label.find('.') != std::string::npos)
                        throw BundleError(BundleError::Kind::parse, where,
                                          "port label '" + label + "' may not contain '.'");
                    std::string dom = jp.at("domain").get<std::string>();
                    DomainRef ref = bundle.domains.find(dom);
                    if (!ref)
                        throw BundleError(BundleError::Kind::unresolved, where,
                                          "unknown domain '" + dom + "'");
                    out.push_back({std::move(label), std::move(ref)});
                }
                return out;
            };
            std::string name = jb.at("name").get<std::string>();
            if (bundle.find_box(name))
                throw BundleError(BundleError::Kind::validation, where,
                                  "duplicate box name '" + name + "'");
            try {
                bundle.boxes.emplace_back(name, ports("inputs"), ports("outputs"));
            } catch (const BundleError&) {
                throw;
            } catch (const Error& e) {
                throw BundleError(BundleError::Kind::validation, where, e.what());
            }
        }
    }

    if (root.contains("diagrams")) {
        const auto& arr = root.at("diagrams");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const auto& jd = arr[i];
            std::string where = origin + ":diagrams[" + std::to_string(i) + "]";
            if (!jd.is_object() || !jd.contains("name") || !jd.contains("codomain"))
                throw BundleError(BundleError::Kind::parse, where,
                                  "diagram needs 'name' and 'codomain'");
            std::string name = jd.at("name").get<std::string>();
            where = origin + ":diagrams[" + name + "]";
            if (bundle.find_diagram(name))
                throw BundleError(BundleError::Kind::validation, where, "duplicate diagram name");

            std::string cod_name = jd.at("codomain").get<std::string>();
            const BlackBox* cod = bundle.find_box(cod_name);
            if (!cod)
                throw BundleError(BundleError::Kind::unresolved, where,
                                  "unknown codomain box '" + cod_name + "'");

            std::vector<BlackBox> interior;
            std::vector<std::string> aliases;
            if (jd.contains("interior")) {
                for (const auto& je : jd.at("interior")) {
                    std::string box_name, alias;
                    if (je.is_string()) {
                        box_name = alias = je.get<std::string>();
                    } else if (je.is_object() && je.contains("box")) {
                        box_name = je.at("box").get<std::string>();
                        alias = je.contains("as") ? je.at("as").get<std::string>() : box_name;
                    } else {
                        throw BundleError(BundleError::Kind::parse, where,
                                          "interior entries are 'Box' or {box, as}");
                    }
                    const BlackBox* box = bundle.find_box(box_name);
                    if (!box)
                        throw BundleError(BundleError::Kind::unresolved, where,
                                          "unknown interior box '" + box_name + "'");
                    if (alias == "delay" || alias == cod_name ||
                        std::find(aliases.begin(), aliases.end(), alias) != aliases.end())
                        throw BundleError(BundleError::Kind::validation, where,
                                          "interior alias '" + alias +
                                              "' is reserved or ambiguous; add {\"as\": ...}");
                    interior.push_back(*box);
                    aliases.push_back(alias);
                }
            }

            std::vector<DelayNode> delays;
            if (jd.contains("delays")) {
                for (const auto& je : jd.at("delays")) {
                    std::string label = je.at("label").get<std::string>();
                    std::string dom = je.at("domain").get<std::string>();
                    DomainRef ref = bundle.domains.find(dom);
                    if (!ref)
                        throw BundleError(BundleError::Kind::unresolved, where,
                                          "unknown domain '" + dom + "' on delay '" + label + "'");
                    delays.push_back({std::move(label), std::move(ref)});
                }
            }

            WiringDiagram shape(*cod, interior, delays, {}, name, aliases);
            std::map<WireId, WireId> supplier;
            if (jd.contains("supplier")) {
                for (const auto& [dem_s, sup_j] : jd.at("supplier").items()) {
                    std::string w = where + ".supplier['" + dem_s + "']";
                    WireId dem = parse_wire_ref(dem_s, shape, cod_name, w);
                    WireId sup = parse_wire_ref(sup_j.get<std::string>(), shape, cod_name, w);
                    if (!supplier.emplace(dem, sup).second)
                        throw BundleError(BundleError::Kind::validation, w,
                                          "demand wired twice");
                }
            }
            WiringDiagram diagram(*cod, std::move(interior), std::move(delays),
                                  std::move(supplier), name, std::move(aliases));
            ValidationReport report = validate_diagram(diagram);
            if (!report.ok())
                throw BundleError(BundleError::Kind::validation, where, report.summary());
            bundle.diagrams.push_back(std::move(diagram));
        }
    }

    if (root.contains("bindings")) {
        for (const auto& [diagram_name, slots] : root.at("bindings").items()) {
            std::string where = origin + ":bindings[" + diagram_name + "]";
            const WiringDiagram* diagram = bundle.find_diagram(diagram_name);
            if (!diagram)
                throw BundleError(BundleError::Kind::unresolved, where, "unknown diagram");
            for (const auto& [slot, jspec] : slots.items()) {
                std::string w = where + "." + slot;
                auto it = std::find(diagram->slot_names().begin(), diagram->slot_names().end(),
                                    slot);
                if (it == diagram->slot_names().end())
                    throw BundleError(BundleError::Kind::unresolved, w,
                                      "diagram has no interior slot '" + slot + "'");
                std::size_t idx = it - diagram->slot_names().begin();

                BuiltinSpec spec;
                if (!jspec.is_object() || !jspec.contains("kind"))
                    throw BundleError(BundleError::Kind::parse, w, "binding needs a 'kind'");
                spec.kind = builtin_kind_from_string(jspec.at("kind").get<std::string>(), w);
                if (jspec.contains("n")) spec.delay_steps = jspec.at("n").get<int>();
                if (jspec.contains("op")) spec.op = jspec.at("op").get<std::string>();
                if (jspec.contains("init")) spec.init = row_from_json(jspec.at("init"), w);
                if (jspec.contains("value")) spec.value = row_from_json(jspec.at("value"), w);
                if (jspec.contains("map")) {
                    for (const auto& je : jspec.at("map"))
                        spec.table.emplace_back(row_from_json(je.at("in"), w),
                                                row_from_json(je.at("out"), w));
                }
                make_builtin(spec, diagram->interior()[idx], w);  // type-check now
                bundle.bindings[diagram_name][slot] = std::move(spec);
            }
        }
    }

    if (root.contains("main")) {
        bundle.main_diagram = root.at("main").get<std::string>();
        if (!bundle.find_diagram(bundle.main_diagram))
            throw BundleError(BundleError::Kind::unresolved, origin + ":main",
                              "unknown diagram '" + bundle.main_diagram + "'");
    }

    return bundle;
}

std::string write_bundle(const Bundle& b) {
    ordered_json root;
    if (!b.main_diagram.empty()) root["main"] = b.main_diagram;
    root["domains"] = ordered_json::array();
    for (const auto& d : b.domains.all()) root["domains"].push_back(domain_to_json(*d));
    root["boxes"] = ordered_json::array();
    for (const auto& box : b.boxes) {
        ordered_json jb;
        jb["name"] = box.name();
        jb["inputs"] = ordered_json::array();
        for (const auto& p : box.inputs())
            jb["inputs"].push_back({{"label", p.label}, {"domain", p.domain->name()}});
        jb["outputs"] = ordered_json::array();
        for (const auto& p : box.outputs())
            jb["outputs"].push_back({{"label", p.label}, {"domain", p.domain->name()}});
        root["boxes"].push_back(std::move(jb));
    }
    root["diagrams"] = ordered_json::array();
    for (const auto& wd : b.diagrams) {
        ordered_json jd;
        jd["name"] = wd.name();
        jd["codomain"] = wd.codomain().name();
        jd["interior"] = ordered_json::array();
        for (std::size_t i = 0; i < wd.interior().size(); ++i) {
            if (wd.slot_names()[i] == wd.interior()[i].name())
                jd["interior"].push_back(wd.interior()[i].name());
            else
                jd["interior"].push_back(
                    {{"box", wd.interior()[i].name()}, {"as", wd.slot_names()[i]}});
        }
        jd["delays"] = ordered_json::array();
        for (const auto& d : wd.delays())
            jd["delays"].push_back({{"label", d.label}, {"domain", d.domain->name()}});
        ordered_json sup = ordered_json::object();
        for (const auto& [dem, s] : wd.supplier())
            sup[render_wire_ref(wd, dem)] = render_wire_ref(wd, s);
        jd["supplier"] = std::move(sup);
        root["diagrams"].push_back(std::move(jd));
    }
    if (!b.bindings.empty()) {
        ordered_json jb = ordered_json::object();
        for (const auto& [diagram, slots] : b.bindings) {
            ordered_json js = ordered_json::object();
            for (const auto& [slot, spec] : slots) {
                ordered_json j;
                j["kind"] = builtin_kind_name(spec.kind);
                if (spec.kind == BuiltinSpec::Kind::delay) j["n"] = spec.delay_steps;
                if (!spec.op.empty()) j["op"] = spec.op;
                if (!spec.init.empty()) {
                    ordered_json row = ordered_json::array();
                    for (const auto& v : spec.init) row.push_back(value_to_json(v));
                    j["init"] = std::move(row);
                }
                if (!spec.value.empty()) {
                    ordered_json row = ordered_json::array();
                    for (const auto& v : spec.value) row.push_back(value_to_json(v));
                    j["value"] = std::move(row);
                }
                if (!spec.table.empty()) {
                    ordered_json rows = ordered_json::array();
                    for (const auto& [in, out] : spec.table) {
                        ordered_json in_row = ordered_json::array(), out_row = ordered_json::array();
                        for (const auto& v : in) in_row.push_back(value_to_json(v));
                        for (const auto& v : out) out_row.push_back(value_to_json(v));
                        rows.push_back({{"in", std::move(in_row)}, {"out", std::move(out_row)}});
                    }
                    j["map"] = std::move(rows);
                }
                js[slot] = std::move(j);
            }
            jb[diagram] = std::move(js);
        }
        root["bindings"] = std::move(jb);
    }
    return root.dump(2) + "\n";
}

namespace {

bool numeric_kind(const DomainRef& d) {
    return d->kind() == DomainKind::naturals || d->kind() == DomainKind::integers;
}

void require(bool cond, const std::string& where, const std::string& msg) {
    if (!cond) throw BundleError(BundleError::Kind::binding, where, msg);
}

std::vector<Value> checked_row(const std::vector<Value>& row, const std::vector<Port>& ports,
                               const std::string& where, const char* what) {
    require(row.size() == ports.size(), where,
            std::string(what) + " row has " + std::to_string(row.size()) + " values for " +
                std::to_string(ports.size()) + " wires");
    for (std::size_t i = 0; i < row.size(); ++i)
        require(ports[i].domain->contains(row[i]), where,
                std::string(what) + " value " + row[i].str() + " is not in domain '" +
                    ports[i].domain->name() + "'");
    return row;
}

std::vector<Value> default_init(const std::vector<Port>& outputs) {
    std::vector<Value> row;
    for (const auto& p : outputs) row.push_back(p.domain->basepoint());
    return row;
}

std::int64_t fold_op(const std::string& op, std::span<const Value> in, const std::string& where) {
    std::int64_t acc = in[0].as_integer();
    for (std::size_t i = 1; i < in.size(); ++i) {
        std::int64_t v = in[i].as_integer();
        if (op == "add") acc += v;
        else if (op == "mul") acc *= v;
        else if (op == "min") acc = std::min(acc, v);
        else if (op == "max") acc = std::max(acc, v);
        else throw BundleError(BundleError::Kind::binding, where, "unknown op '" + op + "'");
    }
    return acc;
}

}  // namespace

Propagator make_builtin(const BuiltinSpec& spec, const BlackBox& box, const std::string& where) {
    std::vector<Coord> ins, outs;
    for (const auto& p : box.inputs()) ins.push_back({p.label, p.domain});
    for (const auto& p : box.outputs()) outs.push_back({p.label, p.domain});

    auto arithmetic_box = [&]() {
        require(!box.inputs().empty(), where, "needs at least one input wire");
        require(box.outputs().size() == 1, where, "needs exactly one output wire");
        for (const auto& p : box.inputs()) {
            require(numeric_kind(p.domain), where,
                    "input '" + p.label + "' must carry a numeric domain");
            require(!p.domain->star_adjoined(), where,
                    "input '" + p.label + "' carries the adjoined '*', arithmetic is undefined");
        }
        require(numeric_kind(box.outputs()[0].domain), where, "output must be numeric");
    };

    switch (spec.kind) {
        case BuiltinSpec::Kind::plus:
        case BuiltinSpec::Kind::pointwise: {
            arithmetic_box();
            std::string op = spec.kind == BuiltinSpec::Kind::plus ? "add" : spec.op;
            require(op == "add" || op == "mul" || op == "min" || op == "max", where,
                    "unknown op '" + op + "'");
            std::vector<Value> init = spec.init.empty() ? default_init(box.outputs()) : spec.init;
            checked_row(init, box.outputs(), where, "init");
            DomainRef out_dom = box.outputs()[0].domain;
            Propagator::MooreBody m;
            m.init_output = init;
            m.step = [op, out_dom, where](std::span<const Value> in, std::span<const Value>) {
                Value v = Value::integer(fold_op(op, in, where));
                if (!out_dom->contains(v))
                    throw Error("builtin '" + op + "' produced " + v.str() +
                                ", outside domain '" + out_dom->name() + "'");
                return Propagator::MooreStep{{v}, {}};
            };
            return moore_propagator(std::move(ins), std::move(outs), std::move(m));
        }
        case BuiltinSpec::Kind::running_sum: {
            arithmetic_box();
            require(box.inputs().size() == 1, where, "running_sum takes exactly one input wire");
            std::vector<Value> init = spec.init.empty() ? default_init(box.outputs()) : spec.init;
            checked_row(init, box.outputs(), where, "init");
            DomainRef out_dom = box.outputs()[0].domain;
            Propagator::MooreBody m;
            m.init_output = init;
            m.init_state = {init[0]};
            m.step = [out_dom](std::span<const Value> in, std::span<const Value> state) {
                Value v = Value::integer(state[0].as_integer() + in[0].as_integer());
                if (!out_dom->contains(v))
                    throw Error("running_sum produced " + v.str() + ", outside domain '" +
                                out_dom->name() + "'");
                return Propagator::MooreStep{{v}, {v}};
            };
            return moore_propagator(std::move(ins), std::move(outs), std::move(m));
        }
        case BuiltinSpec::Kind::constant: {
            require(!spec.value.empty() || box.outputs().empty(), where,
                    "constant needs a 'value' row");
            std::vector<Value> value = checked_row(spec.value, box.outputs(), where, "value");
            Propagator::MooreBody m;
            m.init_output = value;
            m.step = [value](std::span<const Value>, std::span<const Value>) {
                return Propagator::MooreStep{value, {}};
            };
            return moore_propagator(std::move(ins), std::move(outs), std::move(m));
        }
        case BuiltinSpec::Kind::delay: {
            require(spec.delay_steps == 1, where,
                    "delay(n): a box filler must be 1-historical, so only n=1 binds");
            require(box.inputs().size() == box.outputs().size(), where,
                    "delay needs matching input/output arity");
            for (std::size_t i = 0; i < box.inputs().size(); ++i)
                require(same_domain(box.inputs()[i].domain, box.outputs()[i].domain), where,
                        "delay wire " + std::to_string(i) + " changes domain");
            // delta^1 with the output's labels.
            Propagator d = delay_propagator(1, ins);
            Propagator::MooreBody m = d.moore();
            return moore_propagator(std::move(ins), std::move(outs), std::move(m));
        }
        case BuiltinSpec::Kind::copy: {
            require(box.inputs().size() == 1, where, "copy takes exactly one input wire");
            for (const auto& p : box.outputs())
                require(same_domain(p.domain, box.inputs()[0].domain), where,
                        "copy output '" + p.label + "' changes domain");
            std::vector<Value> init = spec.init.empty() ? default_init(box.outputs()) : spec.init;
            checked_row(init, box.outputs(), where, "init");
            std::size_t n_out = box.outputs().size();
            Propagator::MooreBody m;
            m.init_output = init;
            m.step = [n_out](std::span<const Value> in, std::span<const Value>) {
                return Propagator::MooreStep{std::vector<Value>(n_out, in[0]), {}};
            };
            return moore_propagator(std::move(ins), std::move(outs), std::move(m));
        }
        case BuiltinSpec::Kind::table: {
            std::vector<Value> init = spec.init.empty() ? default_init(box.outputs()) : spec.init;
            checked_row(init, box.outputs(), where, "init");
            for (const auto& [in_row, out_row] : spec.table) {
                checked_row(in_row, box.inputs(), where, "table input");
                checked_row(out_row, box.outputs(), where, "table output");
            }
            auto table = spec.table;
            Propagator::MooreBody m;
            m.init_output = init;
            m.step = [table](std::span<const Value> in, std::span<const Value>) {
                for (const auto& [in_row, out_row] : table) {
                    if (std::equal(in.begin(), in.end(), in_row.begin(), in_row.end()))
                        return Propagator::MooreStep{out_row, {}};
                }
                std::string got;
                for (const auto& v : in) got += (got.empty() ? "" : ",") + v.str();
                throw Error("table builtin has no entry for (" + got + ")");
            };
            return moore_propagator(std::move(ins), std::move(outs), std::move(m));
        }
    }
    throw BundleError(BundleError::Kind::binding, where, "unhandled builtin kind");
}

Filling make_filling(const Bundle& b, const std::string& diagram_name) {
    const WiringDiagram* wd = b.find_diagram(diagram_name);
    if (!wd)
        throw BundleError(BundleError::Kind::unresolved, diagram_name, "unknown diagram");
    auto bit = b.bindings.find(diagram_name);
    Filling f{*wd, {}};
    for (std::size_t i = 0; i < wd->interior().size(); ++i) {
        const std::string& slot = wd->slot_names()[i];
        if (bit == b.bindings.end() || !bit->second.count(slot))
            throw BundleError(BundleError::Kind::binding, diagram_name + "." + slot,
                              "interior slot has no bound propagator");
        f.fillers.push_back(
            make_builtin(bit->second.at(slot), wd->interior()[i], diagram_name + "." + slot));
    }
    return f;
}

std::string emit_trace(const TraceBundle& tb, TraceFormat format) {
    if (format == TraceFormat::table) {
        std::ostringstream os;
        os << "step\twire\trole\tvalue\n";
        for (std::size_t t = 0; t < tb.steps(); ++t) {
            for (std::size_t i = 0; i < tb.supply_coords().size(); ++i)
                os << (t + 1) << '\t' << tb.supply_coords()[i].label << "\tsupply\t"
                   << tb.supply_rows()[t][i].str() << '\n';
            for (std::size_t j = 0; j < tb.demand_coords().size(); ++j)
                os << (t + 1) << '\t' << tb.demand_coords()[j].label << "\tdemand\t"
                   << tb.supply_rows()[t][tb.demand_source()[j]].str() << '\n';
        }
        return os.str();
    }

    ordered_json root;
    root["diagram"] = tb.diagram();
    root["steps"] = tb.steps();
    // Domains referenced by coordinates, once each by name.
    std::map<std::string, DomainRef> doms;
    auto collect = [&](const std::vector<Coord>& coords) {
        for (const auto& c : coords) {
            auto [it, fresh] = doms.emplace(c.domain->name(), c.domain);
            if (!fresh && !it->second->same_domain(*c.domain))
                throw Error("trace references two distinct domains named '" + c.domain->name() +
                            "'");
        }
    };
    collect(tb.supply_coords());
    collect(tb.demand_coords());
    collect(tb.output().coords());
    root["domains"] = ordered_json::array();
    for (const auto& [name, d] : doms) root["domains"].push_back(domain_to_json(*d));

    auto coords_json = [](const std::vector<Coord>& coords) {
        ordered_json arr = ordered_json::array();
        for (const auto& c : coords)
            arr.push_back({{"label", c.label}, {"domain", c.domain->name()}});
        return arr;
    };
    auto rows_json = [](const std::vector<std::vector<Value>>& rows) {
        ordered_json arr = ordered_json::array();
        for (const auto& r : rows) {
            ordered_json row = ordered_json::array();
            for (const auto& v : r) row.push_back(value_to_json(v));
            arr.push_back(std::move(row));
        }
        return arr;
    };
    root["supply"] = {{"coords", coords_json(tb.supply_coords())},
                      {"rows", rows_json(tb.supply_rows())}};
    root["demand"] = {{"coords", coords_json(tb.demand_coords())},
                      {"source", tb.demand_source()}};
    root["output"] = {{"coords", coords_json(tb.output().coords())},
                      {"rows", rows_json(tb.output().rows())}};
    return root.dump(2) + "\n";
}

TraceBundle parse_trace_json(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw BundleError(BundleError::Kind::parse, "trace:" + std::to_string(e.byte), e.what());
    }
    DomainRegistry registry;
    for (const auto& jd : root.at("domains"))
        registry.define(domain_spec_from_json(jd, "trace.domains"));

    auto coords_from = [&](const json& arr) {
        std::vector<Coord> out;
        for (const auto& jc : arr)
            out.push_back({jc.at("label").get<std::string>(),
                           registry.get(jc.at("domain").get<std::string>())});
        return out;
    };
    auto rows_from = [&](const json& arr) {
        std::vector<std::vector<Value>> out;
        for (const auto& jr : arr) out.push_back(row_from_json(jr, "trace.rows"));
        return out;
    };

    std::vector<Coord> supply_coords = coords_from(root.at("supply").at("coords"));
    std::vector<Coord> demand_coords = coords_from(root.at("demand").at("coords"));
    std::vector<std::size_t> source = root.at("demand").at("source").get<std::vector<std::size_t>>();
    std::vector<std::vector<Value>> supply_rows = rows_from(root.at("supply").at("rows"));
    TupleList output(coords_from(root.at("output").at("coords")),
                     rows_from(root.at("output").at("rows")));
    return TraceBundle(root.at("diagram").get<std::string>(), std::move(supply_coords),
                       std::move(demand_coords), std::move(source), std::move(supply_rows),
                       std::move(output));
}

}  // namespace wd
