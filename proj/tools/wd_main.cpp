#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wd/bundle.hpp"
#include "wd/generate.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidationFailure = 1;
constexpr int kUsageError = 2;

// Picks --diagram, the bundle's main entry, or the single diagram.
const wd::WiringDiagram& select_diagram(const wd::Bundle& bundle, const std::string& requested) {
    std::string name = requested;
    if (name.empty()) name = bundle.main_diagram;
    if (name.empty() && bundle.diagrams.size() == 1) name = bundle.diagrams.front().name();
    if (name.empty())
        throw wd::BundleError(wd::BundleError::Kind::unresolved, "--diagram",
                              "bundle has no 'main' entry; pass --diagram");
    const wd::WiringDiagram* wd_ptr = bundle.find_diagram(name);
    if (!wd_ptr)
        throw wd::BundleError(wd::BundleError::Kind::unresolved, "--diagram",
                              "unknown diagram '" + name + "'");
    return *wd_ptr;
}

wd::TupleList read_input_rows(const wd::WiringDiagram& diagram, const std::string& input_path,
                              int steps) {
    std::vector<wd::Coord> coords;
    for (const auto& p : diagram.codomain().inputs()) coords.push_back({p.label, p.domain});
    wd::TupleList rows(coords);

    if (input_path.empty()) {
        if (!coords.empty())
            throw wd::BundleError(wd::BundleError::Kind::unresolved, "--input",
                                  "diagram '" + diagram.name() +
                                      "' has exterior inputs; provide an input file");
        if (steps < 0)
            throw wd::Error("pass --steps to choose how many ticks to run");
        for (int t = 0; t < steps; ++t) rows.push_row({});
        return rows;
    }

    std::ifstream in(input_path);
    if (!in)
        throw wd::BundleError(wd::BundleError::Kind::parse, input_path, "cannot open file");
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw wd::BundleError(wd::BundleError::Kind::parse, input_path + ":" +
                                  std::to_string(e.byte), e.what());
    }
    if (!root.is_array())
        throw wd::BundleError(wd::BundleError::Kind::parse, input_path,
                              "input must be an array of per-step rows");
    for (std::size_t t = 0; t < root.size(); ++t) {
        std::vector<wd::Value> row;
        for (const auto& c : coords) {
            if (!root[t].contains(c.label))
                throw wd::BundleError(wd::BundleError::Kind::parse,
                                      input_path + ":row " + std::to_string(t),
                                      "missing value for input '" + c.label + "'");
            const auto& jv = root[t].at(c.label);
            if (jv.is_number_integer())
                row.push_back(wd::Value::integer(jv.get<std::int64_t>()));
            else if (jv.is_string() && jv.get<std::string>() == "*")
                row.push_back(wd::Value::star());
            else if (jv.is_string())
                row.push_back(wd::Value::symbol(jv.get<std::string>()));
            else
                throw wd::BundleError(wd::BundleError::Kind::parse,
                                      input_path + ":row " + std::to_string(t),
                                      "value for '" + c.label + "' must be a number or string");
        }
        rows.push_row(std::move(row));
    }
    if (steps >= 0 && static_cast<std::size_t>(steps) != rows.length())
        throw wd::Error("--steps " + std::to_string(steps) + " disagrees with " +
                        std::to_string(rows.length()) + " input rows");
    return rows;
}

std::string format_output(const wd::TupleList& out) {
    std::ostringstream os;
    for (std::size_t c = 0; c < out.coords().size(); ++c) {
        os << out.coords()[c].label << " = [";
        for (std::size_t t = 0; t < out.length(); ++t) {
            if (t) os << ", ";
            os << out.at(t, c).str();
        }
        os << "]\n";
    }
    return os.str();
}

int cmd_validate(const std::string& bundle_path) {
    wd::Bundle bundle = wd::load_bundle(bundle_path);  // throws on any violation
    std::cout << "ok: " << bundle.diagrams.size() << " diagram(s), " << bundle.boxes.size()
              << " box(es), " << bundle.domains.all().size() << " domain(s)\n";
    return kOk;
}

int cmd_compose(const std::string& bundle_path, const std::string& outer,
                const std::vector<std::string>& inner, const std::string& out_path,
                std::string name) {
    wd::Bundle bundle = wd::load_bundle(bundle_path);
    const wd::WiringDiagram* outer_wd = bundle.find_diagram(outer);
    if (!outer_wd)
        throw wd::BundleError(wd::BundleError::Kind::unresolved, "--outer",
                              "unknown diagram '" + outer + "'");
    if (inner.size() != outer_wd->interior().size())
        throw wd::Error("--inner needs " + std::to_string(outer_wd->interior().size()) +
                        " entries for '" + outer + "'");

    wd::CompositionPlan plan{*outer_wd, {}};
    for (const auto& n : inner) {
        if (n == "keep") {
            plan.inner.emplace_back(std::nullopt);
            continue;
        }
        const wd::WiringDiagram* inner_wd = bundle.find_diagram(n);
        if (!inner_wd)
            throw wd::BundleError(wd::BundleError::Kind::unresolved, "--inner",
                                  "unknown diagram '" + n + "'");
        plan.inner.emplace_back(*inner_wd);
    }
    if (name.empty()) name = "composed";
    wd::WiringDiagram composed = wd::compose_diagrams(plan);
    composed = wd::WiringDiagram(composed.codomain(), composed.interior(), composed.delays(),
                                 composed.supplier(), name, composed.slot_names());

    // Carry bindings down: inner slots keep theirs, kept slots keep the
    // outer's.
    wd::Bundle out;
    out.domains = bundle.domains;
    out.boxes = bundle.boxes;
    out.main_diagram = name;
    std::map<std::string, wd::BuiltinSpec> slot_bindings;
    std::size_t global = 0;
    for (std::size_t i = 0; i < inner.size(); ++i) {
        std::string source = inner[i] == "keep" ? outer : inner[i];
        const wd::WiringDiagram& inner_wd =
            inner[i] == "keep" ? *outer_wd : *bundle.find_diagram(inner[i]);
        std::size_t slots = inner[i] == "keep" ? 1 : inner_wd.interior().size();
        for (std::size_t j = 0; j < slots; ++j, ++global) {
            std::string source_slot =
                inner[i] == "keep" ? outer_wd->slot_names()[i] : inner_wd.slot_names()[j];
            auto bit = bundle.bindings.find(source);
            if (bit != bundle.bindings.end() && bit->second.count(source_slot))
                slot_bindings[composed.slot_names()[global]] = bit->second.at(source_slot);
        }
    }
    out.diagrams.push_back(composed);
    if (!slot_bindings.empty()) out.bindings[name] = std::move(slot_bindings);

    std::string text = wd::write_bundle(out);
    if (out_path == "-") {
        std::cout << text;
    } else {
        std::ofstream f(out_path);
        if (!f) throw wd::Error("cannot write '" + out_path + "'");
        f << text;
        std::cout << "wrote " << out_path << " (diagram '" << name << "')\n";
    }
    return kOk;
}

int cmd_run(const std::string& bundle_path, const std::string& diagram_name, int steps,
            const std::string& input_path) {
    wd::Bundle bundle = wd::load_bundle(bundle_path);
    const wd::WiringDiagram& diagram = select_diagram(bundle, diagram_name);
    wd::Filling filling = wd::make_filling(bundle, diagram.name());
    wd::TupleList inputs = read_input_rows(diagram, input_path, steps);
    wd::TupleList out = wd::evaluate_diagram(filling, inputs);
    std::cout << format_output(out);
    return kOk;
}

int cmd_trace(const std::string& bundle_path, const std::string& diagram_name, int steps,
              const std::string& input_path, const std::string& format) {
    wd::Bundle bundle = wd::load_bundle(bundle_path);
    const wd::WiringDiagram& diagram = select_diagram(bundle, diagram_name);
    wd::Filling filling = wd::make_filling(bundle, diagram.name());
    wd::TupleList inputs = read_input_rows(diagram, input_path, steps);
    wd::TraceBundle tb = wd::trace(filling, inputs);
    std::cout << wd::emit_trace(tb, format == "json" ? wd::TraceFormat::json
                                                     : wd::TraceFormat::table);
    return kOk;
}

int cmd_laws(std::uint64_t seed, std::size_t cases) {
    wd::SuiteResult operad = wd::run_operad_law_suite(seed, cases);
    wd::SuiteResult algebra = wd::run_algebra_law_suite(seed, cases);
    std::cout << "operad laws (seed " << seed << ", " << operad.cases << " cases):\n"
              << operad.summary();
    std::cout << "algebra laws (seed " << seed << ", " << algebra.cases << " cases):\n"
              << algebra.summary();
    for (const auto& f : operad.failures) std::cout << "  " << f << '\n';
    for (const auto& f : algebra.failures) std::cout << "  " << f << '\n';
    return operad.ok() && algebra.ok() ? kOk : kValidationFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"validate, flatten, and execute temporal wiring diagrams"};
    app.require_subcommand(1);

    std::string bundle_path, diagram, input_path, out_path, name, format = "table";
    std::string outer;
    std::vector<std::string> inner;
    int steps = -1;
    std::uint64_t seed = 1;
    std::size_t cases = 200;

    auto* validate = app.add_subcommand("validate", "load a bundle and report violations");
    validate->add_option("bundle", bundle_path, "bundle file")->required();

    auto* compose = app.add_subcommand("compose", "substitute diagrams into an outer diagram");
    compose->add_option("bundle", bundle_path)->required();
    compose->add_option("--outer", outer, "outer diagram name")->required();
    compose->add_option("--inner", inner, "inner diagram per slot, or 'keep'")->required();
    compose->add_option("--out", out_path, "output bundle file, '-' for stdout")->required();
    compose->add_option("--name", name, "name for the composed diagram");

    auto* run = app.add_subcommand("run", "evaluate a bound diagram");
    run->add_option("bundle", bundle_path)->required();
    run->add_option("--diagram", diagram, "diagram name (default: bundle main)");
    run->add_option("--steps", steps, "number of ticks");
    run->add_option("--input", input_path, "per-step input rows (json)");

    auto* trace_cmd = app.add_subcommand("trace", "emit the per-step supply/demand table");
    trace_cmd->add_option("bundle", bundle_path)->required();
    trace_cmd->add_option("--diagram", diagram);
    trace_cmd->add_option("--steps", steps);
    trace_cmd->add_option("--input", input_path);
    trace_cmd->add_option("--format", format)->check(CLI::IsMember({"table", "json"}));

    auto* laws = app.add_subcommand("laws", "run the operad/algebra law suites");
    laws->add_option("--seed", seed);
    laws->add_option("--cases", cases);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsageError;
    }

    try {
        if (validate->parsed()) return cmd_validate(bundle_path);
        if (compose->parsed()) return cmd_compose(bundle_path, outer, inner, out_path, name);
        if (run->parsed()) return cmd_run(bundle_path, diagram, steps, input_path);
        if (trace_cmd->parsed()) return cmd_trace(bundle_path, diagram, steps, input_path, format);
        if (laws->parsed()) return cmd_laws(seed, cases);
    } catch (const wd::BundleError& e) {
        std::cerr << e.what() << '\n';
        return e.kind() == wd::BundleError::Kind::parse ? kUsageError : kValidationFailure;
    } catch (const wd::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    }
    return kUsageError;
}
