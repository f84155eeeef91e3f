#pragma once

#include <filesystem>

#include "wd/algebra.hpp"

namespace wd {

// Parameters for a builtin propagator bound to an interior slot. All
// builtins are Moore machines, so bound diagrams can be stepped
// incrementally.
struct BuiltinSpec {
    enum class Kind { plus, running_sum, constant, delay, copy, pointwise, table };
    Kind kind = Kind::plus;
    int delay_steps = 1;                // delay
    std::string op;                     // pointwise: add | mul | min | max
    std::vector<Value> init;            // initial output row, where applicable
    std::vector<Value> value;           // constant row
    std::vector<std::pair<std::vector<Value>, std::vector<Value>>> table;

    friend bool operator==(const BuiltinSpec&, const BuiltinSpec&) = default;
};

const char* builtin_kind_name(BuiltinSpec::Kind k);

// Machine-readable load/bind failure: what went wrong, and where in the file.
class BundleError : public Error {
public:
    enum class Kind { parse, unresolved, validation, binding };

    BundleError(Kind kind, std::string where, std::string message);
    Kind kind() const { return kind_; }
    const std::string& where() const { return where_; }
    const std::string& message() const { return message_; }

private:
    Kind kind_;
    std::string where_;
    std::string message_;
};

const char* bundle_error_kind_name(BundleError::Kind k);

struct Bundle {
    DomainRegistry domains;
    std::vector<BlackBox> boxes;
    std::vector<WiringDiagram> diagrams;
    // diagram name -> slot alias -> builtin
    std::map<std::string, std::map<std::string, BuiltinSpec>> bindings;
    std::string main_diagram;  // default diagram for run/trace; may be empty

    const BlackBox* find_box(const std::string& name) const;
    const WiringDiagram* find_diagram(const std::string& name) const;
};

bool bundles_equal(const Bundle& a, const Bundle& b);

// Parses, resolves every reference, and validates every diagram and binding;
// throws BundleError with a file location on the first failure.
Bundle load_bundle(const std::filesystem::path& path);
Bundle parse_bundle(const std::string& text, const std::string& origin = "<memory>");
std::string write_bundle(const Bundle& b);

// Type-checks the builtin against the box and constructs the propagator.
Propagator make_builtin(const BuiltinSpec& spec, const BlackBox& box, const std::string& where);

// Installs the bound builtins of the named diagram; every slot must be bound.
Filling make_filling(const Bundle& b, const std::string& diagram_name);

enum class TraceFormat { table, json };

// Deterministic rendering: the table form lists one row per step per wire
// (step, wire, role, value); the json form is lossless and re-readable.
std::string emit_trace(const TraceBundle& tb, TraceFormat format);
TraceBundle parse_trace_json(const std::string& text);

}  // namespace wd
