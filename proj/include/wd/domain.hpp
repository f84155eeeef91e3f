#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace wd {

// Base error type for caller mistakes. Structural problems found while
// validating a diagram are reported as data, not thrown (see wiring.hpp).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A value carried on a wire: the adjoined default `*`, an integer, or a
// finite-domain symbol.
class Value {
public:
    Value() : v_(std::monostate{}) {}

    static Value star() { return Value(); }
    static Value integer(std::int64_t n) { return Value(Rep(n)); }
    static Value symbol(std::string s) { return Value(Rep(std::move(s))); }

    bool is_star() const { return std::holds_alternative<std::monostate>(v_); }
    bool is_integer() const { return std::holds_alternative<std::int64_t>(v_); }
    bool is_symbol() const { return std::holds_alternative<std::string>(v_); }

    std::int64_t as_integer() const;
    const std::string& as_symbol() const;

    // "*", "42", "-3", "a"
    std::string str() const;

    friend bool operator==(const Value&, const Value&) = default;
    friend auto operator<=>(const Value&, const Value&) = default;

private:
    using Rep = std::variant<std::monostate, std::int64_t, std::string>;
    explicit Value(Rep v) : v_(std::move(v)) {}
    Rep v_;
};

enum class DomainKind { naturals, integers, finite, unit };

const char* domain_kind_name(DomainKind k);

// A pointed set of carriable values. When no explicit basepoint is declared
// the free basepoint `*` is adjoined and becomes a member of the domain.
class ValueDomain {
public:
    struct Spec {
        std::string name;
        DomainKind kind = DomainKind::unit;
        std::vector<std::string> symbols;   // finite kind only
        std::optional<Value> basepoint;     // absent => adjoined `*`
    };

    static ValueDomain make(const Spec& spec);

    const std::string& name() const { return name_; }
    DomainKind kind() const { return kind_; }
    const std::vector<std::string>& symbols() const { return symbols_; }
    const Value& basepoint() const { return basepoint_; }
    // true when the basepoint is the freely adjoined `*`
    bool star_adjoined() const { return basepoint_.is_star() && kind_ != DomainKind::unit; }

    bool contains(const Value& v) const;

    // Structural identity; names are labels, not semantics.
    bool same_domain(const ValueDomain& other) const;
    // Deterministic structural key used by canonical forms.
    std::string fingerprint() const;

    // Finite member list (finite and unit kinds only).
    std::vector<Value> members() const;
    bool enumerable() const { return kind_ == DomainKind::finite || kind_ == DomainKind::unit; }

private:
    std::string name_;
    DomainKind kind_;
    std::vector<std::string> symbols_;
    Value basepoint_;
};

using DomainRef = std::shared_ptr<const ValueDomain>;

bool same_domain(const DomainRef& a, const DomainRef& b);

// Named registry backing a bundle; rejects duplicate names.
class DomainRegistry {
public:
    DomainRef define(const ValueDomain::Spec& spec);
    DomainRef get(const std::string& name) const;          // throws on unknown
    DomainRef find(const std::string& name) const;          // nullptr on unknown
    const std::vector<DomainRef>& all() const { return order_; }

private:
    std::map<std::string, DomainRef> by_name_;
    std::vector<DomainRef> order_;
};

inline DomainRef make_value_domain(DomainRegistry& reg, const ValueDomain::Spec& spec) {
    return reg.define(spec);
}

}  // namespace wd
