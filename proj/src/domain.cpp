#include "wd/domain.hpp"

#include <algorithm>
#include <set>

namespace wd {

std::int64_t Value::as_integer() const {
    if (!is_integer()) throw Error("value is not an integer: " + str());
    return std::get<std::int64_t>(v_);
}

const std::string& Value::as_symbol() const {
    if (!is_symbol()) throw Error("value is not a symbol: " + str());
    return std::get<std::string>(v_);
}

std::string Value::str() const {
    if (is_star()) return "*";
    if (is_integer()) return std::to_string(std::get<std::int64_t>(v_));
    return std::get<std::string>(v_);
}

const char* domain_kind_name(DomainKind k) {
    switch (k) {
        case DomainKind::naturals: return "naturals";
        case DomainKind::integers: return "integers";
        case DomainKind::finite: return "finite";
        case DomainKind::unit: return "unit";
    }
    return "?";
}

ValueDomain ValueDomain::make(const Spec& spec) {
    ValueDomain d;
    d.name_ = spec.name;
    d.kind_ = spec.kind;
    d.symbols_ = spec.symbols;

    if (spec.kind != DomainKind::finite && !spec.symbols.empty())
        throw Error("domain '" + spec.name + "': symbol list is only valid for finite domains");
    if (spec.kind == DomainKind::finite) {
        std::set<std::string> seen;
        for (const auto& s : spec.symbols) {
            if (s == "*") throw Error("domain '" + spec.name + "': symbol '*' is reserved for the adjoined basepoint");
            if (!seen.insert(s).second)
                throw Error("domain '" + spec.name + "': duplicate symbol '" + s + "'");
        }
    }

    if (spec.kind == DomainKind::unit) {
        if (spec.basepoint && !spec.basepoint->is_star())
            throw Error("domain '" + spec.name + "': the unit domain's sole value is its basepoint '*'");
        d.basepoint_ = Value::star();
        return d;
    }

    if (!spec.basepoint || spec.basepoint->is_star()) {
        d.basepoint_ = Value::star();  // freely adjoined
        return d;
    }

    if (spec.kind == DomainKind::finite && spec.symbols.empty())
        throw Error("domain '" + spec.name + "': empty finite domain cannot carry an explicit basepoint");
    d.basepoint_ = *spec.basepoint;
    if (!d.contains(d.basepoint_))
        throw Error("domain '" + spec.name + "': basepoint " + d.basepoint_.str() + " is not a member");
    return d;
}

bool ValueDomain::contains(const Value& v) const {
    if (v.is_star()) return kind_ == DomainKind::unit || star_adjoined();
    switch (kind_) {
        case DomainKind::naturals: return v.is_integer() && v.as_integer() >= 0;
        case DomainKind::integers: return v.is_integer();
        case DomainKind::finite:
            return v.is_symbol() &&
                   std::find(symbols_.begin(), symbols_.end(), v.as_symbol()) != symbols_.end();
        case DomainKind::unit: return false;  // star handled above
    }
    return false;
}

bool ValueDomain::same_domain(const ValueDomain& other) const {
    return kind_ == other.kind_ && symbols_ == other.symbols_ && basepoint_ == other.basepoint_;
}

std::string ValueDomain::fingerprint() const {
    std::string fp = domain_kind_name(kind_);
    if (kind_ == DomainKind::finite) {
        fp += '{';
        for (std::size_t i = 0; i < symbols_.size(); ++i) {
            if (i) fp += ',';
            fp += symbols_[i];
        }
        fp += '}';
    }
    fp += '@';
    fp += basepoint_.str();
    return fp;
}

std::vector<Value> ValueDomain::members() const {
    if (!enumerable()) throw Error("domain '" + name_ + "' is not enumerable");
    std::vector<Value> out;
    if (kind_ == DomainKind::unit) {
        out.push_back(Value::star());
        return out;
    }
    for (const auto& s : symbols_) out.push_back(Value::symbol(s));
    if (star_adjoined()) out.push_back(Value::star());
    return out;
}

bool same_domain(const DomainRef& a, const DomainRef& b) {
    if (!a || !b) return a == b;
    return a.get() == b.get() || a->same_domain(*b);
}

DomainRef DomainRegistry::define(const ValueDomain::Spec& spec) {
    if (by_name_.count(spec.name))
        throw Error("duplicate domain name '" + spec.name + "'");
    auto ref = std::make_shared<const ValueDomain>(ValueDomain::make(spec));
    by_name_.emplace(spec.name, ref);
    order_.push_back(ref);
    return ref;
}

DomainRef DomainRegistry::get(const std::string& name) const {
    auto ref = find(name);
    if (!ref) throw Error("unknown domain '" + name + "'");
    return ref;
}

DomainRef DomainRegistry::find(const std::string& name) const {
    auto it = by_name_.find(name);
    return it == by_name_.end() ? nullptr : it->second;
}

}  // namespace wd
