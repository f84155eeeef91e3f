#include <doctest.h>

#include "wd/domain.hpp"

using namespace wd;

TEST_CASE("naturals with explicit basepoint") {
    ValueDomain n = ValueDomain::make({"N", DomainKind::naturals, {}, Value::integer(1)});
    CHECK(n.basepoint() == Value::integer(1));
    CHECK(n.contains(Value::integer(0)));
    CHECK(n.contains(Value::integer(42)));
    CHECK_FALSE(n.contains(Value::integer(-1)));
    CHECK_FALSE(n.contains(Value::star()));
    CHECK_FALSE(n.star_adjoined());
}

TEST_CASE("finite domain without basepoint adjoins *") {
    ValueDomain f = ValueDomain::make({"F", DomainKind::finite, {"a", "b", "c"}, std::nullopt});
    CHECK(f.basepoint().is_star());
    CHECK(f.star_adjoined());
    CHECK(f.contains(Value::symbol("a")));
    CHECK(f.contains(Value::star()));
    CHECK_FALSE(f.contains(Value::symbol("d")));
    CHECK(f.members().size() == 4);
}

TEST_CASE("unit domain's sole value is its basepoint") {
    ValueDomain u = ValueDomain::make({"U", DomainKind::unit, {}, std::nullopt});
    CHECK(u.basepoint().is_star());
    CHECK(u.contains(Value::star()));
    CHECK_FALSE(u.contains(Value::integer(0)));
    CHECK(u.members().size() == 1);
}

TEST_CASE("domain construction errors") {
    CHECK_THROWS_AS(ValueDomain::make({"bad", DomainKind::naturals, {}, Value::integer(-1)}),
                    Error);
    CHECK_THROWS_AS(ValueDomain::make({"bad", DomainKind::finite, {"a", "a"}, std::nullopt}),
                    Error);
    CHECK_THROWS_AS(ValueDomain::make({"bad", DomainKind::finite, {"a"}, Value::symbol("z")}),
                    Error);
    // An empty finite domain is the adjoined point alone; an explicit
    // basepoint has nothing to point at.
    CHECK_NOTHROW(ValueDomain::make({"pt", DomainKind::finite, {}, std::nullopt}));
    CHECK_THROWS_AS(ValueDomain::make({"bad", DomainKind::finite, {}, Value::symbol("a")}),
                    Error);
    CHECK_THROWS_AS(ValueDomain::make({"bad", DomainKind::finite, {"*"}, std::nullopt}), Error);
}

TEST_CASE("registry rejects duplicate names") {
    DomainRegistry reg;
    make_value_domain(reg, {"N", DomainKind::naturals, {}, Value::integer(1)});
    CHECK_THROWS_AS(make_value_domain(reg, {"N", DomainKind::integers, {}, std::nullopt}), Error);
    CHECK(reg.get("N")->kind() == DomainKind::naturals);
    CHECK(reg.find("M") == nullptr);
}

TEST_CASE("structural equality ignores names") {
    ValueDomain a = ValueDomain::make({"A", DomainKind::naturals, {}, Value::integer(1)});
    ValueDomain b = ValueDomain::make({"B", DomainKind::naturals, {}, Value::integer(1)});
    ValueDomain c = ValueDomain::make({"C", DomainKind::naturals, {}, std::nullopt});
    CHECK(a.same_domain(b));
    CHECK_FALSE(a.same_domain(c));
    CHECK(a.fingerprint() == b.fingerprint());
    CHECK(a.fingerprint() != c.fingerprint());
}
