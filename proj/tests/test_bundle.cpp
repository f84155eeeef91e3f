#include <doctest.h>

#include "fixtures.hpp"
#include "wd/bundle.hpp"

using namespace wd;

namespace {

std::string fib_bundle_path() { return std::string(WD_BUNDLE_DIR) + "/fib.bundle"; }

}  // namespace

TEST_CASE("the shipped bundle loads, validates, and runs") {
    Bundle b = load_bundle(fib_bundle_path());
    CHECK(b.find_diagram("phi") != nullptr);
    CHECK(b.find_diagram("psi") != nullptr);
    CHECK(b.main_diagram == "fib");

    Filling f = make_filling(b, "fib");
    TupleList out = evaluate_diagram(f, fx::ticks(10));
    CHECK(out == fx::ints1("c_Z", b.domains.get("N"), {1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89}));

    // The shipped composite equals composing the shipped factors.
    CompositionPlan plan{*b.find_diagram("psi"), {*b.find_diagram("phi")}};
    CHECK(canonicalize(compose_diagrams(plan)) == canonicalize(*b.find_diagram("fib")));
}

TEST_CASE("an empty bundle is valid and empty") {
    Bundle b = parse_bundle("{}");
    CHECK(b.diagrams.empty());
    CHECK(b.boxes.empty());
    CHECK(b.domains.all().empty());
}

TEST_CASE("parse errors carry a location") {
    try {
        parse_bundle("{ not json", "broken.bundle");
        FAIL("expected a parse error");
    } catch (const BundleError& e) {
        CHECK(e.kind() == BundleError::Kind::parse);
        CHECK(e.where().find("broken.bundle") != std::string::npos);
    }
}

TEST_CASE("non-instantaneity is rejected at load, naming the wire") {
    const char* text = R"({
      "domains": [{"name": "N", "kind": "naturals", "basepoint": 1}],
      "boxes": [{"name": "Z",
                 "inputs": [{"label": "a_Z", "domain": "N"}],
                 "outputs": [{"label": "c_Z", "domain": "N"}]}],
      "diagrams": [{"name": "bad", "codomain": "Z",
                    "supplier": {"Z.out.c_Z": "Z.in.a_Z"}}]
    })";
    try {
        parse_bundle(text);
        FAIL("expected a validation error");
    } catch (const BundleError& e) {
        CHECK(e.kind() == BundleError::Kind::validation);
        CHECK(e.message().find("c_Z") != std::string::npos);
        CHECK(e.message().find("instantaneous") != std::string::npos);
    }
}

TEST_CASE("unresolved references are distinct from parse errors") {
    const char* text = R"({
      "boxes": [{"name": "Z", "inputs": [{"label": "a", "domain": "nowhere"}], "outputs": []}]
    })";
    try {
        parse_bundle(text);
        FAIL("expected an unresolved reference");
    } catch (const BundleError& e) {
        CHECK(e.kind() == BundleError::Kind::unresolved);
    }
}

TEST_CASE("interior aliases disambiguate repeated boxes") {
    const char* text = R"({
      "domains": [{"name": "N", "kind": "naturals", "basepoint": 1}],
      "boxes": [
        {"name": "A", "inputs": [{"label": "i", "domain": "N"}],
                      "outputs": [{"label": "o", "domain": "N"}]},
        {"name": "W", "inputs": [{"label": "i", "domain": "N"}],
                      "outputs": [{"label": "o", "domain": "N"}]}
      ],
      "diagrams": [{"name": "two", "codomain": "W",
                    "interior": [{"box": "A", "as": "first"}, {"box": "A", "as": "second"}],
                    "supplier": {
                      "W.out.o": "second.out.o",
                      "first.in.i": "W.in.i",
                      "second.in.i": "first.out.o"
                    }}]
    })";
    Bundle b = parse_bundle(text);
    const WiringDiagram* two = b.find_diagram("two");
    REQUIRE(two != nullptr);
    CHECK(two->slot_names() == std::vector<std::string>{"first", "second"});
    CHECK(*two->supplier_of(WireId::box_in(1, "i")) == WireId::box_out(0, "o"));

    // Without aliases the same file is ambiguous.
    const char* dup = R"({
      "domains": [{"name": "N", "kind": "naturals", "basepoint": 1}],
      "boxes": [
        {"name": "A", "inputs": [], "outputs": [{"label": "o", "domain": "N"}]},
        {"name": "W", "inputs": [], "outputs": [{"label": "o", "domain": "N"}]}
      ],
      "diagrams": [{"name": "two", "codomain": "W", "interior": ["A", "A"],
                    "supplier": {"W.out.o": "A.out.o"}}]
    })";
    CHECK_THROWS_AS(parse_bundle(dup), BundleError);
}

TEST_CASE("bundle write/load round-trips losslessly") {
    Bundle a = load_bundle(fib_bundle_path());
    Bundle b = parse_bundle(write_bundle(a));
    CHECK(bundles_equal(a, b));
    CHECK(write_bundle(a) == write_bundle(b));
}

TEST_CASE("binding type-checks reject unsuitable boxes") {
    Bundle b = load_bundle(fib_bundle_path());
    const BlackBox* x = b.find_box("X");
    REQUIRE(x != nullptr);

    BuiltinSpec plus{BuiltinSpec::Kind::plus};
    CHECK_NOTHROW(make_builtin(plus, *x, "t"));

    BuiltinSpec d2{BuiltinSpec::Kind::delay};
    d2.delay_steps = 2;
    CHECK_THROWS_AS(make_builtin(d2, *x, "t"), BundleError);  // fillers are 1-historical

    BuiltinSpec sum{BuiltinSpec::Kind::running_sum};
    CHECK_THROWS_AS(make_builtin(sum, *x, "t"), BundleError);  // two inputs

    auto abc = std::make_shared<const ValueDomain>(
        ValueDomain::make({"ABC", DomainKind::finite, {"a", "b"}, std::nullopt}));
    BlackBox fin("F", {{"i", abc}}, {{"o", abc}});
    CHECK_THROWS_AS(make_builtin(plus, fin, "t"), BundleError);  // not numeric

    BuiltinSpec bad_init{BuiltinSpec::Kind::plus};
    bad_init.init = {Value::integer(-1)};
    const BlackBox* y = b.find_box("Y");
    BuiltinSpec sum_ok{BuiltinSpec::Kind::running_sum};
    CHECK_NOTHROW(make_builtin(sum_ok, *y, "t"));
    CHECK_THROWS_AS(make_builtin(bad_init, *x, "t"), BundleError);
}

TEST_CASE("builtin behaviors") {
    auto n = fx::domain_n();
    Bundle b = load_bundle(fib_bundle_path());

    SUBCASE("plus matches the worked example") {
        BuiltinSpec spec{BuiltinSpec::Kind::plus};
        spec.init = {Value::integer(1)};
        Propagator p = make_builtin(spec, *b.find_box("X"), "t");
        CHECK(p.apply(fx::ints({{"a_X", n}, {"b_X", n}}, {{4, 1}, {5, 1}, {6, 3}, {7, 7}})) ==
              fx::ints1("c_X", n, {1, 5, 6, 9, 14}));
    }

    SUBCASE("running_sum matches the running-total example") {
        BuiltinSpec spec{BuiltinSpec::Kind::running_sum};
        spec.init = {Value::integer(0)};
        Propagator p = make_builtin(spec, *b.find_box("Y"), "t");
        CHECK(p.apply(fx::ints1("a_Y", n, {1, 3, 5, 7, 10})) ==
              fx::ints1("c_Y", n, {0, 1, 4, 9, 16, 26}));
    }

    SUBCASE("constant ignores its inputs") {
        BuiltinSpec spec{BuiltinSpec::Kind::constant};
        spec.value = {Value::integer(7)};
        Propagator p = make_builtin(spec, *b.find_box("Y"), "t");
        CHECK(p.apply(fx::ints1("a_Y", n, {1, 2})) == fx::ints1("c_Y", n, {7, 7, 7}));
    }

    SUBCASE("delay builtin is the one-moment delay") {
        BlackBox pass("P", {{"i", n}}, {{"o", n}});
        BuiltinSpec spec{BuiltinSpec::Kind::delay};
        Propagator p = make_builtin(spec, pass, "t");
        CHECK(p.apply(fx::ints1("i", n, {4, 9})) == fx::ints1("o", n, {1, 4, 9}));
    }

    SUBCASE("copy replicates the previous input") {
        BlackBox fan("C", {{"i", n}}, {{"o1", n}, {"o2", n}});
        BuiltinSpec spec{BuiltinSpec::Kind::copy};
        Propagator p = make_builtin(spec, fan, "t");
        CHECK(p.apply(fx::ints1("i", n, {4})) ==
              fx::ints({{"o1", n}, {"o2", n}}, {{1, 1}, {4, 4}}));
    }

    SUBCASE("pointwise folds the named operation") {
        BuiltinSpec spec{BuiltinSpec::Kind::pointwise};
        spec.op = "mul";
        spec.init = {Value::integer(1)};
        Propagator p = make_builtin(spec, *b.find_box("X"), "t");
        CHECK(p.apply(fx::ints({{"a_X", n}, {"b_X", n}}, {{4, 3}})) ==
              fx::ints1("c_X", n, {1, 12}));
    }

    SUBCASE("table lookups and the missing-entry error") {
        auto abc = std::make_shared<const ValueDomain>(
            ValueDomain::make({"ABC", DomainKind::finite, {"x", "y"}, std::nullopt}));
        BlackBox box("T", {{"i", abc}}, {{"o", abc}});
        BuiltinSpec spec{BuiltinSpec::Kind::table};
        spec.init = {Value::star()};
        spec.table = {{{Value::symbol("x")}, {Value::symbol("y")}}};
        Propagator p = make_builtin(spec, box, "t");
        TupleList in({{"i", abc}});
        in.push_row({Value::symbol("x")});
        TupleList out = p.apply(in);
        CHECK(out.at(1, 0) == Value::symbol("y"));
        in.push_row({Value::symbol("y")});  // no entry
        CHECK_THROWS_AS(p.apply(in), Error);
    }
}

TEST_CASE("trace emission is deterministic and round-trips through json") {
    Bundle b = load_bundle(fib_bundle_path());
    Filling f = make_filling(b, "fib");
    TraceBundle tb = trace(f, fx::ticks(3));

    std::string table = emit_trace(tb, TraceFormat::table);
    CHECK(table == emit_trace(tb, TraceFormat::table));
    CHECK(table.substr(0, 21) == "step\twire\trole\tvalue\n");
    CHECK(table.find("1\tX.out.c_X\tsupply\t1") != std::string::npos);
    CHECK(table.find("3\tdelay.d_psi\tsupply\t2") != std::string::npos);

    // Empty trace: header only.
    TraceBundle empty = trace(f, fx::ticks(0));
    CHECK(emit_trace(empty, TraceFormat::table) == "step\twire\trole\tvalue\n");

    TraceBundle back = parse_trace_json(emit_trace(tb, TraceFormat::json));
    CHECK(back == tb);
}

TEST_CASE("make_filling demands a binding for every slot") {
    Bundle b = load_bundle(fib_bundle_path());
    CHECK_THROWS_AS(make_filling(b, "psi"), BundleError);  // Y slot is unbound
    CHECK_NOTHROW(make_filling(b, "phi"));
}
