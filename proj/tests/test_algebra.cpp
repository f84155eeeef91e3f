#include <doctest.h>

#include "fixtures.hpp"
#include "wd/generate.hpp"

using namespace wd;

namespace {

Filling phi_plus() { return Filling{fx::diagram_phi(), {fx::plus_propagator()}}; }

// psi filled with the evaluated running-total propagator P(phi)("+").
Filling psi_nested() {
    return Filling{fx::diagram_psi(), {composite_propagator(phi_plus())}};
}

Filling omega_plus() {
    CompositionPlan plan{fx::diagram_psi(), {fx::diagram_phi()}};
    return Filling{compose_diagrams(plan), {fx::plus_propagator()}};
}

}  // namespace

TEST_CASE("cascade table for the running-total diagram") {
    Filling f = phi_plus();
    auto n = fx::domain_n();
    std::vector<Coord> sup_coords{{"Y.in.a_Y", n}, {"X.out.c_X", n}};
    std::vector<Coord> dem_coords{{"X.in.a_X", n}, {"X.in.b_X", n}};

    // |l| = 0 row of the table.
    CHECK(cascade(f, fx::ints1("a_Y", n, {})) == TupleList(sup_coords));

    // [l1] row, instantiated at l1 = 3.
    TupleList c1 = cascade(f, fx::ints1("a_Y", n, {3}));
    CHECK(c1 == fx::ints(sup_coords, {{3, 1}}));
    CHECK(shuttle_internal(f.diagram, c1) == fx::ints(dem_coords, {{3, 1}}));
    CHECK(advance_internal(f, shuttle_internal(f.diagram, c1)) ==
          fx::ints({{"X.out.c_X", n}}, {{1}, {4}}));

    // [l1, l2] row at (3, 5): C = [3,5] zip [1, 1+3].
    TupleList c2 = cascade(f, fx::ints1("a_Y", n, {3, 5}));
    CHECK(c2 == fx::ints(sup_coords, {{3, 1}, {5, 4}}));
    CHECK(advance_internal(f, shuttle_internal(f.diagram, c2)) ==
          fx::ints({{"X.out.c_X", n}}, {{1}, {4}, {9}}));
}

TEST_CASE("the filled diagram computes running totals plus one") {
    Filling f = phi_plus();
    auto n = fx::domain_n();
    CHECK(evaluate_diagram(f, fx::ints1("a_Y", n, {})) == fx::ints1("c_Y", n, {1}));
    CHECK(evaluate_diagram(f, fx::ints1("a_Y", n, {3, 5})) == fx::ints1("c_Y", n, {1, 4, 9}));

    std::mt19937_64 rng(5);
    for (int round = 0; round < 50; ++round) {
        TupleList l({{"a_Y", n}});
        std::size_t len = rng() % 9;
        std::vector<std::int64_t> vals;
        for (std::size_t t = 0; t < len; ++t) {
            vals.push_back(static_cast<std::int64_t>(rng() % 20));
            l.push_row({Value::integer(vals.back())});
        }
        TupleList out = evaluate_diagram(f, l);
        REQUIRE(out.length() == len + 1);
        std::int64_t sum = 1;
        for (std::size_t k = 0; k <= len; ++k) {
            CHECK(out.at(k, 0) == Value::integer(sum));
            if (k < len) sum += vals[k];
        }
    }
}

TEST_CASE("cascade table for the feedback diagram") {
    Filling f = psi_nested();
    auto n = fx::domain_n();
    std::vector<Coord> sup_coords{{"Y.out.c_Y", n}, {"delay.d_psi", n}};
    std::vector<Coord> dem_coords{{"Y.in.a_Y", n}, {"delay.d_psi", n}};

    CHECK(cascade(f, fx::ticks(0)) == TupleList(sup_coords));
    CHECK(cascade(f, fx::ticks(1)) == fx::ints(sup_coords, {{1, 1}}));
    TupleList c2 = cascade(f, fx::ticks(2));
    CHECK(c2 == fx::ints(sup_coords, {{1, 1}, {2, 1}}));
    CHECK(shuttle_internal(f.diagram, c2) == fx::ints(dem_coords, {{1, 1}, {1, 2}}));
    CHECK(advance_internal(f, shuttle_internal(f.diagram, c2)) ==
          fx::ints(sup_coords, {{1, 1}, {2, 1}, {3, 2}}));
    CHECK(cascade(f, fx::ticks(4)) ==
          fx::ints(sup_coords, {{1, 1}, {2, 1}, {3, 2}, {5, 3}}));
}

TEST_CASE("both routes to the Fibonacci propagator agree with the sequence") {
    auto n = fx::domain_n();
    TupleList fib5 = fx::ints1("c_Z", n, {1, 1, 2, 3, 5});
    CHECK(evaluate_diagram(psi_nested(), fx::ticks(4)) == fib5);
    CHECK(evaluate_diagram(omega_plus(), fx::ticks(4)) == fib5);
    CHECK(evaluate_diagram(omega_plus(), fx::ticks(10)) ==
          fx::ints1("c_Z", n, {1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89}));
}

TEST_CASE("the identity diagram evaluates to the filler itself") {
    auto n = fx::domain_n();
    Filling f{identity_diagram(fx::box_x()), {fx::plus_propagator()}};
    TupleList l = fx::ints({{"a_X", n}, {"b_X", n}}, {{4, 1}, {5, 1}, {6, 3}, {7, 7}});
    CHECK(evaluate_diagram(f, l) == fx::plus_propagator().apply(l));

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        InstanceGen gen(seed * 31 + 1);
        BlackBox box = gen.random_box("B");
        Propagator filler = gen.random_moore_filler(box);
        Filling idf{identity_diagram(box), {filler}};
        TupleList sample = gen.random_input_list(filler.inputs(), 6);
        CHECK(evaluate_diagram(idf, sample) == filler.apply(sample));
    }
}

TEST_CASE("degenerate diagram with no boxes, no delays, no outputs") {
    BlackBox sink("S", {{"a", fx::domain_n()}}, {});
    std::map<WireId, WireId> s;
    WiringDiagram wd(sink, {}, {}, std::move(s), "sink");
    Filling f{wd, {}};
    TupleList out = evaluate_diagram(f, fx::ints1("a", fx::domain_n(), {5, 6}));
    CHECK(out.length() == 3);
    CHECK(out.width() == 0);
}

TEST_CASE("filling validation rejects wrong degrees and shapes") {
    Filling wrong_degree{fx::diagram_phi(),
                         {delay_propagator(0, {{"a_X", fx::domain_n()},
                                               {"b_X", fx::domain_n()}})}};
    CHECK_THROWS_AS(validate_filling(wrong_degree), Error);

    Filling wrong_coords{fx::diagram_phi(),
                         {delay_propagator(1, {{"a_X", fx::domain_n()}})}};
    CHECK_THROWS_AS(validate_filling(wrong_coords), Error);

    Filling missing{fx::diagram_phi(), {}};
    CHECK_THROWS_AS(validate_filling(missing), Error);
}

TEST_CASE("sessions reproduce the oracle and refuse reuse after finish") {
    // Five steps and the lookahead row give the first six Fibonacci numbers.
    EvalSession session(omega_plus());
    std::vector<std::int64_t> got;
    for (int t = 0; t < 5; ++t) got.push_back(session.step({})[0].as_integer());
    got.push_back(session.finish()[0].as_integer());
    CHECK(got == std::vector<std::int64_t>{1, 1, 2, 3, 5, 8});
    CHECK_THROWS_AS(session.step({}), Error);
    CHECK_THROWS_AS(session.finish(), Error);

    EvalSession fresh(omega_plus());
    CHECK(fresh.finish() == std::vector<Value>{Value::integer(1)});
}

TEST_CASE("sessions fall back to the oracle for prefix-function fillers") {
    Filling f = psi_nested();  // composite filler has a prefix-function body
    TupleList oracle = evaluate_diagram(f, fx::ticks(6));
    EvalSession session(f);
    for (int t = 0; t < 6; ++t) CHECK(session.step({}) == oracle.row(t));
    CHECK(session.finish() == oracle.row(6));
}

TEST_CASE("session inputs are checked") {
    Filling f = phi_plus();
    EvalSession session(f);
    CHECK_THROWS_AS(session.step({}), Error);
    std::vector<Value> bad{Value::integer(-2)};
    CHECK_THROWS_AS(session.step(bad), Error);
    std::vector<Value> good{Value::integer(2)};
    CHECK(session.step(good) == std::vector<Value>{Value::integer(1)});
}

TEST_CASE("trace matches the supply/demand iteration pictures") {
    TraceBundle tb = trace(omega_plus(), fx::ticks(3));
    REQUIRE(tb.steps() == 3);
    REQUIRE(tb.supply_coords().size() == 2);
    CHECK(tb.supply_coords()[0].label == "X.out.c_X");
    CHECK(tb.supply_coords()[1].label == "delay.d_psi");
    CHECK(tb.supply_rows()[0] == std::vector<Value>{Value::integer(1), Value::integer(1)});
    CHECK(tb.supply_rows()[1] == std::vector<Value>{Value::integer(2), Value::integer(1)});
    CHECK(tb.supply_rows()[2] == std::vector<Value>{Value::integer(3), Value::integer(2)});
    CHECK(tb.output() == fx::ints1("c_Z", fx::domain_n(), {1, 1, 2, 3}));

    // Demand rows are the shuttled supply rows.
    auto demands = tb.demand_rows();
    REQUIRE(demands.size() == 3);
    for (std::size_t t = 0; t < 3; ++t)
        for (std::size_t j = 0; j < tb.demand_coords().size(); ++j)
            CHECK(demands[t][j] == tb.supply_rows()[t][tb.demand_source()[j]]);
    // Step 2 of the demand side: a_X=1, b_X=2, d=2, c_Z=1.
    CHECK(demands[1][0] == Value::integer(1));  // c_Z
    CHECK(demands[1][1] == Value::integer(1));  // a_X <- d
    CHECK(demands[1][2] == Value::integer(2));  // b_X <- c_X
    CHECK(demands[1][3] == Value::integer(2));  // d <- c_X
}

TEST_CASE("empty trace still carries the initial output") {
    TraceBundle tb = trace(omega_plus(), fx::ticks(0));
    CHECK(tb.steps() == 0);
    CHECK(tb.output() == fx::ints1("c_Z", fx::domain_n(), {1}));
}

TEST_CASE("a delay node's supply is its demand shifted by one") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        InstanceGen gen(seed * 97 + 13);
        WiringDiagram wd = gen.random_diagram("g");
        if (wd.delays().empty()) continue;
        Filling f{wd, {}};
        for (const auto& box : wd.interior()) f.fillers.push_back(gen.random_moore_filler(box));
        std::vector<Coord> in_coords;
        for (const auto& p : wd.codomain().inputs()) in_coords.push_back({p.label, p.domain});
        TupleList l = gen.random_input_list(in_coords, 6);

        TupleList supplies = cascade(f, l);
        TupleList demands = shuttle(wd, supplies);
        WireTables tables = wire_tables(wd);
        for (const auto& d : wd.delays()) {
            auto sup_i = *tables.supply_index(WireId::delay(d.label));
            auto dem_i = *tables.demand_index(WireId::delay(d.label));
            for (std::size_t t = 0; t < supplies.length(); ++t) {
                Value expected = t == 0 ? d.domain->basepoint() : demands.at(t - 1, dem_i);
                CHECK(supplies.at(t, sup_i) == expected);
            }
        }
    }
}

TEST_CASE("functoriality on the running example to length 8") {
    std::vector<std::optional<WiringDiagram>> inners{fx::diagram_phi()};
    std::vector<Propagator> fillers{fx::plus_propagator()};
    std::vector<TupleList> samples;
    for (std::size_t len = 0; len <= 8; ++len) samples.push_back(fx::ticks(len));
    FunctorialityReport r =
        check_functoriality(fx::diagram_psi(), inners, fillers, samples);
    CHECK(r.ok());
    CHECK(r.samples_checked == 9);
}

TEST_CASE("functoriality with an identity outer diagram") {
    WiringDiagram outer = identity_diagram(fx::box_y());
    std::vector<std::optional<WiringDiagram>> inners{fx::diagram_phi()};
    std::vector<Propagator> fillers{fx::plus_propagator()};
    std::vector<TupleList> samples{fx::ints1("a_Y", fx::domain_n(), {2, 4, 6})};
    CHECK(check_functoriality(outer, inners, fillers, samples).ok());
}

TEST_CASE("evaluated composites are 1-historical") {
    Propagator fib = composite_propagator(omega_plus());
    CHECK(fib.degree() == 1);
    std::vector<TupleList> samples{fx::ticks(6)};
    CHECK(check_historical(fib, samples).ok());

    Propagator one_plus_sigma = composite_propagator(phi_plus());
    CHECK(check_historical_sampled(one_plus_sigma, 12, 30, 8).ok());
}

TEST_CASE("algebra law suite passes on a quick run") {
    SuiteResult r = run_algebra_law_suite(77, 15);
    INFO(r.summary());
    for (const auto& f : r.failures) INFO(f);
    CHECK(r.ok());
    CHECK(r.checks_for("functoriality") == 15);
    CHECK(r.checks_for("session-oracle") == 15);
}
