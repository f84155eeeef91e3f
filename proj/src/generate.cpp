#include "wd/generate.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace wd {

namespace {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t hash_values(std::span<const Value> vals, std::uint64_t h) {
    for (const auto& v : vals) {
        for (unsigned char c : v.str()) h = mix64(h ^ c);
        h = mix64(h ^ 0x7e);
    }
    return h;
}

std::vector<DomainRef> domain_pool() {
    std::vector<DomainRef> pool;
    pool.push_back(std::make_shared<const ValueDomain>(ValueDomain::make(
        {"N", DomainKind::naturals, {}, Value::integer(1)})));
    pool.push_back(std::make_shared<const ValueDomain>(ValueDomain::make(
        {"M", DomainKind::integers, {}, Value::integer(0)})));
    pool.push_back(std::make_shared<const ValueDomain>(ValueDomain::make(
        {"F", DomainKind::finite, {"a", "b", "c"}, std::nullopt})));
    pool.push_back(std::make_shared<const ValueDomain>(ValueDomain::make(
        {"B", DomainKind::finite, {"t", "f"}, Value::symbol("t")})));
    return pool;
}

}  // namespace

InstanceGen::InstanceGen(std::uint64_t seed, GenBounds bounds) : rng_(seed), bounds_(bounds) {
    auto pool = domain_pool();
    std::size_t n = pick(1, std::min(bounds_.max_domains, pool.size()));
    std::shuffle(pool.begin(), pool.end(), rng_);
    domains_.assign(pool.begin(), pool.begin() + n);
}

std::size_t InstanceGen::pick(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
}

DomainRef InstanceGen::random_domain() { return domains_[pick(0, domains_.size() - 1)]; }

BlackBox InstanceGen::random_box(const std::string& name) {
    std::vector<Port> ins, outs;
    std::size_t ni = pick(0, bounds_.max_ports);
    std::size_t no = pick(0, bounds_.max_ports);
    for (std::size_t i = 0; i < ni; ++i) ins.push_back({"i" + std::to_string(i), random_domain()});
    for (std::size_t i = 0; i < no; ++i) outs.push_back({"o" + std::to_string(i), random_domain()});
    return BlackBox(name, std::move(ins), std::move(outs));
}

WiringDiagram InstanceGen::random_diagram(const std::string& name) {
    return random_diagram_on(random_box(name + "_cod"), name);
}

WiringDiagram InstanceGen::random_diagram_on(const BlackBox& codomain, const std::string& name) {
    std::vector<BlackBox> interior;
    std::size_t n = pick(0, bounds_.max_interior);
    for (std::size_t i = 0; i < n; ++i)
        interior.push_back(random_box(name + "_b" + std::to_string(i)));

    std::vector<DelayNode> delays;
    std::size_t nd = pick(0, bounds_.max_delays);
    for (std::size_t i = 0; i < nd; ++i)
        delays.push_back({name + "_d" + std::to_string(i), random_domain()});

    // Every demanded domain needs a supplier of that domain; exterior outputs
    // additionally need an internal one. Patch gaps with extra delay nodes
    // (a delay may supply itself, so this always closes).
    auto has_internal = [&](const DomainRef& dom) {
        for (const auto& b : interior)
            for (const auto& p : b.outputs())
                if (same_domain(p.domain, dom)) return true;
        for (const auto& d : delays)
            if (same_domain(d.domain, dom)) return true;
        return false;
    };
    auto has_any = [&](const DomainRef& dom) {
        if (has_internal(dom)) return true;
        for (const auto& p : codomain.inputs())
            if (same_domain(p.domain, dom)) return true;
        return false;
    };
    std::size_t patch = 0;
    auto ensure = [&](const DomainRef& dom, bool internal) {
        if (internal ? has_internal(dom) : has_any(dom)) return;
        delays.push_back({name + "_p" + std::to_string(patch++), dom});
    };
    for (const auto& p : codomain.outputs()) ensure(p.domain, true);
    for (const auto& b : interior)
        for (const auto& p : b.inputs()) ensure(p.domain, false);
    for (const auto& d : std::vector<DelayNode>(delays)) ensure(d.domain, false);

    WiringDiagram shape(codomain, std::move(interior), std::move(delays), {}, name);
    WireTables tables = wire_tables(shape);
    std::map<WireId, WireId> supplier;
    for (const auto& dem : tables.demands) {
        bool exterior_out = dem.is_boundary() && dem.side == WireId::Side::output;
        std::vector<WireId> options;
        for (const auto& sup : tables.supplies) {
            if (exterior_out && sup.is_boundary()) continue;
            if (!same_domain(shape.domain_of(dem), shape.domain_of(sup))) continue;
            options.push_back(sup);
        }
        if (options.empty()) throw Error("generator: no legal supplier for a demand");
        supplier.emplace(dem, options[pick(0, options.size() - 1)]);
    }
    return WiringDiagram(shape.codomain(), std::vector<BlackBox>(shape.interior()),
                         std::vector<DelayNode>(shape.delays()), std::move(supplier), name);
}

Propagator InstanceGen::random_moore_filler(const BlackBox& box) {
    std::uint64_t seed = rng_();
    std::vector<Coord> ins, outs;
    for (const auto& p : box.inputs()) ins.push_back({p.label, p.domain});
    for (const auto& p : box.outputs()) outs.push_back({p.label, p.domain});

    Propagator::MooreBody body;
    for (std::size_t j = 0; j < outs.size(); ++j)
        body.init_output.push_back(sample_value(*outs[j].domain, mix64(seed ^ (j + 1))));
    body.init_state = {Value::integer(static_cast<std::int64_t>(seed & 0xffff))};
    std::vector<DomainRef> out_domains;
    for (const auto& c : outs) out_domains.push_back(c.domain);
    body.step = [seed, out_domains](std::span<const Value> in, std::span<const Value> state) {
        std::uint64_t h = mix64(seed ^ static_cast<std::uint64_t>(state[0].as_integer()));
        h = hash_values(in, h);
        Propagator::MooreStep s;
        for (std::size_t j = 0; j < out_domains.size(); ++j)
            s.output.push_back(sample_value(*out_domains[j], mix64(h ^ (j * 977 + 3))));
        s.state = {Value::integer(static_cast<std::int64_t>(h & 0xffff))};
        return s;
    };
    return moore_propagator(std::move(ins), std::move(outs), std::move(body));
}

TupleList InstanceGen::random_input_list(std::vector<Coord> coords, std::size_t max_len) {
    std::size_t len = pick(0, max_len);
    TupleList out(std::move(coords));
    for (std::size_t t = 0; t < len; ++t) {
        std::vector<Value> row;
        for (const auto& c : out.coords()) row.push_back(sample_value(*c.domain, rng_()));
        out.push_row(std::move(row));
    }
    return out;
}

std::vector<std::size_t> InstanceGen::random_permutation(std::size_t n) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng_);
    return perm;
}

std::size_t SuiteResult::checks_for(const std::string& law) const {
    auto it = checks.find(law);
    return it == checks.end() ? 0 : it->second;
}

std::size_t SuiteResult::failed_for(const std::string& law) const {
    auto it = failed.find(law);
    return it == failed.end() ? 0 : it->second;
}

std::string SuiteResult::summary() const {
    std::ostringstream os;
    for (const auto& [law, n] : checks) {
        std::size_t bad = failed_for(law);
        os << (bad ? "FAIL " : "ok   ") << law << ": " << (n - bad) << "/" << n << '\n';
    }
    return os.str();
}

namespace {

struct SuiteRecorder {
    SuiteResult& r;
    void record(const std::string& law, bool pass, const std::string& detail) {
        ++r.checks[law];
        if (!pass) {
            ++r.failed[law];
            if (r.failures.size() < 50) r.failures.push_back(law + ": " + detail);
        }
    }
};

}  // namespace

SuiteResult run_operad_law_suite(std::uint64_t seed, std::size_t cases) {
    SuiteResult result;
    SuiteRecorder rec{result};

    for (std::size_t c = 0; c < cases; ++c) {
        result.cases++;
        InstanceGen gen(mix64(seed ^ (c * 2 + 1)));
        std::string tag = "case " + std::to_string(c);

        WiringDiagram psi = gen.random_diagram("psi");
        CanonicalForm psi_canon = canonicalize(psi);

        // Left identity: composing with the identity on the codomain.
        {
            CompositionPlan plan{identity_diagram(psi.codomain()), {psi}};
            rec.record("identity-left", canonicalize(compose_diagrams(plan)) == psi_canon, tag);
        }
        // Right identity: keep markers on every slot.
        {
            CompositionPlan plan{psi, std::vector<std::optional<WiringDiagram>>(
                                          psi.interior().size(), std::nullopt)};
            rec.record("identity-right", canonicalize(compose_diagrams(plan)) == psi_canon, tag);
        }
        // Right identity again, with explicit identity diagrams.
        {
            CompositionPlan plan{psi, {}};
            for (const auto& b : psi.interior()) plan.inner.emplace_back(identity_diagram(b));
            rec.record("identity-right", canonicalize(compose_diagrams(plan)) == psi_canon, tag);
        }

        // A composable triple tau -> phi -> psi.
        std::vector<std::optional<WiringDiagram>> phis;
        std::vector<std::optional<WiringDiagram>> taus_flat;
        std::size_t inner_boxes = 0, tau_delays = 0, phi_delays = 0;
        for (std::size_t i = 0; i < psi.interior().size(); ++i) {
            WiringDiagram phi = gen.random_diagram_on(psi.interior()[i],
                                                      "phi" + std::to_string(i));
            phi_delays += phi.delays().size();
            for (std::size_t j = 0; j < phi.interior().size(); ++j) {
                WiringDiagram tau = gen.random_diagram_on(
                    phi.interior()[j], "tau" + std::to_string(i) + "_" + std::to_string(j));
                tau_delays += tau.delays().size();
                inner_boxes += tau.interior().size();
                taus_flat.emplace_back(std::move(tau));
            }
            phis.emplace_back(std::move(phi));
        }

        WiringDiagram psi_phi = compose_diagrams({psi, phis});
        rec.record("closure", validate_diagram(psi_phi).ok(), tag + " (psi.phi): " +
                                                                  validate_diagram(psi_phi).summary());
        WiringDiagram left = compose_diagrams({psi_phi, taus_flat});

        std::vector<std::optional<WiringDiagram>> phi_tau;
        std::size_t off = 0;
        for (const auto& phi : phis) {
            std::size_t take = phi->interior().size();
            std::vector<std::optional<WiringDiagram>> sub(taus_flat.begin() + off,
                                                          taus_flat.begin() + off + take);
            off += take;
            phi_tau.emplace_back(compose_diagrams({*phi, sub}));
        }
        WiringDiagram right = compose_diagrams({psi, phi_tau});

        rec.record("associativity", canonicalize(left) == canonicalize(right), tag);
        rec.record("closure", validate_diagram(left).ok(),
                   tag + " (full): " + validate_diagram(left).summary());
        rec.record("delay-count",
                   left.delays().size() == psi.delays().size() + phi_delays + tau_delays,
                   tag + ": " + std::to_string(left.delays().size()) + " delays");
        rec.record("interior-count", left.interior().size() == inner_boxes, tag);

        // Equivariance: permuting the slots of psi and its inner list agree.
        {
            auto perm = gen.random_permutation(psi.interior().size());
            std::vector<std::optional<WiringDiagram>> permuted;
            for (std::size_t k = 0; k < perm.size(); ++k) permuted.push_back(phis[perm[k]]);
            WiringDiagram a = compose_diagrams({permute_interior(psi, perm), permuted});
            rec.record("equivariance", canonicalize(a) == canonicalize(psi_phi), tag);
        }
    }
    return result;
}

SuiteResult run_algebra_law_suite(std::uint64_t seed, std::size_t cases) {
    SuiteResult result;
    SuiteRecorder rec{result};

    // P(id) = id on random fillers.
    std::size_t id_cases = std::min<std::size_t>(100, cases);
    for (std::size_t c = 0; c < id_cases; ++c) {
        result.cases++;
        InstanceGen gen(mix64(seed ^ (0xd1d0 + c * 2)));
        std::string tag = "id case " + std::to_string(c);
        BlackBox box = gen.random_box("B");
        Propagator filler = gen.random_moore_filler(box);
        Filling filling{identity_diagram(box), {filler}};
        bool pass = true;
        std::string detail = tag;
        for (int s = 0; s < 3 && pass; ++s) {
            TupleList l = gen.random_input_list(filler.inputs(), 6);
            TupleList via_diagram = evaluate_diagram(filling, l);
            TupleList directly = filler.apply(l);
            if (!(via_diagram == directly)) {
                pass = false;
                detail += ": P(id)(f)" + l.str() + " = " + via_diagram.str() + " but f gives " +
                          directly.str();
            }
        }
        rec.record("algebra-identity", pass, detail);
    }

    for (std::size_t c = 0; c < cases; ++c) {
        result.cases++;
        InstanceGen gen(mix64(seed ^ (c * 2 + 0x51)));
        std::string tag = "case " + std::to_string(c);

        WiringDiagram psi = gen.random_diagram("psi");
        std::vector<std::optional<WiringDiagram>> phis;
        std::vector<Propagator> fillers;
        for (std::size_t i = 0; i < psi.interior().size(); ++i) {
            WiringDiagram phi =
                gen.random_diagram_on(psi.interior()[i], "phi" + std::to_string(i));
            for (const auto& box : phi.interior())
                fillers.push_back(gen.random_moore_filler(box));
            phis.emplace_back(std::move(phi));
        }

        std::vector<TupleList> samples;
        std::vector<Coord> in_coords;
        for (const auto& p : psi.codomain().inputs()) in_coords.push_back({p.label, p.domain});
        for (int s = 0; s < 3; ++s) samples.push_back(gen.random_input_list(in_coords, 6));

        FunctorialityReport fr = check_functoriality(psi, phis, fillers, samples);
        rec.record("functoriality", fr.ok(),
                   tag + (fr.ok() ? "" : ": " + fr.mismatches.front()));

        WiringDiagram composed = compose_diagrams({psi, phis});
        Filling direct{composed, fillers};
        Propagator composite = composite_propagator(direct);
        HistoricalityReport hr = check_historical(composite, samples);
        rec.record("historicality", hr.ok(), tag + ": " + hr.summary());

        // Incremental sessions against the oracle, eight steps.
        {
            TupleList l(in_coords);
            for (std::size_t t = 0; t < 8; ++t) {
                std::vector<Value> row;
                for (const auto& cd : in_coords) row.push_back(sample_value(*cd.domain, gen.rng()()));
                l.push_row(std::move(row));
            }
            TupleList oracle = evaluate_diagram(direct, l);
            EvalSession session(direct);
            bool pass = true;
            std::string detail = tag;
            for (std::size_t t = 0; t < l.length() && pass; ++t) {
                std::vector<Value> got = session.step(l.row(t));
                if (got != oracle.row(t)) {
                    pass = false;
                    detail += ": session row " + std::to_string(t) + " diverges";
                }
            }
            if (pass && session.finish() != oracle.row(l.length())) {
                pass = false;
                detail += ": finish row diverges";
            }
            rec.record("session-oracle", pass, detail);
        }
    }
    return result;
}

}  // namespace wd
