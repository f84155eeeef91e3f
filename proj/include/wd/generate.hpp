#pragma once

#include <map>
#include <random>

#include "wd/algebra.hpp"

namespace wd {

// Size bounds for generated instances; the defaults are the ones the law
// suites are specified against.
struct GenBounds {
    std::size_t max_interior = 3;
    std::size_t max_ports = 3;
    std::size_t max_delays = 2;
    std::size_t max_domains = 3;
};

// Deterministic source of random boxes, diagrams, fillers, and input lists.
// Diagrams are built over a small domain pool with the supplier drawn
// uniformly among type-compatible, non-instantaneity-respecting options;
// when a demanded domain has no source, a delay node of that domain is
// added so every demand has at least one legal supplier.
class InstanceGen {
public:
    explicit InstanceGen(std::uint64_t seed, GenBounds bounds = {});

    const std::vector<DomainRef>& domains() const { return domains_; }
    DomainRef random_domain();

    BlackBox random_box(const std::string& name);
    WiringDiagram random_diagram(const std::string& name);
    WiringDiagram random_diagram_on(const BlackBox& codomain, const std::string& name);

    Propagator random_moore_filler(const BlackBox& box);
    TupleList random_input_list(std::vector<Coord> coords, std::size_t max_len);
    std::vector<std::size_t> random_permutation(std::size_t n);

    std::size_t pick(std::size_t lo, std::size_t hi);  // inclusive bounds
    std::mt19937_64& rng() { return rng_; }

private:
    std::mt19937_64 rng_;
    GenBounds bounds_;
    std::vector<DomainRef> domains_;
};

struct SuiteResult {
    std::size_t cases = 0;
    std::map<std::string, std::size_t> checks;            // law name -> checks run
    std::map<std::string, std::size_t> failed;            // law name -> failures
    std::vector<std::string> failures;                    // detail lines
    bool ok() const { return failures.empty(); }
    std::size_t checks_for(const std::string& law) const;
    std::size_t failed_for(const std::string& law) const;
    std::string summary() const;
};

// Operadic structure laws checked by construction and canonical-form
// comparison: identity (both sides), associativity on composable triples,
// closure of composition under validation, slot-permutation equivariance,
// and exact delay-node counting.
SuiteResult run_operad_law_suite(std::uint64_t seed, std::size_t cases);

// Algebra laws checked by evaluation: the identity diagram evaluates to the
// filler itself, composed diagrams evaluate like composed evaluations,
// every composite is 1-historical on all prefixes, and incremental sessions
// reproduce oracle prefixes.
SuiteResult run_algebra_law_suite(std::uint64_t seed, std::size_t cases);

}  // namespace wd
