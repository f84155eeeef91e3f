#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "wd/list.hpp"

namespace wd {

// A historical propagator: a prefix-to-prefix function with |f(l)| = |l| + n
// and commuting with drop_last. Two bodies are supported. A prefix function
// is the literal form from the definition and is re-evaluated from scratch.
// A Moore body (initial output row + step function) is 1-historical by
// construction and allows O(1) incremental stepping.
class Propagator {
public:
    using PrefixFn = std::function<TupleList(const TupleList&)>;

    struct MooreStep {
        std::vector<Value> output;
        std::vector<Value> state;
    };
    using StepFn = std::function<MooreStep(std::span<const Value> input, std::span<const Value> state)>;

    struct MooreBody {
        std::vector<Value> init_output;
        std::vector<Value> init_state;
        StepFn step;
    };

    Propagator() = default;
    Propagator(std::vector<Coord> inputs, std::vector<Coord> outputs, int degree, PrefixFn fn);
    Propagator(std::vector<Coord> inputs, std::vector<Coord> outputs, MooreBody moore);

    const std::vector<Coord>& inputs() const { return inputs_; }
    const std::vector<Coord>& outputs() const { return outputs_; }
    int degree() const { return degree_; }
    bool is_moore() const { return std::holds_alternative<MooreBody>(body_); }
    const MooreBody& moore() const { return std::get<MooreBody>(body_); }

    // Evaluates the body on a full input prefix. Checks the input against the
    // declared coordinates and the output against the length law; domain
    // membership of produced rows is enforced by TupleList.
    TupleList apply(const TupleList& input) const;

private:
    std::vector<Coord> inputs_;
    std::vector<Coord> outputs_;
    int degree_ = 0;
    std::variant<PrefixFn, MooreBody> body_;
};

// delta^n: n rows of basepoints followed by the input verbatim. n = 1 is
// Moore-bodied; other degrees use a prefix function.
Propagator delay_propagator(int n, std::vector<Coord> coords);

// List(f) for a per-row function; 0-historical.
using RowFn = std::function<std::vector<Value>(std::span<const Value>)>;
Propagator lift_pointwise(std::vector<Coord> inputs, std::vector<Coord> outputs, RowFn fn);

Propagator moore_propagator(std::vector<Coord> inputs, std::vector<Coord> outputs,
                            Propagator::MooreBody body);

// Coordinate-block-wise product; all parts must share one degree. A product
// of Moore parts is again Moore. The empty product is the degree-0 unit on
// no coordinates (pass degree_if_empty to override, e.g. 1 for an evaluator).
Propagator product_propagators(std::span<const Propagator> parts, int degree_if_empty = 0);

// then(first(l)); degrees add.
Propagator compose_propagators(const Propagator& first, const Propagator& then);

struct HistoricalityIssue {
    enum class Kind { length, prefix };
    Kind kind;
    std::size_t sample;         // index into the checked samples
    std::size_t prefix_length;  // length of the offending input prefix
    std::string detail;
};

struct HistoricalityReport {
    std::size_t samples_checked = 0;
    std::vector<HistoricalityIssue> issues;
    bool ok() const { return issues.empty(); }
    std::string summary() const;
};

// Verifies both historicality laws on every prefix of every sample.
HistoricalityReport check_historical(const Propagator& p, std::span<const TupleList> samples);

// Sampling front-end: random member lists of length 0..max_len.
HistoricalityReport check_historical_sampled(const Propagator& p, std::uint64_t seed,
                                             std::size_t samples, std::size_t max_len);

// Exhaustive front-end for fully enumerable input coordinates; enumerates
// every list up to max_len (default 4), refusing domains that are too large.
HistoricalityReport check_historical_exhaustive(const Propagator& p, std::size_t max_len = 4);

// Uniform-ish random member of a domain (test and generator support).
Value sample_value(const ValueDomain& d, std::uint64_t h);

}  // namespace wd
