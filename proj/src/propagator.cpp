#include "wd/propagator.hpp"

#include <sstream>

namespace wd {

namespace {

std::vector<Value> basepoint_row(std::span<const Coord> coords) {
    std::vector<Value> row;
    row.reserve(coords.size());
    for (const auto& c : coords) row.push_back(c.domain->basepoint());
    return row;
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

}  // namespace

Propagator::Propagator(std::vector<Coord> inputs, std::vector<Coord> outputs, int degree,
                       PrefixFn fn)
    : inputs_(std::move(inputs)), outputs_(std::move(outputs)), degree_(degree), body_(std::move(fn)) {
    if (degree_ < 0) throw Error("propagator degree must be nonnegative");
}

Propagator::Propagator(std::vector<Coord> inputs, std::vector<Coord> outputs, MooreBody moore)
    : inputs_(std::move(inputs)), outputs_(std::move(outputs)), degree_(1), body_(std::move(moore)) {
    if (std::get<MooreBody>(body_).init_output.size() != outputs_.size())
        throw Error("moore initial output arity does not match output coordinates");
}

TupleList Propagator::apply(const TupleList& input) const {
    if (!same_coords(input.coords(), inputs_))
        throw Error("propagator applied to " + coords_str(input.coords()) +
                    ", expected " + coords_str(inputs_));
    if (const auto* fn = std::get_if<PrefixFn>(&body_)) {
        TupleList out = (*fn)(input);
        if (!same_coords(out.coords(), outputs_))
            throw Error("propagator produced coordinates " + coords_str(out.coords()) +
                        ", declared " + coords_str(outputs_));
        if (out.length() != input.length() + static_cast<std::size_t>(degree_))
            throw Error("propagator violated the length law: |out|=" +
                        std::to_string(out.length()) + " for |in|=" +
                        std::to_string(input.length()) + ", degree " + std::to_string(degree_));
        return out;
    }
    const MooreBody& m = std::get<MooreBody>(body_);
    TupleList out(outputs_);
    out.push_row(m.init_output);
    std::vector<Value> state = m.init_state;
    for (std::size_t t = 0; t < input.length(); ++t) {
        MooreStep s = m.step(input.row(t), state);
        out.push_row(std::move(s.output));
        state = std::move(s.state);
    }
    return out;
}

Propagator delay_propagator(int n, std::vector<Coord> coords) {
    if (n < 0) throw Error("delay degree must be nonnegative");
    if (n == 1) {
        Propagator::MooreBody m;
        m.init_output = basepoint_row(coords);
        m.step = [](std::span<const Value> in, std::span<const Value>) {
            return Propagator::MooreStep{{in.begin(), in.end()}, {}};
        };
        return Propagator(coords, coords, std::move(m));
    }
    auto out_coords = coords;
    auto fn = [n, coords](const TupleList& l) {
        TupleList out(coords);
        for (int i = 0; i < n; ++i) out.push_row(basepoint_row(coords));
        for (std::size_t t = 0; t < l.length(); ++t) out.push_row(l.row(t));
        return out;
    };
    return Propagator(coords, std::move(out_coords), n, std::move(fn));
}

Propagator lift_pointwise(std::vector<Coord> inputs, std::vector<Coord> outputs, RowFn fn) {
    auto out_coords = outputs;
    auto body = [outputs, fn = std::move(fn)](const TupleList& l) {
        TupleList out(outputs);
        for (std::size_t t = 0; t < l.length(); ++t) out.push_row(fn(l.row(t)));
        return out;
    };
    return Propagator(std::move(inputs), std::move(out_coords), 0, std::move(body));
}

Propagator moore_propagator(std::vector<Coord> inputs, std::vector<Coord> outputs,
                            Propagator::MooreBody body) {
    return Propagator(std::move(inputs), std::move(outputs), std::move(body));
}

Propagator product_propagators(std::span<const Propagator> parts, int degree_if_empty) {
    std::vector<Coord> ins, outs;
    for (const auto& p : parts) {
        ins.insert(ins.end(), p.inputs().begin(), p.inputs().end());
        outs.insert(outs.end(), p.outputs().begin(), p.outputs().end());
    }
    if (parts.empty()) {
        if (degree_if_empty == 1) {
            Propagator::MooreBody m;
            m.step = [](std::span<const Value>, std::span<const Value>) {
                return Propagator::MooreStep{{}, {}};
            };
            return Propagator({}, {}, std::move(m));
        }
        auto fn = [degree_if_empty](const TupleList& l) {
            TupleList out{std::vector<Coord>{}};
            for (std::size_t t = 0; t < l.length() + degree_if_empty; ++t) out.push_row({});
            return out;
        };
        return Propagator({}, {}, degree_if_empty, std::move(fn));
    }

    int degree = parts.front().degree();
    for (const auto& p : parts)
        if (p.degree() != degree)
            throw Error("product of propagators with mixed degrees " + std::to_string(degree) +
                        " and " + std::to_string(p.degree()));

    bool all_moore = true;
    for (const auto& p : parts) all_moore = all_moore && p.is_moore();

    if (all_moore) {
        // Concatenate outputs and states; remember the split points.
        std::vector<std::size_t> in_w, state_w;
        Propagator::MooreBody m;
        std::vector<Propagator::StepFn> steps;
        for (const auto& p : parts) {
            const auto& b = p.moore();
            m.init_output.insert(m.init_output.end(), b.init_output.begin(), b.init_output.end());
            m.init_state.insert(m.init_state.end(), b.init_state.begin(), b.init_state.end());
            in_w.push_back(p.inputs().size());
            state_w.push_back(b.init_state.size());
            steps.push_back(b.step);
        }
        m.step = [steps, in_w, state_w](std::span<const Value> in, std::span<const Value> state) {
            Propagator::MooreStep out;
            std::size_t io = 0, so = 0;
            for (std::size_t i = 0; i < steps.size(); ++i) {
                auto s = steps[i](in.subspan(io, in_w[i]), state.subspan(so, state_w[i]));
                out.output.insert(out.output.end(), s.output.begin(), s.output.end());
                out.state.insert(out.state.end(), s.state.begin(), s.state.end());
                io += in_w[i];
                so += state_w[i];
            }
            return out;
        };
        return Propagator(std::move(ins), std::move(outs), std::move(m));
    }

    std::vector<Propagator> owned(parts.begin(), parts.end());
    std::vector<std::size_t> widths;
    for (const auto& p : owned) widths.push_back(p.inputs().size());
    auto fn = [owned, widths](const TupleList& l) {
        auto blocks = split_aligned(l, widths);
        std::vector<TupleList> results;
        for (std::size_t i = 0; i < owned.size(); ++i)
            results.push_back(owned[i].apply(relabel(blocks[i], owned[i].inputs())));
        return zip_align(results);
    };
    return Propagator(std::move(ins), std::move(outs), degree, std::move(fn));
}

Propagator compose_propagators(const Propagator& first, const Propagator& then) {
    if (!same_coords(first.outputs(), then.inputs()))
        throw Error("compose_propagators: intermediate coordinates do not match (" +
                    coords_str(first.outputs()) + " vs " + coords_str(then.inputs()) + ")");
    auto fn = [first, then](const TupleList& l) { return then.apply(first.apply(l)); };
    return Propagator(first.inputs(), then.outputs(), first.degree() + then.degree(),
                      std::move(fn));
}

std::string HistoricalityReport::summary() const {
    std::ostringstream os;
    os << samples_checked << " samples";
    if (ok()) {
        os << ", all historical";
        return os.str();
    }
    for (const auto& i : issues)
        os << "\n  sample " << i.sample << " prefix " << i.prefix_length << " "
           << (i.kind == HistoricalityIssue::Kind::length ? "length law" : "prefix law") << ": "
           << i.detail;
    return os.str();
}

HistoricalityReport check_historical(const Propagator& p, std::span<const TupleList> samples) {
    HistoricalityReport report;
    for (std::size_t s = 0; s < samples.size(); ++s) {
        report.samples_checked++;
        // Outputs along the whole prefix chain of the sample.
        std::vector<TupleList> prefixes{TupleList(std::vector<Coord>(p.inputs()))};
        for (std::size_t t = 0; t < samples[s].length(); ++t) {
            TupleList next = prefixes.back();
            next.push_row(samples[s].row(t));
            prefixes.push_back(std::move(next));
        }
        std::vector<TupleList> outs;
        bool broken = false;
        for (const auto& pre : prefixes) {
            TupleList o = p.apply(pre);
            if (o.length() != pre.length() + static_cast<std::size_t>(p.degree())) {
                report.issues.push_back({HistoricalityIssue::Kind::length, s, pre.length(),
                                         "|f(l)|=" + std::to_string(o.length()) + " for |l|=" +
                                             std::to_string(pre.length()) + ", degree " +
                                             std::to_string(p.degree())});
                broken = true;
                break;
            }
            outs.push_back(std::move(o));
        }
        if (broken) continue;
        for (std::size_t k = 1; k < outs.size() && !broken; ++k) {
            TupleList trimmed = drop_last(outs[k]);
            if (!(trimmed == outs[k - 1])) {
                report.issues.push_back({HistoricalityIssue::Kind::prefix, s, k,
                                         "drop_last(f(l)) = " + trimmed.str() + " but f(drop_last(l)) = " +
                                             outs[k - 1].str()});
                broken = true;
            }
        }
    }
    return report;
}

Value sample_value(const ValueDomain& d, std::uint64_t h) {
    h = mix64(h);
    switch (d.kind()) {
        case DomainKind::unit:
            return Value::star();
        case DomainKind::naturals:
            if (d.star_adjoined() && h % 9 == 8) return Value::star();
            return Value::integer(static_cast<std::int64_t>(h % 8));
        case DomainKind::integers:
            if (d.star_adjoined() && h % 18 == 17) return Value::star();
            return Value::integer(static_cast<std::int64_t>(h % 17) - 8);
        case DomainKind::finite: {
            std::size_t n = d.symbols().size() + (d.star_adjoined() ? 1 : 0);
            std::size_t i = h % n;
            if (i < d.symbols().size()) return Value::symbol(d.symbols()[i]);
            return Value::star();
        }
    }
    return Value::star();
}

HistoricalityReport check_historical_sampled(const Propagator& p, std::uint64_t seed,
                                             std::size_t samples, std::size_t max_len) {
    std::vector<TupleList> lists;
    for (std::size_t s = 0; s < samples; ++s) {
        std::size_t len = mix64(seed ^ (s * 2 + 1)) % (max_len + 1);
        TupleList l{std::vector<Coord>(p.inputs())};
        for (std::size_t t = 0; t < len; ++t) {
            std::vector<Value> row;
            for (std::size_t c = 0; c < p.inputs().size(); ++c)
                row.push_back(sample_value(*p.inputs()[c].domain,
                                           mix64(seed) ^ mix64(s * 1315423911u + t * 31 + c)));
            l.push_row(std::move(row));
        }
        lists.push_back(std::move(l));
    }
    return check_historical(p, lists);
}

namespace {

void enumerate_rows(std::span<const Coord> coords, std::size_t i, std::vector<Value>& row,
                    std::vector<std::vector<Value>>& out) {
    if (i == coords.size()) {
        out.push_back(row);
        return;
    }
    for (const auto& v : coords[i].domain->members()) {
        row.push_back(v);
        enumerate_rows(coords, i + 1, row, out);
        row.pop_back();
    }
}

void enumerate_lists(const std::vector<std::vector<Value>>& rows, std::size_t max_len,
                     const std::vector<Coord>& coords, TupleList& cur,
                     std::vector<TupleList>& out) {
    out.push_back(cur);
    if (cur.length() == max_len) return;
    for (const auto& r : rows) {
        TupleList next = cur;
        next.push_row(r);
        enumerate_lists(rows, max_len, coords, next, out);
    }
}

}  // namespace

HistoricalityReport check_historical_exhaustive(const Propagator& p, std::size_t max_len) {
    for (const auto& c : p.inputs())
        if (!c.domain->enumerable())
            throw Error("exhaustive check needs finite domains; '" + c.domain->name() +
                        "' is infinite");
    std::vector<std::vector<Value>> rows;
    std::vector<Value> scratch;
    enumerate_rows(p.inputs(), 0, scratch, rows);
    double count = 1;
    for (std::size_t k = 0; k < max_len; ++k) count = count * rows.size() + 1;
    if (count > 20000) throw Error("exhaustive check space too large; use sampling instead");
    std::vector<TupleList> lists;
    TupleList empty{std::vector<Coord>(p.inputs())};
    enumerate_lists(rows, max_len, p.inputs(), empty, lists);
    return check_historical(p, lists);
}

}  // namespace wd
