#include "wd/list.hpp"

#include <numeric>

namespace wd {

bool same_coords(std::span<const Coord> a, std::span<const Coord> b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].label != b[i].label || !same_domain(a[i].domain, b[i].domain)) return false;
    return true;
}

std::string coords_str(std::span<const Coord> coords) {
    std::string s = "(";
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (i) s += ',';
        s += coords[i].label;
    }
    return s + ")";
}

TupleList::TupleList(std::vector<Coord> coords, std::vector<std::vector<Value>> rows)
    : coords_(std::move(coords)) {
    for (auto& r : rows) push_row(std::move(r));
}

std::vector<Value> TupleList::column(std::size_t c) const {
    std::vector<Value> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.push_back(r.at(c));
    return out;
}

void TupleList::push_row(std::vector<Value> row) {
    if (row.size() != coords_.size())
        throw Error("row arity " + std::to_string(row.size()) + " does not match coordinates " +
                    coords_str(coords_));
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (!coords_[i].domain->contains(row[i]))
            throw Error("value " + row[i].str() + " is not in domain '" +
                        coords_[i].domain->name() + "' of coordinate '" + coords_[i].label + "'");
    }
    rows_.push_back(std::move(row));
}

bool operator==(const TupleList& a, const TupleList& b) {
    return same_coords(a.coords_, b.coords_) && a.rows_ == b.rows_;
}

std::string TupleList::str() const {
    std::string s = "[";
    for (std::size_t t = 0; t < rows_.size(); ++t) {
        if (t) s += ',';
        if (width() == 1) {
            s += rows_[t][0].str();
            continue;
        }
        s += '(';
        for (std::size_t c = 0; c < rows_[t].size(); ++c) {
            if (c) s += ',';
            s += rows_[t][c].str();
        }
        s += ')';
    }
    return s + "]";
}

TupleList drop_last(const TupleList& l) {
    if (l.empty()) throw Error("drop_last on an empty list");
    TupleList out(l.coords());
    for (std::size_t t = 0; t + 1 < l.length(); ++t) out.push_row(l.row(t));
    return out;
}

TupleList zip_align(std::span<const TupleList> parts) {
    std::vector<Coord> coords;
    std::size_t len = parts.empty() ? 0 : parts.front().length();
    for (const auto& p : parts) {
        if (p.length() != len)
            throw Error("zip_align length mismatch: " + std::to_string(p.length()) + " vs " +
                        std::to_string(len));
        coords.insert(coords.end(), p.coords().begin(), p.coords().end());
    }
    TupleList out(std::move(coords));
    for (std::size_t t = 0; t < len; ++t) {
        std::vector<Value> row;
        for (const auto& p : parts) {
            const auto& r = p.row(t);
            row.insert(row.end(), r.begin(), r.end());
        }
        out.push_row(std::move(row));
    }
    return out;
}

TupleList zip_align(const TupleList& a, const TupleList& b) {
    TupleList parts[] = {a, b};
    return zip_align(std::span<const TupleList>(parts, 2));
}

std::vector<TupleList> split_aligned(const TupleList& l, std::span<const std::size_t> widths) {
    std::size_t total = std::accumulate(widths.begin(), widths.end(), std::size_t{0});
    if (total != l.width())
        throw Error("split widths sum to " + std::to_string(total) + ", list has width " +
                    std::to_string(l.width()));
    std::vector<TupleList> parts;
    std::size_t off = 0;
    for (std::size_t w : widths) {
        std::vector<Coord> coords(l.coords().begin() + off, l.coords().begin() + off + w);
        TupleList part(std::move(coords));
        for (std::size_t t = 0; t < l.length(); ++t) {
            const auto& r = l.row(t);
            part.push_row(std::vector<Value>(r.begin() + off, r.begin() + off + w));
        }
        parts.push_back(std::move(part));
        off += w;
    }
    return parts;
}

TupleList coordinate_project(const TupleList& l, std::vector<Coord> targets,
                             std::span<const std::size_t> source_index) {
    if (targets.size() != source_index.size())
        throw Error("coordinate_project: target/source map size mismatch");
    for (std::size_t j = 0; j < targets.size(); ++j) {
        if (source_index[j] >= l.width())
            throw Error("coordinate_project: unknown source coordinate " +
                        std::to_string(source_index[j]));
        if (!same_domain(targets[j].domain, l.coords()[source_index[j]].domain))
            throw Error("coordinate_project: domain mismatch at target '" + targets[j].label +
                        "'");
    }
    TupleList out(std::move(targets));
    for (std::size_t t = 0; t < l.length(); ++t) {
        std::vector<Value> row;
        row.reserve(source_index.size());
        for (std::size_t src : source_index) row.push_back(l.at(t, src));
        out.push_row(std::move(row));
    }
    return out;
}

TupleList relabel(const TupleList& l, std::vector<Coord> coords) {
    if (coords.size() != l.width()) throw Error("relabel: coordinate count mismatch");
    for (std::size_t i = 0; i < coords.size(); ++i)
        if (!same_domain(coords[i].domain, l.coords()[i].domain))
            throw Error("relabel: domain mismatch at coordinate '" + coords[i].label + "'");
    return TupleList(std::move(coords), l.rows());
}

}  // namespace wd
