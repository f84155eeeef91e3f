#pragma once

#include <span>
#include <string>
#include <vector>

#include "wd/domain.hpp"

namespace wd {

struct Coord {
    std::string label;
    DomainRef domain;
};

bool same_coords(std::span<const Coord> a, std::span<const Coord> b);
std::string coords_str(std::span<const Coord> coords);

// A time-indexed table of wire values: one coordinate per wire, one row per
// step. Rows are validated for arity and domain membership on insertion, so
// a TupleList always represents an element of List(prod of domains). A list
// over zero coordinates still has a length: rows of empty tuples.
class TupleList {
public:
    TupleList() = default;
    explicit TupleList(std::vector<Coord> coords) : coords_(std::move(coords)) {}
    TupleList(std::vector<Coord> coords, std::vector<std::vector<Value>> rows);

    const std::vector<Coord>& coords() const { return coords_; }
    std::size_t width() const { return coords_.size(); }
    std::size_t length() const { return rows_.size(); }
    bool empty() const { return rows_.empty(); }

    const std::vector<std::vector<Value>>& rows() const { return rows_; }
    const std::vector<Value>& row(std::size_t t) const { return rows_.at(t); }
    const Value& at(std::size_t t, std::size_t c) const { return rows_.at(t).at(c); }
    std::vector<Value> column(std::size_t c) const;

    void push_row(std::vector<Value> row);

    // Same coordinate labels/domains and identical rows.
    friend bool operator==(const TupleList&, const TupleList&);

    std::string str() const;  // "[(1,2),(3,4)]"

private:
    std::vector<Coord> coords_;
    std::vector<std::vector<Value>> rows_;
};

// The paper's boundary operator: drops the final row. Throws on empty input.
TupleList drop_last(const TupleList& l);

// zipwith: interleave equal-length lists into one list over concatenated
// coordinates, and its inverse.
TupleList zip_align(std::span<const TupleList> parts);
TupleList zip_align(const TupleList& a, const TupleList& b);
std::vector<TupleList> split_aligned(const TupleList& l, std::span<const std::size_t> widths);

// Coordinate projection induced by a map from target coordinates to source
// coordinates: column j of the result is column source_index[j] of the input.
// Wires may split (several targets sharing one source) but domains must agree.
TupleList coordinate_project(const TupleList& l, std::vector<Coord> targets,
                             std::span<const std::size_t> source_index);

// Convenience: relabel coordinates without touching the data.
TupleList relabel(const TupleList& l, std::vector<Coord> coords);

}  // namespace wd
