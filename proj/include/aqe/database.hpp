#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace aqe {

// Domain elements are 1-based: a database over n elements uses ids 1..n.
using Element = uint32_t;

struct Relation {
    std::string name;
    int arity = 0;
    // Binary relation read as an undirected edge set; each edge is stored once
    // as (min, max).
    bool symmetric = false;
};

class Schema {
public:
    Schema() = default;
    explicit Schema(std::vector<Relation> rels);

    // Lines `relation <name> <arity> [symmetric]`, `#` comments.
    static Schema parse(std::string_view text);
    // A single undirected edge relation E.
    static Schema graph();

    int size() const { return static_cast<int>(rels_.size()); }
    const Relation& relation(int i) const { return rels_.at(i); }
    const std::vector<Relation>& relations() const { return rels_; }
    // -1 if absent.
    int index_of(std::string_view name) const;
    int max_arity() const { return max_arity_; }
    // Sum of arities.
    int norm() const { return norm_; }
    bool is_single_symmetric_binary() const {
        return rels_.size() == 1 && rels_[0].arity == 2 && rels_[0].symmetric;
    }
    std::string to_text() const;

    bool operator==(const Schema& o) const;

private:
    std::vector<Relation> rels_;
    std::unordered_map<std::string, int> by_name_;
    int max_arity_ = 0;
    int norm_ = 0;
};

using SchemaPtr = std::shared_ptr<const Schema>;

struct TupleRef {
    uint16_t rel;
    uint32_t index;
};

// A sub-database with its own contiguous element ids 1..m. Local ids are
// assigned in increasing order of the original ids.
struct Fragment {
    SchemaPtr schema;
    uint32_t m = 0;
    std::vector<Element> original;  // original[local - 1]
    std::vector<uint16_t> rel;      // per tuple
    std::vector<uint32_t> offset;   // per tuple, into elems; size = tuples + 1
    std::vector<Element> elems;     // local ids

    size_t tuple_count() const { return rel.size(); }
    std::span<const Element> tuple(size_t t) const {
        return {elems.data() + offset[t], elems.data() + offset[t + 1]};
    }
    void add_tuple(int r, std::span<const Element> local);
};

class Database {
public:
    Database(SchemaPtr schema, uint32_t n, int d);

    // Appends a tuple during construction. Symmetric edges are normalised;
    // duplicates are merged by finalize(). Throws ArityMismatch,
    // ElementOutOfRange, ParseError (loop in a symmetric relation).
    void add_tuple(int rel, std::span<const Element> tuple);
    void add_tuple(int rel, std::initializer_list<Element> tuple) {
        add_tuple(rel, std::span<const Element>(tuple.begin(), tuple.size()));
    }
    // Sorts tuple lists, builds the incidence index and checks degrees.
    void finalize();

    uint32_t n() const { return n_; }
    int d() const { return d_; }
    const Schema& schema() const { return *schema_; }
    const SchemaPtr& schema_ptr() const { return schema_; }

    size_t tuple_count(int rel) const { return tuples_[rel].size() / schema_->relation(rel).arity; }
    size_t total_tuples() const;
    std::span<const Element> tuple(int rel, size_t index) const {
        const int ar = schema_->relation(rel).arity;
        return {tuples_[rel].data() + index * ar, static_cast<size_t>(ar)};
    }
    std::span<const TupleRef> incidence(Element a) const {
        return {inc_.data() + inc_off_[a], inc_.data() + inc_off_[a + 1]};
    }
    int degree(Element a) const { return static_cast<int>(inc_off_[a + 1] - inc_off_[a]); }
    int max_degree() const;
    // Upper bound on Gaifman neighbours of one element.
    int gaifman_degree_bound() const;

    // The j-th (1-based) tuple of relation `rel` containing element i, in the
    // lexicographic order of the relation, or nullopt. Throws IndexOutOfRange
    // unless 1 <= i <= n and 1 <= j <= d.
    std::optional<std::span<const Element>> oracle_query(int rel, Element i, int j) const;

    bool contains(int rel, std::span<const Element> t) const;

    std::string to_text() const;

private:
    SchemaPtr schema_;
    uint32_t n_;
    int d_;
    bool finalized_ = false;
    std::vector<std::vector<Element>> tuples_;
    std::vector<uint32_t> inc_off_;
    std::vector<TupleRef> inc_;
};

// `domain <n>` then `<rel> e1 .. e_ar` lines. Throws ParseError, ArityMismatch,
// ElementOutOfRange, DegreeExceeded.
Database load_database(std::string_view schema_text, std::string_view db_text, int d);
Database load_database(SchemaPtr schema, std::string_view db_text, int d);

// Number of oracle_query calls made by this thread.
uint64_t oracle_calls();
void reset_oracle_calls();

// N_r(a) by breadth-first search over oracle_query answers. Sorted.
std::vector<Element> gaifman_ball(const Database& db, std::span<const Element> centres, int r);
// Gaifman distance, or -1 if larger than `limit`.
int gaifman_distance(const Database& db, Element a, Element b, int limit);

Fragment induced_subdb(const Database& db, std::span<const Element> elements);

}  // namespace aqe
