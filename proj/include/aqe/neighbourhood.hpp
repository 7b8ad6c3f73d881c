#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "aqe/database.hpp"

namespace aqe {

using TypeId = uint32_t;
constexpr TypeId kNoType = 0xFFFFFFFFu;

struct VecHash {
    size_t operator()(const std::vector<uint32_t>& v) const;
};

struct Neighbourhood {
    Fragment fragment;
    std::vector<Element> centres;  // local ids, repeats allowed
    int radius = 0;

    uint32_t size() const { return fragment.m; }
};

Neighbourhood extract_neighbourhood(const Database& db, std::span<const Element> tuple, int r);

// Groups the positions of t by the connected components of N_r(t): group[i]
// is the component of t[i], numbered by first position. Returns the count.
// With relations of arity <= 2 two positions share a component iff they are
// linked by a chain of centres at distance <= 2r+1; wider relations can leave
// balls at that distance unlinked, so those schemas take the induced route.
int centre_groups(const Database& db, std::span<const Element> t, int r, std::vector<int>& group);

struct TypeComponent {
    std::vector<int> positions;  // 0-based centre positions in this component
    TypeId type;                 // connected type of the component
};

struct TypeInfo {
    TypeId id = kNoType;
    int k = 0;
    uint32_t cardinality = 0;
    int component_count = 0;
    // Centres come first, in order of first occurrence. A repeated centre
    // occupies a single position.
    Neighbourhood representative;
    // For a connected type, a single entry naming the type itself.
    std::vector<TypeComponent> components;
    std::vector<uint32_t> key;

    bool connected() const { return component_count == 1; }
};

// Interns canonical forms. Ids are process-local; anything persisted stores
// the representative instead.
class TypeRegistry {
public:
    TypeRegistry() = default;
    TypeRegistry(const TypeRegistry&) = delete;
    TypeRegistry& operator=(const TypeRegistry&) = delete;

    const TypeInfo& info(TypeId id) const;
    TypeId find(const std::vector<uint32_t>& key) const;
    size_t size() const;

    // Used by the canonicaliser; `make_rep` runs only for new keys.
    template <typename MakeRep>
    TypeId intern(std::vector<uint32_t> key, MakeRep&& make_rep);

private:
    mutable std::mutex mu_;
    std::unordered_map<std::vector<uint32_t>, TypeId, VecHash> ids_;
    std::deque<TypeInfo> infos_;
};

using RegistryPtr = std::shared_ptr<TypeRegistry>;

// Canonical type of a neighbourhood: equal ids iff isomorphic by a map sending
// centres to centres in order.
TypeId canonicalize(const Neighbourhood& nb, TypeRegistry& reg);

// Canonical type of a fragment that is connected (caller guarantees it).
TypeId canonicalize_connected(const Fragment& f, std::span<const Element> centres, int radius,
                              TypeRegistry& reg);

// 1-based position in the representative ordering. Throws IndexOutOfRange.
uint32_t representative_element(const TypeInfo& t, uint32_t position);

// Lexicographically least centre-respecting isomorphism from nb onto the
// representative of t: result[v - 1] = representative position of local v.
// Throws TypeMismatch.
std::vector<uint32_t> embedding_into_representative(const Neighbourhood& nb, TypeId t,
                                                    TypeRegistry& reg);

// Connected components of the fragment's Gaifman graph; comp[v - 1] in
// [0, count), numbered by smallest local id.
int fragment_components(const Fragment& f, std::vector<int>& comp);

// Equitable colour refinement starting from "centres first". Colours are
// ranks, so isomorphic inputs get corresponding colourings.
std::vector<uint32_t> refined_colours(const Fragment& f, std::span<const Element> centres);

// Per-database memo of element types and short-range balls. This is the fast
// route to tuple types; extract_neighbourhood + canonicalize is the direct one.
class LocalTypeCache {
public:
    LocalTypeCache(const Database& db, int r, RegistryPtr reg);

    const Database& db() const { return *db_; }
    int radius() const { return r_; }
    TypeRegistry& registry() const { return *reg_; }
    const RegistryPtr& registry_ptr() const { return reg_; }

    TypeId element_type(Element a);
    // dist(a, b) <= 2r + 1, i.e. the r-balls touch or overlap.
    bool near(Element a, Element b);
    // group[i] = index of the r-connected group of position i, groups numbered
    // by first position. Returns the group count.
    int group_positions(std::span<const Element> t, std::vector<int>& group);
    TypeId tuple_type(std::span<const Element> t);

    const std::vector<Element>& ball(Element a, int radius);

private:
    const Database* db_;
    int r_;
    RegistryPtr reg_;
    std::vector<TypeId> elem_type_;
    std::vector<std::vector<Element>> ball_r_, ball_r1_;
    std::unordered_map<uint64_t, TypeId> pair_memo_;
    std::unordered_map<std::vector<uint32_t>, TypeId, VecHash> group_memo_;
    std::vector<int> scratch_group_;
};

template <typename MakeRep>
TypeId TypeRegistry::intern(std::vector<uint32_t> key, MakeRep&& make_rep) {
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = ids_.find(key);
        if (it != ids_.end()) return it->second;
    }
    TypeInfo info = make_rep();
    std::lock_guard<std::mutex> lk(mu_);
    auto it = ids_.find(key);
    if (it != ids_.end()) return it->second;
    TypeId id = static_cast<TypeId>(infos_.size());
    info.id = id;
    info.key = key;
    if (info.components.empty()) info.components.push_back(TypeComponent{{}, id});
    for (auto& c : info.components)
        if (c.type == kNoType) c.type = id;
    infos_.push_back(std::move(info));
    ids_.emplace(std::move(key), id);
    return id;
}

}  // namespace aqe
