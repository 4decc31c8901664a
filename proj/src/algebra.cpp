#include "qref/algebra.hpp"

#include <algorithm>
#include <set>

#include "qref/errors.hpp"

namespace qref {

namespace {

// Union of already-flattened dependency sets, kept sorted and unique.
std::vector<GenId> merge_deps(const std::vector<std::vector<GenId>>& sets) {
    std::set<GenId> acc;
    for (const auto& s : sets) acc.insert(s.begin(), s.end());
    return {acc.begin(), acc.end()};
}

} // namespace

GenId AlgebraSignature::add(GeneratorDecl d) {
    if (by_name_.count(d.name))
        throw AlgebraError("generator '" + d.name + "' declared twice");
    d.id = static_cast<GenId>(gens_.size());
    if (d.family < 0) d.family = d.id;
    by_name_[d.name] = d.id;
    gens_.push_back(std::move(d));
    return gens_.back().id;
}

std::pair<GenId, GenId> AlgebraSignature::add_pair(const std::string& q, const std::string& p) {
    GeneratorDecl dq;
    dq.name = q;
    dq.kind = GenKind::Position;
    GenId qi = add(dq);
    GeneratorDecl dp;
    dp.name = p;
    dp.kind = GenKind::Momentum;
    GenId pi = add(dp);
    gens_[qi].partner = pi;
    gens_[pi].partner = qi;
    gens_[qi].depends = {qi};
    gens_[pi].depends = {pi};
    return {qi, pi};
}

GenId AlgebraSignature::declare_inverse_letter(GenId base) {
    GeneratorDecl d;
    d.name = "inv(" + gens_[base].name + ")";
    d.kind = GenKind::Inverse;
    d.inverse_of = base;
    d.star = gens_[base].star;
    d.depends = gens_[base].depends;
    d.family = gens_[base].family;
    d.role = 1;
    GenId id = add(d);
    gens_[base].inverse_id = id;
    // Both cancellation orders rewrite to the empty word.
    product_rules_[{base, id}] = RawPoly{{Scalar::one(), Word{}}};
    product_rules_[{id, base}] = RawPoly{{Scalar::one(), Word{}}};
    return id;
}

GenId AlgebraSignature::declare_invertible(const std::string& name) {
    GenId id = find(name);
    GeneratorDecl& d = gens_[id];
    if (d.kind == GenKind::Inverse) {
        throw AlgebraError("'" + name + "' is already an inverse letter");
    }
    if (d.invertible && d.inverse_id >= 0) return d.inverse_id;
    d.invertible = true;
    return declare_inverse_letter(id);
}

GenId AlgebraSignature::add_formal(const std::string& name, bool invertible,
                                   std::vector<std::string> depends, Star star) {
    std::vector<std::vector<GenId>> sets;
    for (const auto& dep : depends) sets.push_back(gens_[find(dep)].depends);
    GeneratorDecl d;
    d.name = name;
    d.kind = GenKind::Formal;
    d.star = star;
    d.invertible = invertible;
    d.depends = merge_deps(sets);
    GenId id = add(d);
    if (invertible) declare_inverse_letter(id);
    return id;
}

GenId AlgebraSignature::add_function(const std::string& name, const std::string& base,
                                     const std::string& derivative, bool invertible) {
    GenId b = find(base);
    if (gens_[b].kind != GenKind::Position && gens_[b].kind != GenKind::Momentum)
        throw AlgebraError("function '" + name + "' needs a canonical argument, got '" + base + "'");
    GeneratorDecl d;
    d.name = name;
    d.kind = GenKind::Function;
    d.base = b;
    d.invertible = invertible;
    d.depends = {b};
    GenId id = add(d);
    GenId dvId = find_optional(derivative);
    if (dvId < 0) {
        GeneratorDecl dv;
        dv.name = derivative;
        dv.kind = GenKind::Formal;
        dv.depends = {b};
        dvId = add(dv);
    }
    derivative_[id] = RawPoly{{Scalar::one(), Word{dvId}}};
    if (invertible) declare_inverse_letter(id);
    return id;
}

GenId AlgebraSignature::add_composite_inverse(const std::string& name, const std::string& base,
                                              const Scalar& c0, const Scalar& c1) {
    if (!c0.is_real() || !c1.is_real() || c1.is_zero())
        throw AlgebraError("composite inverse needs real coefficients and c1 != 0");
    GenId b = find(base);
    if (gens_[b].kind != GenKind::Position && gens_[b].kind != GenKind::Momentum)
        throw AlgebraError("composite inverse of '" + base + "': base must be canonical");
    GeneratorDecl d;
    d.name = name;
    d.kind = GenKind::Function;
    d.base = b;
    d.depends = {b};
    d.family = b;
    d.role = 1;
    GenId u = add(d);
    // d/d(base) (c0 + c1*base)^-1 = -c1 * u^2
    derivative_[u] = RawPoly{{-c1, Word{u, u}}};
    // base*u = u*base = (1 - c0*u)/c1, so (c0 + c1*base)*u collapses to 1.
    Scalar inv_c1 = c1.inverse();
    RawPoly compress{{inv_c1, Word{}}, {-(c0 * inv_c1), Word{u}}};
    product_rules_[{b, u}] = compress;
    product_rules_[{u, b}] = compress;
    composites_.push_back({u, b, c0, c1});
    return u;
}

void AlgebraSignature::declare_commutator(const std::string& a, const std::string& b,
                                          RawPoly value) {
    GenId ia = find(a);
    GenId ib = find(b);
    if (ia == ib) throw AlgebraError("cannot declare [x, x]");
    if (ia > ib) {
        std::swap(ia, ib);
        for (auto& t : value) t.c = -t.c;
    }
    comm_table_[{ia, ib}] = std::move(value);
}

GenId AlgebraSignature::find(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw UnknownGenerator("unknown generator '" + name + "'");
    return it->second;
}

GenId AlgebraSignature::find_optional(const std::string& name) const {
    auto it = by_name_.find(name);
    return it == by_name_.end() ? -1 : it->second;
}

const GeneratorDecl& AlgebraSignature::decl(GenId id) const {
    if (id < 0 || id >= size()) throw UnknownGenerator("generator id out of range");
    return gens_[id];
}

const RawPoly* AlgebraSignature::product_rule(GenId a, GenId b) const {
    auto it = product_rules_.find({a, b});
    return it == product_rules_.end() ? nullptr : &it->second;
}

bool AlgebraSignature::commutator_declared(GenId a, GenId b) const {
    if (a > b) std::swap(a, b);
    return comm_table_.count({a, b}) != 0;
}

const RawPoly* AlgebraSignature::declared_commutator(GenId a, GenId b) const {
    if (a > b) std::swap(a, b);
    auto it = comm_table_.find({a, b});
    return it == comm_table_.end() ? nullptr : &it->second;
}

const RawPoly* AlgebraSignature::derivative_rule(GenId fn) const {
    auto it = derivative_.find(fn);
    return it == derivative_.end() ? nullptr : &it->second;
}

const std::vector<GenId>& AlgebraSignature::dependency_set(GenId id) const {
    return decl(id).depends;
}

} // namespace qref
