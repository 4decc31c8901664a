#pragma once

#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "qref/scalar.hpp"

namespace qref {

using GenId = int;

// A word is a product of generator letters, left to right.
using Word = std::vector<GenId>;

// Unnormalized term/polynomial: input form for the normal-ordering engine and
// storage form for declared rewrite rules (no ordering invariant implied).
struct RawTerm {
    Scalar c;
    Word w;
};
using RawPoly = std::vector<RawTerm>;

enum class GenKind {
    Position,  // canonical configuration letter
    Momentum,  // canonical conjugate letter
    Formal,    // opaque hermitian (or anti-hermitian) letter
    Function,  // opaque function of a single canonical letter, with a derivative rule
    Inverse,   // formal inverse of an invertible letter
};

enum class Star { Hermitian, AntiHermitian };

struct GeneratorDecl {
    GenId id = -1;
    std::string name;
    GenKind kind = GenKind::Formal;
    Star star = Star::Hermitian;
    bool invertible = false;
    GenId partner = -1;     // canonical letters: the conjugate letter
    GenId inverse_of = -1;  // Inverse letters: the base letter
    GenId inverse_id = -1;  // invertible letters: their Inverse letter
    GenId base = -1;        // Function letters: the argument letter
    std::vector<GenId> depends;  // Formal letters: canonical letters they are functions of

    // Normal words sort by (family, role, id): any letter that carries a
    // cancellation or compression rule against a base letter sorts directly
    // after that base, so the interacting pair is always adjacent.
    GenId family = -1;
    int role = 0;
};

// A declared invertible affine combination c0 + c1*base (base canonical),
// realized by a Function letter u with u*(c0+c1*base) = 1.
struct CompositeInverse {
    GenId u = -1;
    GenId base = -1;
    Scalar c0;
    Scalar c1;
};

// Generator alphabet plus every declared commutation/rewrite fact.
// Immutable once handed out in a shared_ptr<const AlgebraSignature>; the
// declaration order fixes the normal-ordering of words (ids ascend).
class AlgebraSignature {
  public:
    // [q, p] = i*hbar; q gets the smaller id.
    std::pair<GenId, GenId> add_pair(const std::string& q, const std::string& p);

    GenId add_formal(const std::string& name, bool invertible = false,
                     std::vector<std::string> depends = {},
                     Star star = Star::Hermitian);

    // Opaque function of one canonical letter; the derivative letter is declared
    // as a Formal with the same dependency if it does not exist yet.
    GenId add_function(const std::string& name, const std::string& base,
                       const std::string& derivative, bool invertible = false);

    // u = (c0 + c1*base)^-1 with real c0, c1 and canonical base.
    GenId add_composite_inverse(const std::string& name, const std::string& base,
                                const Scalar& c0, const Scalar& c1);

    // Declares [a, b]; an empty poly declares the commutator to vanish
    // (distinct from leaving it undeclared).
    void declare_commutator(const std::string& a, const std::string& b, RawPoly value);

    // Marks an already-declared generator invertible, creating its inverse
    // letter. Returns the id of that letter.
    GenId declare_invertible(const std::string& name);

    GenId find(const std::string& name) const;
    GenId find_optional(const std::string& name) const;  // -1 if absent
    const GeneratorDecl& decl(GenId id) const;
    int size() const { return static_cast<int>(gens_.size()); }

    const std::vector<GeneratorDecl>& generators() const { return gens_; }
    const std::vector<CompositeInverse>& composites() const { return composites_; }

    // Engine hooks.
    const RawPoly* product_rule(GenId a, GenId b) const;
    bool commutator_declared(GenId a, GenId b) const;
    const RawPoly* declared_commutator(GenId a, GenId b) const;  // key (min,max)
    const RawPoly* derivative_rule(GenId fn) const;

    // Letters the generator is a function of, for the default-commutation test.
    const std::vector<GenId>& dependency_set(GenId id) const;

  private:
    GenId add(GeneratorDecl d);
    GenId declare_inverse_letter(GenId base);

    std::vector<GeneratorDecl> gens_;
    std::map<std::string, GenId> by_name_;
    std::map<std::pair<GenId, GenId>, RawPoly> comm_table_;
    std::map<std::pair<GenId, GenId>, RawPoly> product_rules_;
    std::map<GenId, RawPoly> derivative_;
    std::vector<CompositeInverse> composites_;
    std::vector<GenId> empty_deps_;
};

using SignaturePtr = std::shared_ptr<const AlgebraSignature>;

// Sort key for normal ordering; see GeneratorDecl::family.
inline std::tuple<GenId, int, GenId> letter_order_key(const AlgebraSignature& sig, GenId g) {
    const GeneratorDecl& d = sig.decl(g);
    return {d.family, d.role, g};
}

} // namespace qref
