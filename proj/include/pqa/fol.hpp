#pragma once

// Surface syntax of the dataset's "premises-FOL" field.
//
//   formula  := disj ( "->" formula )?          right-associative
//   disj     := conj ( "OR" conj )*             left-associative
//   conj     := unary ( "AND" unary )*          left-associative
//   unary    := "NOT" unary | primary
//   primary  := "ForAll" "(" ident "," formula ")"
//             | "Exists" "(" ident "," formula ")"
//             | ident "(" ident ")"
//             | "(" formula ")"
//
// An argument is a variable when an enclosing quantifier binds it and a
// constant otherwise.

#include <string>
#include <string_view>

#include "pqa/formula.hpp"

namespace pqa {

// Throws SyntaxError or ArityError.
Formula parse_formula(std::string_view text);

// Canonical printer. Operands of binary connectives are parenthesized when
// they are themselves binary; quantifier bodies and the top level are not.
// Bound variables are renamed to x, y, z, ... by binder depth.
std::string render_fol(const Formula& f);

// Renames bound variables to x, y, z, ... by binder depth, avoiding any
// constant names in `f`.
Formula canonicalize_bound_vars(const Formula& f);

// Negation normal form: implications eliminated, negations only on atoms.
Formula to_nnf(const Formula& f);

}  // namespace pqa
