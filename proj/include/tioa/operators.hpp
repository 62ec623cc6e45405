#pragma once

#include "tioa/model.hpp"
#include "tioa/semantics.hpp"

namespace tioa {

// Binary constructions on automata. Product locations are named "(l1,l2)".
// Operand clock names are kept when already disjoint; on any collision every
// clock of the left operand is prefixed "left." and of the right "right.".
Tioa conjunction(const Tioa& a1, const Tioa& a2);
Tioa composition(const Tioa& a1, const Tioa& a2);
Tioa quotient(const Tioa& t, const Tioa& s);

// Carrier-level versions. When an operand has been pruned, its admissible
// regions are threaded through to the product states; quotient refuses pruned
// operands because its rules read the operand invariants syntactically.
Spec conjunction(const Spec& s1, const Spec& s2);
Spec composition(const Spec& s1, const Spec& s2);
Spec quotient(const Spec& t, const Spec& s);

// The identity transformation: any removal of states or transitions shrinks
// the implementation set of some composition, so nothing can be dropped.
Spec cooperative_pruning(Spec s);

}  // namespace tioa
