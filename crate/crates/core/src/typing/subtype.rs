use crate::syntax::{Capability, Type};

/// `s ≤ u` in the subtyping preorder generated by the capability rules.
///
/// Input capabilities are covariant in the payload and may only lower the
/// level; output capabilities are contravariant in the payload and may only
/// raise it; `#` is related to itself alone, by equality.
pub fn subtype(s: &Type, u: &Type) -> bool {
    match (s, u) {
        (Type::Unit, Type::Unit) | (Type::Nat, Type::Nat) => true,
        (
            Type::Chan {
                cap: c1,
                level: k1,
                payload: p1,
            },
            Type::Chan {
                cap: c2,
                level: k2,
                payload: p2,
            },
        ) => {
            if p1.len() != p2.len() {
                return false;
            }
            match c2 {
                Capability::In => {
                    c1.allows_input() && k1 >= k2 && p1.iter().zip(p2).all(|(a, b)| subtype(a, b))
                }
                Capability::Out => {
                    c1.allows_output() && k1 <= k2 && p1.iter().zip(p2).all(|(a, b)| subtype(b, a))
                }
                Capability::Sharp => *c1 == Capability::Sharp && k1 == k2 && p1 == p2,
            }
        }
        _ => false,
    }
}
