//! Monomial words over the operator list {1, ρ, lab effects, target
//! effects} with the canonicalization the sampled relaxation relies on:
//! side-A and side-B operators commute across the tensor split, target
//! projectors of one setting are idempotent and mutually annihilating, and ρ
//! is idempotent because every sampled state is pure.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Symbol {
    Rho,
    Lab { side: Side, setting: usize, outcome: usize },
    /// `group` 0 is the scenario's own targets; higher groups are the extra
    /// target lists used for additional witness constraints.
    Target { side: Side, setting: usize, outcome: usize, group: usize },
}

impl Symbol {
    pub fn side(&self) -> Option<Side> {
        match self {
            Symbol::Rho => None,
            Symbol::Lab { side, .. } | Symbol::Target { side, .. } => Some(*side),
        }
    }
}

/// A canonical product of symbols; the empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(pub Vec<Symbol>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }
}

/// Canonicalize a raw product. Returns None when the word annihilates
/// (orthogonal projectors of the same setting meet). With
/// `labs_projective` the lab effects are treated as projectors too, which is
/// only sound when the basis is sampled from projective strategies.
pub fn canonicalize_with(raw: &[Symbol], labs_projective: bool) -> Option<Word> {
    let mut w: Vec<Symbol> = raw.to_vec();
    loop {
        let mut changed = false;
        // commute side-B symbols past side-A symbols within ρ-free segments
        let mut i = 0;
        while i + 1 < w.len() {
            let (l, r) = (w[i], w[i + 1]);
            if l.side() == Some(Side::B) && r.side() == Some(Side::A) {
                w.swap(i, i + 1);
                changed = true;
            }
            i += 1;
        }
        // idempotence and annihilation
        let mut i = 0;
        while i + 1 < w.len() {
            let (l, r) = (w[i], w[i + 1]);
            match (l, r) {
                (Symbol::Rho, Symbol::Rho) => {
                    w.remove(i + 1);
                    changed = true;
                    continue;
                }
                (
                    Symbol::Target { side: s1, setting: x1, outcome: a1, group: g1 },
                    Symbol::Target { side: s2, setting: x2, outcome: a2, group: g2 },
                ) if s1 == s2 && x1 == x2 && g1 == g2 => {
                    if a1 == a2 {
                        w.remove(i + 1);
                        changed = true;
                        continue;
                    }
                    return None;
                }
                (
                    Symbol::Lab { side: s1, setting: x1, outcome: a1 },
                    Symbol::Lab { side: s2, setting: x2, outcome: a2 },
                ) if labs_projective && s1 == s2 && x1 == x2 => {
                    if a1 == a2 {
                        w.remove(i + 1);
                        changed = true;
                        continue;
                    }
                    return None;
                }
                _ => {}
            }
            i += 1;
        }
        if !changed {
            break;
        }
    }
    Some(Word(w))
}

/// POVM-lab canonicalization (no lab shortening).
pub fn canonicalize(raw: &[Symbol]) -> Option<Word> {
    canonicalize_with(raw, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lab_a(x: usize, a: usize) -> Symbol {
        Symbol::Lab { side: Side::A, setting: x, outcome: a }
    }

    fn lab_b(y: usize, b: usize) -> Symbol {
        Symbol::Lab { side: Side::B, setting: y, outcome: b }
    }

    fn tgt_a(x: usize, a: usize) -> Symbol {
        Symbol::Target { side: Side::A, setting: x, outcome: a, group: 0 }
    }

    #[test]
    fn commutes_across_split() {
        let w = canonicalize(&[lab_b(0, 0), lab_a(1, 1)]).unwrap();
        assert_eq!(w.0, vec![lab_a(1, 1), lab_b(0, 0)]);
        // ρ blocks the exchange
        let w = canonicalize(&[lab_b(0, 0), Symbol::Rho, lab_a(1, 1)]).unwrap();
        assert_eq!(w.0, vec![lab_b(0, 0), Symbol::Rho, lab_a(1, 1)]);
    }

    #[test]
    fn projectivity_shortens() {
        let w = canonicalize(&[tgt_a(0, 1), tgt_a(0, 1)]).unwrap();
        assert_eq!(w.degree(), 1);
        assert!(canonicalize(&[tgt_a(0, 0), tgt_a(0, 1)]).is_none());
        // different settings do not interact
        let w = canonicalize(&[tgt_a(0, 0), tgt_a(1, 1)]).unwrap();
        assert_eq!(w.degree(), 2);
    }

    #[test]
    fn rho_idempotent() {
        let w = canonicalize(&[Symbol::Rho, Symbol::Rho, lab_a(0, 0)]).unwrap();
        assert_eq!(w.0, vec![Symbol::Rho, lab_a(0, 0)]);
    }

    #[test]
    fn chained_reduction() {
        // B A Ã Ã → A Ã B after commuting, target pair collapses
        let w = canonicalize(&[lab_b(0, 0), lab_a(0, 0), tgt_a(0, 1), tgt_a(0, 1)]).unwrap();
        assert_eq!(w.0, vec![lab_a(0, 0), tgt_a(0, 1), lab_b(0, 0)]);
    }
}
