//! Finite-instance measure theory on `2^H`.
//!
//! For a finite set of histories `b`, the subsets `a ⊆ b` index two bases
//! of the same `2^|b|`-dimensional space: the basic Scott-open sets
//! `B_a = {c | a ⊆ c}` and the atoms `A_ab = {c | c ∩ b = a}`. They are
//! related by the zeta matrix `E[b]` of subset inclusion and its Möbius
//! inverse.
//!
//! Subsets of an ordered basis `b = [h_0, …, h_{k-1}]` are indexed by bit
//! masks, `h_j` being bit `j`. In that order `a ⊆ c` implies
//! `mask(a) ≤ mask(c)`, so `E[b]` is unit upper triangular, and
//! `E[b] = E[{h_{k-1}}] ⊗ … ⊗ E[{h_0}]`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{HistSet, History};
use crate::prob::{format_rational, Dist, Rational};

pub const DEFAULT_BASIS_BOUND: usize = 12;

/// A finite, canonically ordered set of histories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteBasis {
    members: Vec<History>,
}

impl FiniteBasis {
    pub fn new(b: &HistSet) -> Result<Self> {
        Self::with_bound(b, DEFAULT_BASIS_BOUND)
    }

    pub fn with_bound(b: &HistSet, bound: usize) -> Result<Self> {
        if b.len() > bound {
            return Err(Error::Capacity {
                what: "basis size",
                got: b.len(),
                bound,
            });
        }
        Ok(FiniteBasis {
            members: b.iter().cloned().collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[History] {
        &self.members
    }

    /// Number of subsets, `2^|b|`.
    pub fn dim(&self) -> usize {
        1 << self.members.len()
    }

    pub fn as_set(&self) -> HistSet {
        HistSet::from_histories(self.members.clone())
    }

    /// The subset with the given mask.
    pub fn subset(&self, mask: usize) -> HistSet {
        self.members
            .iter()
            .enumerate()
            .filter(|(j, _)| mask >> j & 1 == 1)
            .map(|(_, h)| h.clone())
            .collect()
    }

    /// Mask of `a`, failing when `a ⊄ b`.
    pub fn mask_of(&self, a: &HistSet) -> Result<usize> {
        let mut mask = 0;
        for h in a {
            match self.members.binary_search(h) {
                Ok(j) => mask |= 1 << j,
                Err(_) => {
                    return Err(Error::Measure(format!(
                        "{h:?} is not a member of the basis"
                    )))
                }
            }
        }
        Ok(mask)
    }

    /// Mask of `s ∩ b`.
    fn trace_mask(&self, s: &HistSet) -> usize {
        self.members
            .iter()
            .enumerate()
            .filter(|(_, h)| s.contains(h))
            .fold(0, |m, (j, _)| m | 1 << j)
    }
}

/// A dense square rational matrix indexed by subset masks.
#[derive(Clone, PartialEq, Eq)]
pub struct SubsetMatrix {
    dim: usize,
    entries: Vec<Rational>,
}

impl SubsetMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = Rational::one();
        }
        m
    }

    pub fn diagonal(values: &[Rational]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m.entries[i * values.len() + i] = v.clone();
        }
        m
    }

    fn zeros(dim: usize) -> Self {
        SubsetMatrix {
            dim,
            entries: vec![Rational::zero(); dim * dim],
        }
    }

    /// Builds a matrix from rows of integers.
    pub fn from_rows(rows: &[&[i64]]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "matrix must be square");
            for (j, v) in row.iter().enumerate() {
                m.entries[i * dim + j] = Rational::from_integer((*v).into());
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &Rational {
        &self.entries[row * self.dim + col]
    }

    pub fn kronecker(&self, other: &SubsetMatrix) -> SubsetMatrix {
        let d = self.dim * other.dim;
        let mut m = Self::zeros(d);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.dim {
                    for l in 0..other.dim {
                        m.entries[(i * other.dim + k) * d + j * other.dim + l] = a * other.get(k, l);
                    }
                }
            }
        }
        m
    }

    pub fn mul(&self, other: &SubsetMatrix) -> SubsetMatrix {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut m = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        m.entries[i * d + j] += a * b;
                    }
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.dim, v.len());
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .filter(|&j| !self.get(i, j).is_zero())
                    .fold(Rational::zero(), |acc, j| acc + self.get(i, j) * &v[j])
            })
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim)
    }

    /// Upper triangular with ones on the diagonal, hence determinant 1.
    pub fn is_unit_upper_triangular(&self) -> bool {
        (0..self.dim).all(|i| {
            self.get(i, i).is_one() && (0..i).all(|j| self.get(i, j).is_zero())
        })
    }
}

impl fmt::Debug for SubsetMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|j| format_rational(self.get(i, j))).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn kronecker_power(b: &FiniteBasis, block: &SubsetMatrix) -> SubsetMatrix {
    let mut m = SubsetMatrix::identity(1);
    for _ in 0..b.len() {
        m = block.kronecker(&m);
    }
    m
}

/// `E[b]` with `E_ac = [a ⊆ c]`.
pub fn build_e(b: &FiniteBasis) -> SubsetMatrix {
    kronecker_power(b, &SubsetMatrix::from_rows(&[&[1, 1], &[0, 1]]))
}

/// `E[b]⁻¹` with entries `(−1)^|c−a| [a ⊆ c]`.
pub fn build_e_inv(b: &FiniteBasis) -> SubsetMatrix {
    kronecker_power(b, &SubsetMatrix::from_rows(&[&[1, -1], &[0, 1]]))
}

/// `μ(B_a)`: the mass of sets containing `a`.
pub fn measure_of_basic_open(mu: &Dist, a: &HistSet) -> Rational {
    mu.probability(|s| a.is_subset(s))
}

/// `μ(A_ab)` for `a ⊆ b`, computed both by inclusion-exclusion over the
/// basic opens `B_c` with `a ⊆ c ⊆ b` and directly from the support.
pub fn measure_of_atom(mu: &Dist, a: &HistSet, b: &FiniteBasis) -> Result<Rational> {
    let am = b.mask_of(a)?;
    let direct = mu.probability(|s| b.trace_mask(s) == am);
    let free = (b.dim() - 1) & !am;
    let mut incl_excl = Rational::zero();
    let mut extra = free;
    loop {
        let term = measure_of_basic_open(mu, &b.subset(am | extra));
        if extra.count_ones().is_multiple_of(2) {
            incl_excl += term;
        } else {
            incl_excl -= term;
        }
        if extra == 0 {
            break;
        }
        extra = (extra - 1) & free;
    }
    assert_eq!(direct, incl_excl, "inclusion-exclusion disagrees with the support sum");
    Ok(direct)
}

/// Outcome of [`correspondence_check`].
#[derive(Debug, Clone)]
pub struct CorrespondenceReport {
    /// `X_a = μ(B_a)`, indexed by subset mask.
    pub x: Vec<Rational>,
    /// `Y_a = μ(A_ab)`, indexed by subset mask.
    pub y: Vec<Rational>,
    /// First failed identity, if any.
    pub discrepancy: Option<String>,
}

impl CorrespondenceReport {
    pub fn passed(&self) -> bool {
        self.discrepancy.is_none()
    }
}

/// Checks `X = E[b]·Y`, `Y = E[b]⁻¹·X`, and `N[b] = E[b]⁻¹·M[b]·E[b]`
/// where `M` is the diagonal of `X` and `N_ac = μ(A_ac)` for `a ⊆ c ⊆ b`.
pub fn correspondence_check(mu: &Dist, b: &FiniteBasis) -> CorrespondenceReport {
    let dim = b.dim();
    let x: Vec<Rational> = (0..dim).map(|m| measure_of_basic_open(mu, &b.subset(m))).collect();
    let mut y = vec![Rational::zero(); dim];
    for (s, w) in mu.iter() {
        y[b.trace_mask(s)] += w;
    }
    let e = build_e(b);
    let e_inv = build_e_inv(b);
    let mut report = CorrespondenceReport {
        x: x.clone(),
        y: y.clone(),
        discrepancy: None,
    };

    let ey = e.mul_vec(&y);
    if let Some(i) = (0..dim).find(|&i| ey[i] != x[i]) {
        report.discrepancy = Some(format!(
            "X ≠ E·Y at {:?}: {} vs {}",
            b.subset(i),
            format_rational(&x[i]),
            format_rational(&ey[i])
        ));
        return report;
    }
    let ex = e_inv.mul_vec(&x);
    if let Some(i) = (0..dim).find(|&i| ex[i] != y[i]) {
        report.discrepancy = Some(format!(
            "Y ≠ E⁻¹·X at {:?}: {} vs {}",
            b.subset(i),
            format_rational(&y[i]),
            format_rational(&ex[i])
        ));
        return report;
    }
    if let Some(i) = (0..dim).find(|&i| x[i].is_negative() || x[i] > Rational::one()) {
        report.discrepancy = Some(format!("M entry at {:?} outside [0, 1]", b.subset(i)));
        return report;
    }

    let n = e_inv.mul(&SubsetMatrix::diagonal(&x)).mul(&e);
    for a in 0..dim {
        for c in 0..dim {
            let expected = if a & !c == 0 {
                // μ(A_ac): the mass of sets whose trace on c is exactly a.
                mu.probability(|s| b.trace_mask(s) & c == a)
            } else {
                Rational::zero()
            };
            let got = n.get(a, c);
            if *got != expected || got.is_negative() {
                report.discrepancy = Some(format!(
                    "N ≠ E⁻¹·M·E at ({:?}, {:?}): expected {}, got {}",
                    b.subset(a),
                    b.subset(c),
                    format_rational(&expected),
                    format_rational(got)
                ));
                return report;
            }
        }
    }
    report
}

/// Outcome of [`extension_check`].
#[derive(Debug, Clone)]
pub struct ExtensionReport {
    /// Inclusion-exclusion value of every atom `A_ab`, indexed by mask.
    pub atoms: Vec<Rational>,
    /// Subsets `a` whose atom value is negative.
    pub violations: Vec<HistSet>,
}

impl ExtensionReport {
    pub fn extends(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Decides whether values assigned to the basic opens `B_a`, `a ⊆ b`, come
/// from a probability measure: every atom value
/// `Σ_{a⊆c⊆b} (−1)^|c−a| vals(B_c)` must be nonnegative.
pub fn extension_check(b: &FiniteBasis, vals: &BTreeMap<HistSet, Rational>) -> Result<ExtensionReport> {
    let dim = b.dim();
    let mut x = Vec::with_capacity(dim);
    for m in 0..dim {
        let a = b.subset(m);
        let v = vals
            .get(&a)
            .ok_or_else(|| Error::Measure(format!("no value given for B_{a:?}")))?;
        x.push(v.clone());
    }
    for k in vals.keys() {
        b.mask_of(k)?;
    }
    if !x[0].is_one() {
        return Err(Error::Measure(format!(
            "value of B_∅ must be 1, got {}",
            format_rational(&x[0])
        )));
    }
    // In-place Möbius transform over the subset lattice.
    let mut atoms = x;
    for j in 0..b.len() {
        for m in 0..dim {
            if m >> j & 1 == 0 {
                let hi = atoms[m | 1 << j].clone();
                atoms[m] -= hi;
            }
        }
    }
    let violations = (0..dim)
        .filter(|&m| atoms[m].is_negative())
        .map(|m| b.subset(m))
        .collect();
    Ok(ExtensionReport { atoms, violations })
}

/// `μ|b`: the pushforward of `μ` along `s ↦ s ∩ b`.
pub fn restrict(mu: &Dist, b: &HistSet) -> Dist {
    mu.map(|s| s.intersection(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FieldSchema, Packet};
    use crate::prob::ratio;

    fn hist(v: u32) -> History {
        let s = FieldSchema::from_ranges(&[("sw", 0, 15), ("pt", 0, 0)]).unwrap();
        History::singleton(&Packet::from_pairs(&s, &[("sw", v)]).unwrap())
    }

    fn set(vs: &[u32]) -> HistSet {
        vs.iter().map(|&v| hist(v)).collect()
    }

    #[test]
    fn two_element_matrices() {
        let b = FiniteBasis::new(&set(&[1, 2])).unwrap();
        assert_eq!(
            build_e(&b),
            SubsetMatrix::from_rows(&[&[1, 1, 1, 1], &[0, 1, 0, 1], &[0, 0, 1, 1], &[0, 0, 0, 1]])
        );
        assert_eq!(
            build_e_inv(&b),
            SubsetMatrix::from_rows(&[&[1, -1, -1, 1], &[0, 1, 0, -1], &[0, 0, 1, -1], &[0, 0, 0, 1]])
        );
        let empty = FiniteBasis::new(&HistSet::empty()).unwrap();
        assert_eq!(build_e(&empty), SubsetMatrix::identity(1));
    }

    #[test]
    fn zeta_entries_are_subset_inclusion() {
        let b = FiniteBasis::new(&set(&[1, 2, 3])).unwrap();
        let e = build_e(&b);
        let ei = build_e_inv(&b);
        for a in 0..8usize {
            for c in 0..8usize {
                let sub = a & !c == 0;
                assert_eq!(*e.get(a, c), ratio(sub as i64, 1));
                let sign = if (c & !a).count_ones() % 2 == 0 { 1 } else { -1 };
                assert_eq!(*ei.get(a, c), ratio(if sub { sign } else { 0 }, 1));
            }
        }
        assert!(e.is_unit_upper_triangular());
        assert!(e.mul(&ei).is_identity());
    }

    #[test]
    fn atoms_of_point_mass() {
        let b = FiniteBasis::new(&set(&[1, 2])).unwrap();
        let mu = Dist::dirac(set(&[1, 3]));
        assert_eq!(measure_of_atom(&mu, &set(&[1]), &b).unwrap(), ratio(1, 1));
        assert_eq!(measure_of_atom(&mu, &set(&[]), &b).unwrap(), ratio(0, 1));
        assert!(measure_of_atom(&mu, &set(&[3]), &b).is_err());
        assert_eq!(measure_of_basic_open(&mu, &HistSet::empty()), ratio(1, 1));
        assert_eq!(measure_of_basic_open(&mu, &set(&[2])), ratio(0, 1));
    }

    #[test]
    fn forced_negative_atom() {
        let b = FiniteBasis::new(&set(&[1])).unwrap();
        let vals = BTreeMap::from([(HistSet::empty(), ratio(1, 1)), (set(&[1]), ratio(2, 1))]);
        let r = extension_check(&b, &vals).unwrap();
        assert!(!r.extends());
        assert_eq!(r.violations, vec![HistSet::empty()]);
        assert_eq!(r.atoms[0], ratio(-1, 1));
        let missing = BTreeMap::from([(HistSet::empty(), ratio(1, 1))]);
        assert!(extension_check(&b, &missing).is_err());
    }

    #[test]
    fn restriction_basics() {
        let mu = Dist::from_weights([(set(&[1, 2]), ratio(1, 3)), (set(&[3]), ratio(2, 3))]).unwrap();
        assert_eq!(restrict(&mu, &HistSet::empty()), Dist::dirac(HistSet::empty()));
        assert_eq!(restrict(&Dist::dirac(set(&[1, 2])), &set(&[2, 3])), Dist::dirac(set(&[2])));
        let r = restrict(&mu, &set(&[1, 3]));
        assert_eq!(r.weight(&set(&[1])), ratio(1, 3));
        assert_eq!(r.weight(&set(&[3])), ratio(2, 3));
    }

    #[test]
    fn capacity_bound() {
        let big = set(&(0..13).collect::<Vec<_>>());
        assert!(matches!(FiniteBasis::new(&big), Err(Error::Capacity { .. })));
    }
}
