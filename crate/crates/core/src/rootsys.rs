//! The type-C_{n+1} root system of sp_{2n+2}: roots as integer coefficient
//! vectors over the ε-basis, closed subsets, closure, and the wide-subset
//! criterion `[T ∪ (−T)] = Φ`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A root of C_{rank}. Entry `k` is the coefficient of ε_{k+1}.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Root {
    coeffs: Vec<i32>,
}

impl Root {
    /// Validates that `coeffs` is one of ±(e_k − e_l), ±(e_k + e_l), ±2e_k.
    pub fn new(coeffs: Vec<i32>) -> Result<Self> {
        let nonzero: Vec<(usize, i32)> = coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (i, c))
            .collect();
        let ok = match nonzero.as_slice() {
            [(_, c)] => c.abs() == 2,
            [(_, a), (_, b)] => a.abs() == 1 && b.abs() == 1,
            _ => false,
        };
        if ok {
            Ok(Root { coeffs })
        } else {
            Err(Error::InvalidRoot(format!("{coeffs:?}")))
        }
    }

    /// ε_k − ε_l (1-based indices).
    pub fn diff(rank: usize, k: usize, l: usize) -> Result<Self> {
        Self::from_terms(rank, &[(k, 1), (l, -1)])
    }

    /// ε_k + ε_l (1-based indices).
    pub fn sum(rank: usize, k: usize, l: usize) -> Result<Self> {
        Self::from_terms(rank, &[(k, 1), (l, 1)])
    }

    /// 2ε_k (1-based).
    pub fn long(rank: usize, k: usize) -> Result<Self> {
        Self::from_terms(rank, &[(k, 2)])
    }

    fn from_terms(rank: usize, terms: &[(usize, i32)]) -> Result<Self> {
        let mut c = vec![0; rank];
        for &(k, v) in terms {
            if k == 0 || k > rank {
                return Err(Error::InvalidRoot(format!("index {k} outside rank {rank}")));
            }
            c[k - 1] += v;
        }
        Root::new(c)
    }

    pub fn coeffs(&self) -> &[i32] {
        &self.coeffs
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    pub fn neg(&self) -> Root {
        Root {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    /// Vector sum when it is itself a root.
    pub fn checked_add(&self, other: &Root) -> Option<Root> {
        if self.rank() != other.rank() {
            return None;
        }
        let c = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Root::new(c).ok()
    }

    /// Pairing with a diagonal Cartan element `diag(t_1..t_{n+1})`.
    pub fn eval(&self, t: &[i64]) -> i64 {
        self.coeffs.iter().zip(t).map(|(&c, &x)| c as i64 * x).sum()
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &c) in self.coeffs.iter().enumerate() {
            match c {
                0 => {}
                1 => write!(f, "+e{}", i + 1)?,
                -1 => write!(f, "-e{}", i + 1)?,
                2 => write!(f, "2e{}", i + 1)?,
                -2 => write!(f, "-2e{}", i + 1)?,
                _ => unreachable!("validated at construction"),
            }
        }
        Ok(())
    }
}

impl Root {
    /// Parses `"+e1-e3"`, `"2e2"`, `"-2e1"` in an ambient rank.
    pub fn parse(s: &str, rank: usize) -> Result<Root> {
        let bad = || Error::InvalidRoot(s.to_string());
        let mut coeffs = vec![0i32; rank];
        let mut rest = s.trim();
        if rest.is_empty() {
            return Err(bad());
        }
        while !rest.is_empty() {
            let (sign, tail) = match rest.as_bytes()[0] {
                b'+' => (1, &rest[1..]),
                b'-' => (-1, &rest[1..]),
                _ => (1, rest),
            };
            let (mult, tail) = match tail.strip_prefix('2') {
                Some(t) => (2, t),
                None => (1, tail),
            };
            let tail = tail.strip_prefix('e').ok_or_else(bad)?;
            let digits = tail.bytes().take_while(u8::is_ascii_digit).count();
            let idx: usize = tail[..digits].parse().map_err(|_| bad())?;
            if idx == 0 || idx > rank {
                return Err(bad());
            }
            coeffs[idx - 1] += sign * mult;
            rest = &tail[digits..];
        }
        let root = Root::new(coeffs).map_err(|_| bad())?;
        // Reject non-canonical spellings such as "-e3+e1".
        if root.to_string() != s.trim() {
            return Err(bad());
        }
        Ok(root)
    }
}

impl FromStr for Root {
    type Err = Error;

    /// Parses with the rank inferred from the largest index mentioned.
    fn from_str(s: &str) -> Result<Root> {
        let max_idx = s
            .split('e')
            .skip(1)
            .filter_map(|t| {
                let d: String = t.chars().take_while(char::is_ascii_digit).collect();
                d.parse::<usize>().ok()
            })
            .max()
            .unwrap_or(1);
        Root::parse(s, max_idx.max(1))
    }
}

/// A finite set of roots of C_{ambient_rank}, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootSubset {
    ambient_rank: usize,
    members: BTreeSet<Root>,
}

impl RootSubset {
    pub fn empty(ambient_rank: usize) -> Self {
        RootSubset {
            ambient_rank,
            members: BTreeSet::new(),
        }
    }

    pub fn from_roots(ambient_rank: usize, roots: impl IntoIterator<Item = Root>) -> Result<Self> {
        let mut s = Self::empty(ambient_rank);
        for r in roots {
            s.insert(r)?;
        }
        Ok(s)
    }

    pub fn insert(&mut self, r: Root) -> Result<bool> {
        if r.rank() != self.ambient_rank {
            return Err(Error::InvalidRoot(format!(
                "{r} has rank {} but ambient rank is {}",
                r.rank(),
                self.ambient_rank
            )));
        }
        Ok(self.members.insert(r))
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, r: &Root) -> bool {
        self.members.contains(r)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Root> {
        self.members.iter()
    }

    pub fn is_subset(&self, other: &RootSubset) -> bool {
        self.ambient_rank == other.ambient_rank && self.members.is_subset(&other.members)
    }

    pub fn union(&self, other: &RootSubset) -> RootSubset {
        RootSubset {
            ambient_rank: self.ambient_rank,
            members: self.members.union(&other.members).cloned().collect(),
        }
    }

    pub fn negated(&self) -> RootSubset {
        RootSubset {
            ambient_rank: self.ambient_rank,
            members: self.members.iter().map(Root::neg).collect(),
        }
    }

    /// Serialized member strings, sorted as strings.
    pub fn to_strings(&self) -> Vec<String> {
        let mut v: Vec<String> = self.members.iter().map(|r| r.to_string()).collect();
        v.sort();
        v
    }
}

impl Serialize for RootSubset {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RootSubset {
    /// The ambient rank is taken as the largest index mentioned; use
    /// [`RootSubset::parse_json`] to fix it explicitly.
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let strings = Vec::<String>::deserialize(d)?;
        let rank = strings
            .iter()
            .filter_map(|s| s.parse::<Root>().ok())
            .map(|r| r.rank())
            .max()
            .unwrap_or(1);
        RootSubset::from_strings(&strings, rank).map_err(serde::de::Error::custom)
    }
}

impl RootSubset {
    pub fn from_strings(strings: &[String], rank: usize) -> Result<Self> {
        RootSubset::from_roots(
            rank,
            strings.iter().map(|s| Root::parse(s, rank)).collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn parse_json(json: &str, rank: usize) -> Result<Self> {
        let strings: Vec<String> =
            serde_json::from_str(json).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        Self::from_strings(&strings, rank)
    }
}

/// Φ of C_{n+1}: ±(ε_k ∓ ε_l) for k < l and ±2ε_k; 2(n+1)² roots.
pub fn build_phi(n: usize) -> Result<RootSubset> {
    if n == 0 {
        return Err(Error::InvalidParameter("rank parameter n must be at least 1".into()));
    }
    let r = n + 1;
    let mut phi = RootSubset::empty(r);
    for k in 1..=r {
        for l in (k + 1)..=r {
            let d = Root::diff(r, k, l)?;
            let s = Root::sum(r, k, l)?;
            phi.insert(d.neg())?;
            phi.insert(d)?;
            phi.insert(s.neg())?;
            phi.insert(s)?;
        }
        let long = Root::long(r, k)?;
        phi.insert(long.neg())?;
        phi.insert(long)?;
    }
    Ok(phi)
}

/// Simple roots α_k = ε_k − ε_{k+1} (k ≤ n) and α_{n+1} = 2ε_{n+1}.
pub fn simple_roots(n: usize) -> Result<Vec<Root>> {
    let r = n + 1;
    let mut v: Vec<Root> = (1..r).map(|k| Root::diff(r, k, k + 1)).collect::<Result<_>>()?;
    v.push(Root::long(r, r)?);
    Ok(v)
}

/// The closed subset T = {ε_1 − ε_k, ε_1 + ε_k : 2 ≤ k ≤ n+1} ∪ {2ε_1}
/// whose root spaces span the embedded Heisenberg–Weyl subalgebra.
pub fn heisenberg_subset(n: usize) -> Result<RootSubset> {
    if n == 0 {
        return Err(Error::InvalidParameter("rank parameter n must be at least 1".into()));
    }
    let r = n + 1;
    let mut t = RootSubset::empty(r);
    for k in 2..=r {
        t.insert(Root::diff(r, 1, k)?)?;
        t.insert(Root::sum(r, 1, k)?)?;
    }
    t.insert(Root::long(r, 1)?)?;
    Ok(t)
}

fn require_subset(s: &RootSubset, phi: &RootSubset) -> Result<()> {
    if s.is_subset(phi) {
        Ok(())
    } else {
        Err(Error::NotSubset)
    }
}

/// True iff α, β ∈ s with α+β ∈ Φ implies α+β ∈ s.
pub fn is_closed(s: &RootSubset, phi: &RootSubset) -> Result<bool> {
    require_subset(s, phi)?;
    for a in s.iter() {
        for b in s.iter() {
            if let Some(c) = a.checked_add(b) {
                if phi.contains(&c) && !s.contains(&c) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Smallest closed subset of Φ containing `s`, computed as the least
/// fixpoint of `S ↦ S ∪ {α+β ∈ Φ : α, β ∈ S}`.
pub fn closure(s: &RootSubset, phi: &RootSubset) -> Result<RootSubset> {
    require_subset(s, phi)?;
    let mut current = s.clone();
    loop {
        let mut added = Vec::new();
        for a in current.iter() {
            for b in current.iter() {
                if let Some(c) = a.checked_add(b) {
                    if phi.contains(&c) && !current.contains(&c) {
                        added.push(c);
                    }
                }
            }
        }
        if added.is_empty() {
            return Ok(current);
        }
        for c in added {
            current.insert(c)?;
        }
    }
}

/// (T^r, T^u): members whose negatives are / are not in T.
pub fn symmetric_special_split(t: &RootSubset, phi: &RootSubset) -> Result<(RootSubset, RootSubset)> {
    if !is_closed(t, phi)? {
        return Err(Error::NotClosed);
    }
    let mut sym = RootSubset::empty(t.ambient_rank());
    let mut special = RootSubset::empty(t.ambient_rank());
    for a in t.iter() {
        if t.contains(&a.neg()) {
            sym.insert(a.clone())?;
        } else {
            special.insert(a.clone())?;
        }
    }
    Ok((sym, special))
}

/// `[T ∪ (−T)] == Φ`: every finite-dimensional irreducible module stays
/// indecomposable on restriction to the regular subalgebra of `t`.
pub fn wide_criterion(t: &RootSubset, phi: &RootSubset) -> Result<bool> {
    if !is_closed(t, phi)? {
        return Err(Error::NotClosed);
    }
    Ok(closure(&t.union(&t.negated()), phi)? == *phi)
}

/// The three sum decompositions that put every root of Φ into
/// `[T ∪ (−T)]`, checked as integer vector arithmetic for
/// `2 ≤ k < l ≤ n+1`:
/// `ε_k − ε_l = (ε_1 − ε_l) − (ε_1 − ε_k)`,
/// `ε_k + ε_l = (ε_1 + ε_l) − (ε_1 − ε_k)`,
/// `2ε_k = (ε_1 + ε_k) − (ε_1 − ε_k)`.
pub fn decomposition_identities(n: usize) -> Result<bool> {
    let r = n + 1;
    let sub = |a: &Root, b: &Root| -> Vec<i32> { a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| x - y).collect() };
    for k in 2..=r {
        let d1k = Root::diff(r, 1, k)?;
        if sub(&Root::sum(r, 1, k)?, &d1k) != Root::long(r, k)?.coeffs() {
            return Ok(false);
        }
        for l in (k + 1)..=r {
            if sub(&Root::diff(r, 1, l)?, &d1k) != Root::diff(r, k, l)?.coeffs() {
                return Ok(false);
            }
            if sub(&Root::sum(r, 1, l)?, &d1k) != Root::sum(r, k, l)?.coeffs() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Closure of a random subset of Φ, each root kept with probability `density`.
pub fn random_closed_subset(phi: &RootSubset, density: f64, rng: &mut impl rand::Rng) -> Result<RootSubset> {
    let picked = phi.iter().filter(|_| rng.gen_bool(density)).cloned();
    closure(&RootSubset::from_roots(phi.ambient_rank(), picked)?, phi)
}

/// `[t ∪ (−t)]` is closed, symmetric, and contains `t`.
pub fn symmetric_hull_property(t: &RootSubset, phi: &RootSubset) -> Result<bool> {
    let hull = closure(&t.union(&t.negated()), phi)?;
    Ok(is_closed(&hull, phi)? && hull.negated() == hull && t.is_subset(&hull))
}

/// Exact checks on Φ and T for one rank, plus the symmetric-hull property
/// on `samples` random closed subsets.
pub fn roots_report(n: usize, samples: usize, seed: u64) -> Result<crate::report::VerificationReport> {
    use crate::report::{Check, VerificationReport};
    use rand::SeedableRng;

    let mut r = VerificationReport::new(format!("roots-n{n}"));
    let phi = build_phi(n)?;
    let want = 2 * (n + 1) * (n + 1);
    r.push(
        Check::exact("|Φ| = 2(n+1)²", "root system of type C", phi.len() == want)
            .with_detail(format!("|Φ| = {}", phi.len())),
    );
    let t = heisenberg_subset(n)?;
    r.push(Check::exact("T closed", "closed subset T", is_closed(&t, &phi)?));
    let (sym, special) = symmetric_special_split(&t, &phi)?;
    r.push(Check::exact(
        "T is purely special",
        "symmetric and special components",
        sym.is_empty() && special == t,
    ));
    let wide = wide_criterion(&t, &phi)?;
    r.push(Check::exact("wide_criterion(T)", "remaining roots can be written as sums", wide).with_detail(format!("{wide}")));
    r.push(Check::exact(
        "sum decompositions",
        "remaining roots can be written as sums",
        decomposition_identities(n)?,
    ));
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut ok = true;
    for i in 0..samples {
        let density = 0.05 + 0.3 * (i % 4) as f64 / 3.0;
        let s = random_closed_subset(&phi, density, &mut rng)?;
        ok &= symmetric_hull_property(&s, &phi)?;
    }
    r.push(
        Check::exact("[T ∪ (−T)] symmetric closed hull", "symmetric closed subset", ok)
            .with_detail(format!("{samples} random closed subsets")),
    );
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str, rank: usize) -> Root {
        Root::parse(s, rank).unwrap()
    }

    fn set(rank: usize, items: &[&str]) -> RootSubset {
        RootSubset::from_roots(rank, items.iter().map(|s| r(s, rank))).unwrap()
    }

    /// Exhaustive pair scan, independent of `is_closed`'s early exit.
    fn closed_by_scan(s: &RootSubset, phi: &RootSubset) -> bool {
        let v: Vec<&Root> = s.iter().collect();
        let mut missing = 0;
        for a in &v {
            for b in &v {
                let sum: Vec<i32> = a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| x + y).collect();
                if let Some(c) = phi.iter().find(|p| p.coeffs() == sum.as_slice()) {
                    if !s.contains(c) {
                        missing += 1;
                    }
                }
            }
        }
        missing == 0
    }

    #[test]
    fn phi_cardinalities() {
        assert_eq!(build_phi(1).unwrap().len(), 8);
        assert_eq!(build_phi(2).unwrap().len(), 18);
        for n in 1..=8 {
            assert_eq!(build_phi(n).unwrap().len(), 2 * (n + 1) * (n + 1));
        }
    }

    #[test]
    fn phi_membership() {
        let phi = build_phi(1).unwrap();
        assert!(phi.contains(&Root::long(2, 1).unwrap()));
        assert!(Root::new(vec![3, 0]).is_err());
    }

    #[test]
    fn n_zero_rejected() {
        assert!(build_phi(0).is_err());
    }

    #[test]
    fn root_validation() {
        assert!(Root::new(vec![1, -1, 0]).is_ok());
        assert!(Root::new(vec![1, 1, 1]).is_err());
        assert!(Root::new(vec![0, 0]).is_err());
        assert!(Root::new(vec![2, 1]).is_err());
    }

    #[test]
    fn string_forms() {
        assert_eq!(Root::diff(3, 1, 3).unwrap().to_string(), "+e1-e3");
        assert_eq!(Root::long(2, 2).unwrap().to_string(), "2e2");
        assert_eq!(Root::long(2, 1).unwrap().neg().to_string(), "-2e1");
        assert_eq!(Root::sum(3, 1, 2).unwrap().neg().to_string(), "-e1-e2");
        for s in ["+e1-e3", "2e2", "-2e1", "-e1+e2"] {
            assert_eq!(s.parse::<Root>().unwrap().to_string(), s);
        }
        assert!(Root::parse("-e3+e1", 3).is_err());
        assert!(Root::parse("3e1", 2).is_err());
        assert!(Root::parse("+e4-e1", 3).is_err());
    }

    #[test]
    fn subset_json_sorted() {
        let s = set(3, &["2e2", "+e1-e3", "-2e1"]);
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"["+e1-e3","-2e1","2e2"]"#);
        assert_eq!(RootSubset::parse_json(&j, 3).unwrap(), s);
    }

    #[test]
    fn empty_set_closed() {
        let phi = build_phi(2).unwrap();
        assert!(is_closed(&RootSubset::empty(3), &phi).unwrap());
        assert_eq!(closure(&RootSubset::empty(3), &phi).unwrap(), RootSubset::empty(3));
    }

    #[test]
    fn chain_not_closed_and_its_closure() {
        let phi = build_phi(2).unwrap();
        let s = set(3, &["+e1-e2", "+e2-e3"]);
        assert!(!closed_by_scan(&s, &phi));
        assert!(!is_closed(&s, &phi).unwrap());
        assert_eq!(closure(&s, &phi).unwrap(), set(3, &["+e1-e2", "+e2-e3", "+e1-e3"]));
    }

    #[test]
    fn heisenberg_subset_is_closed_and_special() {
        for n in 1..=6 {
            let phi = build_phi(n).unwrap();
            let t = heisenberg_subset(n).unwrap();
            assert_eq!(t.len(), 2 * n + 1);
            assert!(is_closed(&t, &phi).unwrap());
            let (sym, special) = symmetric_special_split(&t, &phi).unwrap();
            assert!(sym.is_empty());
            assert_eq!(special, t);
            assert!(wide_criterion(&t, &phi).unwrap());
        }
    }

    #[test]
    fn split_of_phi_and_mixed() {
        let phi = build_phi(1).unwrap();
        let (sym, special) = symmetric_special_split(&phi, &phi).unwrap();
        assert_eq!(sym, phi);
        assert!(special.is_empty());

        let t = set(2, &["2e1", "-2e1", "+e1-e2"]);
        assert!(!closed_by_scan(&t, &phi));
        assert_eq!(symmetric_special_split(&t, &phi), Err(Error::NotClosed));

        let t = set(2, &["2e2", "-2e2", "2e1"]);
        assert!(closed_by_scan(&t, &phi));
        let (sym, special) = symmetric_special_split(&t, &phi).unwrap();
        assert_eq!(sym, set(2, &["2e2", "-2e2"]));
        assert_eq!(special, set(2, &["2e1"]));
    }

    #[test]
    fn long_root_alone_is_not_wide() {
        for n in 1..=4 {
            let phi = build_phi(n).unwrap();
            let t = set(n + 1, &["2e1"]);
            assert!(!wide_criterion(&t, &phi).unwrap());
            assert_eq!(closure(&t.union(&t.negated()), &phi).unwrap().len(), 2);
        }
    }

    #[test]
    fn phi_is_wide() {
        let phi = build_phi(3).unwrap();
        assert!(wide_criterion(&phi, &phi).unwrap());
    }

    #[test]
    fn non_subset_rejected() {
        let phi = build_phi(1).unwrap();
        let other = RootSubset::from_roots(3, [Root::long(3, 3).unwrap()]).unwrap();
        assert_eq!(closure(&other, &phi), Err(Error::NotSubset));
    }

    #[test]
    fn remaining_roots_are_differences_of_t_members() {
        for n in 1..=6 {
            let r = n + 1;
            for k in 2..=r {
                let d1k = Root::diff(r, 1, k).unwrap();
                let s1k = Root::sum(r, 1, k).unwrap();
                // 2ε_k = (ε₁+ε_k) − (ε₁−ε_k)
                assert_eq!(s1k.checked_add(&d1k.neg()), Some(Root::long(r, k).unwrap()));
                for l in (k + 1)..=r {
                    let d1l = Root::diff(r, 1, l).unwrap();
                    let s1l = Root::sum(r, 1, l).unwrap();
                    assert_eq!(d1l.checked_add(&d1k.neg()), Some(Root::diff(r, k, l).unwrap()));
                    assert_eq!(s1l.checked_add(&d1k.neg()), Some(Root::sum(r, k, l).unwrap()));
                }
            }
        }
    }
}
