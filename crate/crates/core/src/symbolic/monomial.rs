use std::cmp::Ordering;
use std::fmt;

/// A chart coordinate `x<k>` (1-based) or the family parameter `t`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Var {
    X(u16),
    T,
}

impl Var {
    /// Chart coordinate with 0-based index `mu`.
    pub fn coord(mu: usize) -> Var {
        Var::X(mu as u16 + 1)
    }

    pub fn is_coord(self) -> bool {
        matches!(self, Var::X(_))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(k) => write!(f, "x{k}"),
            Var::T => write!(f, "t"),
        }
    }
}

/// Sparse exponent vector, sorted by variable, no zero exponents.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_pairs(mut pairs: Vec<(Var, u32)>) -> Self {
        pairs.retain(|&(_, e)| e > 0);
        pairs.sort_by_key(|&(v, _)| v);
        let mut out: Vec<(Var, u32)> = Vec::with_capacity(pairs.len());
        for (v, e) in pairs {
            match out.last_mut() {
                Some((w, f)) if *w == v => *f += e,
                _ => out.push((v, e)),
            }
        }
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    /// Degree counting chart coordinates only.
    pub fn coord_degree(&self) -> u32 {
        self.0.iter().filter(|(v, _)| v.is_coord()).map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(v, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < v {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == v {
                let f = other.0[j].1;
                if f > e {
                    return None;
                }
                if e > f {
                    out.push((v, e - f));
                }
                j += 1;
            } else {
                out.push((v, e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Partial derivative: returns the exponent factor and the lowered monomial.
    pub fn diff(&self, v: Var) -> Option<(u32, Monomial)> {
        let k = self.0.iter().position(|&(w, _)| w == v)?;
        let e = self.0[k].1;
        let mut out = self.0.clone();
        if e == 1 {
            out.remove(k);
        } else {
            out[k].1 -= 1;
        }
        Some((e, Monomial(out)))
    }

    /// Drops variable `v`, returning its exponent.
    pub fn without(&self, v: Var) -> (u32, Monomial) {
        let mut out = self.0.clone();
        match out.iter().position(|&(w, _)| w == v) {
            Some(k) => {
                let e = out.remove(k).1;
                (e, Monomial(out))
            }
            None => (0, Monomial(out)),
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.0.iter().map(|&(v, _)| v)
    }
}

/// Graded lexicographic order with `x1 > x2 > ... > t`.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(va, ea)), Some(&(vb, eb))) => match va.cmp(&vb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(&eb);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, &(v, e)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: &[(Var, u32)]) -> Monomial {
        Monomial::from_pairs(p.to_vec())
    }

    #[test]
    fn grlex_order() {
        let x1 = Var::X(1);
        let x2 = Var::X(2);
        // degree dominates
        assert!(m(&[(x2, 2)]) > m(&[(x1, 1)]));
        // x1 beats x2 within a degree
        assert!(m(&[(x1, 1)]) > m(&[(x2, 1)]));
        assert!(m(&[(x1, 2)]) > m(&[(x1, 1), (x2, 1)]));
        assert!(m(&[(x2, 1)]) > m(&[(Var::T, 1)]));
    }

    #[test]
    fn division() {
        let a = m(&[(Var::X(1), 2), (Var::T, 1)]);
        let b = m(&[(Var::X(1), 1)]);
        assert_eq!(a.div(&b), Some(m(&[(Var::X(1), 1), (Var::T, 1)])));
        assert_eq!(b.div(&a), None);
        assert_eq!(a.div(&a), Some(Monomial::one()));
    }
}
