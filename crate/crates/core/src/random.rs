//! Seeded generators for trial data.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::courant::{CourantChart, Section};
use crate::symbolic::coeff::{cq, rat, Cq};
use crate::symbolic::{Monomial, Poly, ScalarField, Var};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small rational `p/q` with `|p| <= 4`, `1 <= q <= 3`.
pub fn small_rational<R: Rng>(rng: &mut R) -> crate::symbolic::Rational {
    rat(rng.gen_range(-4..=4), rng.gen_range(1..=3))
}

/// Every monomial in `vars` of total degree at most `max_deg`.
pub fn monomials(vars: &[Var], max_deg: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    let mut frontier = vec![(Monomial::one(), 0usize)];
    for _ in 0..max_deg {
        let mut next = Vec::new();
        for (m, start) in &frontier {
            for (k, &v) in vars.iter().enumerate().skip(*start) {
                let m2 = m.mul(&Monomial::var(v));
                out.push(m2.clone());
                next.push((m2, k));
            }
        }
        frontier = next;
    }
    out
}

/// Random polynomial in the chart coordinates: each monomial of degree
/// `<= max_deg` appears with probability `density`. Coefficients are real
/// unless `complex` is set.
pub fn random_field<R: Rng>(rng: &mut R, dim: usize, max_deg: u32, density: f64, complex: bool) -> ScalarField {
    let vars: Vec<Var> = (0..dim).map(Var::coord).collect();
    let mut p = Poly::zero();
    for m in monomials(&vars, max_deg) {
        if rng.gen_bool(density) {
            let re = small_rational(rng);
            let im = if complex { small_rational(rng) } else { rat(0, 1) };
            p.add_term(m, cq(re, im));
        }
    }
    ScalarField::from_poly(p).with_vars(&vars)
}

pub fn random_section<R: Rng>(rng: &mut R, chart: &Arc<CourantChart>, max_deg: u32, density: f64) -> Section {
    let coeffs = (0..chart.rank())
        .map(|_| random_field(rng, chart.dim(), max_deg, density, false))
        .collect();
    Section::new(chart, coeffs).expect("rank-sized")
}

/// Rational point with coordinates `p/q`, `|p| <= 5`, `1 <= q <= 4`.
pub fn random_point<R: Rng>(rng: &mut R, dim: usize) -> Vec<Cq> {
    (0..dim)
        .map(|_| cq(rat(rng.gen_range(-5..=5), rng.gen_range(1..=4)), rat(0, 1)))
        .collect()
}

/// Lattice of `per_axis^dim` points `k/(per_axis - 1)` in the unit cube.
pub fn unit_grid(dim: usize, per_axis: usize) -> Vec<Vec<Cq>> {
    let step = (per_axis.max(2) - 1) as i64;
    let mut out: Vec<Vec<Cq>> = vec![Vec::new()];
    for _ in 0..dim {
        let mut next = Vec::with_capacity(out.len() * per_axis);
        for p in &out {
            for k in 0..per_axis as i64 {
                let mut q = p.clone();
                q.push(cq(rat(k, step), rat(0, 1)));
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Trial sections and functions for the axiom verifiers.
pub fn trials(chart: &Arc<CourantChart>, seed: u64, sections: usize, functions: usize, max_deg: u32) -> (Vec<Section>, Vec<ScalarField>) {
    let mut r = rng(seed);
    let density = 0.5;
    let s = (0..sections).map(|_| random_section(&mut r, chart, max_deg, density)).collect();
    let f = (0..functions)
        .map(|_| random_field(&mut r, chart.dim(), max_deg, density, false))
        .collect();
    (s, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_count_matches_binomial() {
        let vars: Vec<Var> = (0..3).map(Var::coord).collect();
        // C(3 + 2, 2) = 10
        assert_eq!(monomials(&vars, 2).len(), 10);
    }

    #[test]
    fn unit_grid_covers_corners() {
        let g = unit_grid(2, 5);
        assert_eq!(g.len(), 25);
        assert_eq!(g[24], vec![cq(rat(1, 1), rat(0, 1)); 2]);
        assert_eq!(g[1][1], cq(rat(1, 4), rat(0, 1)));
    }

    #[test]
    fn same_seed_same_data() {
        let a = random_field(&mut rng(7), 2, 2, 0.5, true);
        let b = random_field(&mut rng(7), 2, 2, 0.5, true);
        assert_eq!(a, b);
    }
}
