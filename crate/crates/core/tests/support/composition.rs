//! Composition identity `d(s(tau)) = c tau^q` for single-coordinate arcs, checked with
//! dense arithmetic in `rho = tau^(1/den)`.

#![allow(dead_code)]

use holder_core::arcs::{distance_reparametrize, PuiseuxArc};
use holder_core::Rational;
use rand::Rng;

use super::dense::Dense;

/// Single-coordinate arc `sum_j c_j s^(n_j / den)`.
#[derive(Debug, Clone)]
pub struct Sample {
    pub den: i64,
    pub terms: Vec<(i64, i64)>,
}

impl Sample {
    pub fn random(rng: &mut impl Rng) -> Sample {
        let den = rng.gen_range(1..=3);
        let mut n = rng.gen_range(1..=6);
        let mut terms = Vec::new();
        for _ in 0..rng.gen_range(1..=5) {
            let mut c = 0;
            while c == 0 {
                c = rng.gen_range(-5..=5);
            }
            terms.push((c, n));
            n += rng.gen_range(1..=4);
        }
        Sample { den, terms }
    }

    pub fn arc(&self) -> PuiseuxArc {
        let coords = self
            .terms
            .iter()
            .map(|&(c, n)| (Rational::integer(c), Rational::new(n, self.den)))
            .collect();
        PuiseuxArc::at_origin(vec![coords], None).unwrap()
    }
}

/// Checks the identity through `tau^(q K)` for `K = order`.
pub fn check_identity(sample: &Sample, order: i64) -> Result<(), String> {
    let context = format!("arc {:?}/{}, order {order}", sample.terms, sample.den);
    let arc = sample.arc();
    let r = distance_reparametrize(&arc, &Rational::integer(order)).map_err(|e| format!("{context}: {e}"))?;
    let (c_lead, n_lead) = sample.terms[0];
    let sign = c_lead.signum();
    if r.scale() != &Rational::integer(c_lead.abs()) || r.degree() != &Rational::new(n_lead, sample.den) {
        return Err(format!("{context}: leading term {} tau^{}", r.scale(), r.degree()));
    }

    let len = (n_lead * (order - 1)) as usize;
    let den = Rational::integer(sample.den);
    // W(rho) = s(tau) / tau.
    let mut w = Dense::zero(len);
    for (e, coeff) in r.parameter_series().terms() {
        let k = e * &den - &den;
        if !k.is_integer() || k.is_negative() {
            return Err(format!("{context}: exponent {e} off the expected lattice"));
        }
        let k: usize = k.numer().try_into().unwrap();
        if k < len {
            w.0[k] = coeff.clone();
        }
    }
    let v = w.unit_root(sample.den as u32);
    let mut p = vec![Rational::zero(); len];
    for &(c, n) in &sample.terms {
        let k = (n - n_lead) as usize;
        if k < len {
            p[k] = Rational::integer(sign * c);
        }
    }
    let mut rho_v = Dense::zero(len);
    rho_v.0[1..].clone_from_slice(&v.0[..len - 1]);
    let lhs = v.pow(n_lead as u32).mul(&Dense::compose_polynomial(&p, &rho_v));
    let mut expected = Dense::zero(len);
    expected.0[0] = Rational::integer(c_lead.abs());
    if lhs == expected {
        Ok(())
    } else {
        Err(format!("{context}: composition is {:?}", lhs.0))
    }
}
