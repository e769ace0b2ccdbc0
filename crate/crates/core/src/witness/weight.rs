//! Weight functions of witness trees and the exponent bookkeeping that
//! bounds them.
//!
//! For a node `a` with valuation `v_a` and children `c`,
//!
//! ```text
//! f_a(j) = v_a(j) · Π_up   Σ_{j'>j} f_c(j') / (j^γ j'^{1-γ})
//!                 · Π_down Σ_{j'<j} f_c(j') / (j'^γ j^{1-γ})
//! ```
//!
//! with `v = 1/(ω t^γ)` at original leaves, `1` at trivial nodes and
//! `(log j)^ρ / j^{Aγ+B(1-γ)}` at contraction nodes.

use std::io::Write;

use super::tree::{Valuation, WitnessTreeSpec};
use super::compute_d0;
use crate::error::{Error, Result};
use crate::scalar::Real;

fn check_inputs<T: Real>(spec: &WitnessTreeSpec, t: usize, omega: T, gamma: T) -> Result<()> {
    if t == 0 {
        return Err(Error::InvalidParameter("t must be at least 1".into()));
    }
    if !(omega > T::zero()) {
        return Err(Error::InvalidParameter(format!("omega={omega} must be positive")));
    }
    let g = gamma.to_f64().unwrap_or(f64::NAN);
    let d0 = compute_d0(g)?;
    if spec.depth() > d0 + 1 {
        return Err(Error::TreeSpec(format!(
            "tree depth {} exceeds d0 + 1 = {}",
            spec.depth(),
            d0 + 1
        )));
    }
    Ok(())
}

/// `f_0(i)` for `i` in `1..=t` by dynamic programming over the tree,
/// `O(t · nodes)`. Slot 0 of the result is unused and zero.
pub fn weight_f<T: Real>(spec: &WitnessTreeSpec, t: usize, omega: T, gamma: T) -> Result<Vec<T>> {
    check_inputs(spec, t, omega, gamma)?;
    let one_minus = T::one() - gamma;
    let tt = T::of_usize(t);
    let p = (omega * tt.powf(gamma)).recip();
    let jj: Vec<T> = (0..=t).map(T::of_usize).collect();
    let pow_g: Vec<T> = jj.iter().map(|&j| j.powf(-gamma)).collect();
    let pow_q: Vec<T> = jj.iter().map(|&j| j.powf(-one_minus)).collect();

    let mut values: Vec<Option<Vec<T>>> = vec![None; spec.len()];
    for &id in spec.preorder().iter().rev() {
        let node = spec.node(id);
        let mut f: Vec<T> = match node.valuation {
            Valuation::Leaf => vec![p; t + 1],
            Valuation::Trivial => vec![T::one(); t + 1],
            Valuation::Contraction { rho, a, b } => {
                let e = T::of_usize(a as usize) * gamma + T::of_usize(b as usize) * one_minus;
                (0..=t)
                    .map(|j| {
                        if j == 0 {
                            T::zero()
                        } else {
                            jj[j].ln().powi(rho as i32) * jj[j].powf(-e)
                        }
                    })
                    .collect()
            }
        };
        f[0] = T::zero();
        for &c in &node.children {
            let fc = values[c].take().expect("children are evaluated first");
            if spec.node(c).up == Some(true) {
                let mut acc = T::zero();
                for j in (1..=t).rev() {
                    f[j] = f[j] * pow_g[j] * acc;
                    acc = acc + fc[j] * pow_q[j];
                }
            } else {
                let mut acc = T::zero();
                for j in 1..=t {
                    f[j] = f[j] * pow_q[j] * acc;
                    acc = acc + fc[j] * pow_g[j];
                }
            }
        }
        values[id] = Some(f);
    }
    Ok(values[spec.root()].take().expect("root evaluated"))
}

/// CSV with header `i,f0`.
pub fn write_weight_csv<T: Real, W: Write>(f0: &[T], mut out: W) -> Result<()> {
    writeln!(out, "i,f0")?;
    for (i, v) in f0.iter().enumerate().skip(1) {
        writeln!(out, "{i},{v:e}")?;
    }
    out.flush()?;
    Ok(())
}

/// Bound exponents for the subtree rooted at one node: `f_a(j)` is bounded
/// by `ω^{-leaves} (1 ∨ (log j)^{rho}) / j^{Aγ + B(1-γ)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NodeLedger {
    pub a: u32,
    pub b: u32,
    /// Down edges in the subtree plus the valuation log powers.
    pub rho: u32,
    /// Original leaves in the subtree.
    pub leaves: u32,
    /// Down children whose sum fell into the `(log j)^{ρ+1} / j^{1-γ}` case.
    pub down_branches: u32,
}

impl NodeLedger {
    pub fn exponent<T: Real>(&self, gamma: T) -> T {
        T::of_usize(self.a as usize) * gamma + T::of_usize(self.b as usize) * (T::one() - gamma)
    }
}

/// Per-node bound exponents, indexed by node id.
///
/// An original leaf contributes `γ` over either edge orientation. Other
/// children contribute their own exponent `y`, except a down child with
/// `1 - γ <= y`, which contributes `1 - γ` and one extra log power.
pub fn exponent_ledger<T: Real>(spec: &WitnessTreeSpec, gamma: T) -> Vec<NodeLedger> {
    let one_minus = T::one() - gamma;
    let mut ledger = vec![NodeLedger::default(); spec.len()];
    for &id in spec.preorder().iter().rev() {
        let node = spec.node(id);
        let mut acc = match node.valuation {
            Valuation::Leaf => NodeLedger {
                a: 1,
                leaves: 1,
                ..NodeLedger::default()
            },
            Valuation::Trivial => NodeLedger::default(),
            Valuation::Contraction { rho, a, b } => NodeLedger {
                a,
                b,
                rho,
                ..NodeLedger::default()
            },
        };
        for &c in &node.children {
            let child = ledger[c];
            acc.leaves += child.leaves;
            acc.rho += child.rho;
            acc.down_branches += child.down_branches;
            let down = spec.node(c).up == Some(false);
            if down {
                acc.rho += 1;
            }
            let original = spec.node(c).valuation == Valuation::Leaf;
            if down && !original && one_minus <= child.exponent(gamma) {
                acc.b += 1;
                acc.down_branches += 1;
            } else {
                acc.a += child.a;
                acc.b += child.b;
            }
        }
        ledger[id] = acc;
    }
    ledger
}

/// `(A, B)` of `Σ e + γ · (original leaves)` over the whole tree.
pub fn ledger_total(spec: &WitnessTreeSpec) -> (u32, u32) {
    spec.nodes().iter().fold((0, 0), |(a, b), n| match n.valuation {
        Valuation::Leaf => (a + 1, b),
        Valuation::Trivial => (a, b),
        Valuation::Contraction { a: x, b: y, .. } => (a + x, b + y),
    })
}

/// Replaces the subtree at internal node `id` by a contraction leaf carrying
/// that subtree's ledger exponents. Remaining nodes are renumbered in
/// preorder.
pub fn contract<T: Real>(spec: &WitnessTreeSpec, id: usize, gamma: T) -> Result<WitnessTreeSpec> {
    if id >= spec.len() {
        return Err(Error::TreeSpec(format!("no node {id}")));
    }
    if spec.node(id).children.is_empty() {
        return Err(Error::TreeSpec(format!("node {id} is a leaf")));
    }
    let entry = exponent_ledger(spec, gamma)[id];
    let removed: Vec<usize> = spec.preorder_from(id).into_iter().skip(1).collect();
    let keep: Vec<usize> = spec.preorder().into_iter().filter(|x| !removed.contains(x)).collect();
    let mut new_id = vec![usize::MAX; spec.len()];
    for (k, &old) in keep.iter().enumerate() {
        new_id[old] = k;
    }
    let entries: Vec<_> = keep
        .iter()
        .map(|&old| {
            let n = spec.node(old);
            let valuation = if old == id {
                Valuation::Contraction {
                    rho: entry.rho,
                    a: entry.a,
                    b: entry.b,
                }
            } else {
                n.valuation
            };
            (n.parent.map(|p| new_id[p]), n.up, valuation)
        })
        .collect();
    WitnessTreeSpec::from_nodes(spec.r(), &entries)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport<T> {
    pub ledger: NodeLedger,
    /// `y_0 = Aγ + B(1-γ)` from the root's ledger entry.
    pub y0: T,
    /// `ratio[i] = f_0(i) i^{y_0} ω^ℓ / (1 ∨ (log i)^{ρ'})`; slot 0 unused.
    pub ratios: Vec<T>,
    pub max_ratio: T,
    pub argmax: usize,
    /// Largest ratio over `i < √t` and over `i >= √t`.
    pub head_max: T,
    pub tail_max: T,
}

impl<T: Real> BoundReport<T> {
    pub fn ratio_at(&self, i: usize) -> T {
        self.ratios[i]
    }

    /// No growth trend: the tail never exceeds twice the head.
    pub fn bounded(&self, factor: T) -> bool {
        self.tail_max <= factor * self.head_max
    }
}

/// Compares the exact `f_0` with the shape `ω^{-ℓ} (1 ∨ (log i)^{ρ'}) / i^{y_0}`.
///
/// A tree that is a lone original leaf has `f_0 = 1/(ω t^γ)`, which is
/// normalised as `f_0 ω t^γ` instead.
pub fn bound_check<T: Real>(spec: &WitnessTreeSpec, t: usize, omega: T, gamma: T) -> Result<BoundReport<T>> {
    let f0 = weight_f(spec, t, omega, gamma)?;
    let ledger = exponent_ledger(spec, gamma)[spec.root()];
    let y0 = ledger.exponent(gamma);
    let lone_leaf = spec.node(spec.root()).valuation == Valuation::Leaf;
    let scale = omega.powi(ledger.leaves as i32);
    let tt = T::of_usize(t);
    let mut ratios = vec![T::zero(); t + 1];
    for i in 1..=t {
        let ii = T::of_usize(i);
        ratios[i] = if lone_leaf {
            f0[i] * omega * tt.powf(gamma)
        } else {
            let log_part = ii.ln().powi(ledger.rho as i32).max(T::one());
            f0[i] * ii.powf(y0) * scale / log_part
        };
    }
    let split = ((t as f64).sqrt().ceil() as usize).clamp(2, t.max(2));
    let mut max_ratio = T::zero();
    let mut argmax = 1;
    let mut head_max = T::zero();
    let mut tail_max = T::zero();
    for i in 1..=t {
        let r = ratios[i];
        if r > max_ratio {
            max_ratio = r;
            argmax = i;
        }
        if i < split {
            head_max = head_max.max(r);
        } else {
            tail_max = tail_max.max(r);
        }
    }
    Ok(BoundReport {
        ledger,
        y0,
        ratios,
        max_ratio,
        argmax,
        head_max,
        tail_max,
    })
}
