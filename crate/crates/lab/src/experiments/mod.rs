//! Paper-facing experiment harnesses.

pub mod apriori;
pub mod inequalities;
pub mod limit;
pub mod smallness;
pub mod strichartz;

use critlab_core::besov::BesovIndex;
use critlab_core::model::theorem_rate_exponent;

use crate::config::{MenuEntry, Quantity};

/// How one tracked quantity is measured: a time exponent, a Besov index and
/// the aggregation order.
#[derive(Debug, Clone)]
pub struct NormSpec {
    /// label of the measured quantity, e.g. `qu@6` or `w_linf@6`
    pub quantity: String,
    pub rho: f64,
    pub index: BesovIndex,
    /// Chemin-Lerner (time norm inside the shells) vs plain aggregation
    pub tilde: bool,
    /// rate exponent the limit theorem predicts for this entry
    pub target_exponent: f64,
}

impl NormSpec {
    pub fn label(&self) -> String {
        let rho = fmt_exp(self.rho);
        let p = fmt_exp(self.index.p);
        let time = if self.tilde { "Ltilde" } else { "L" };
        format!("{time}[rho={rho}]B[s={:.4};p={p};r=1]", self.index.s)
    }
}

fn fmt_exp(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_string()
    } else if (v - v.round()).abs() < 1e-12 {
        format!("{}", v.round() as i64)
    } else {
        format!("{v:.4}")
    }
}

/// The convergence-theorem norms attached to a menu entry in dimension
/// `dim`. `b`/`qu` carry one Chemin-Lerner entry each; `w`/`dbar` expand to
/// their `L^inf` and `L^1` components.
pub fn menu_norms(dim: usize, entry: MenuEntry) -> Vec<NormSpec> {
    let p = entry.p;
    let target = theorem_rate_exponent(dim, p);
    let np = dim as f64 / p;
    let make = |suffix: &str, rho: f64, s: f64, tilde: bool| NormSpec {
        quantity: if suffix.is_empty() {
            format!("{}@{}", entry.quantity, fmt_exp(p))
        } else {
            format!("{}_{suffix}@{}", entry.quantity, fmt_exp(p))
        },
        rho,
        index: BesovIndex::new(s, p, 1.0).expect("menu index"),
        tilde,
        target_exponent: target,
    };
    match (dim, entry.quantity) {
        // N = 2: b in Ltilde^{4p/(p-2)} B^{3/2p - 3/4}, Qu in Ltilde^2 B^{5/2p - 1/4}
        (2, Quantity::B) => {
            let rho = if p == 2.0 { f64::INFINITY } else { 4.0 * p / (p - 2.0) };
            vec![make("", rho, 3.0 / (2.0 * p) - 0.75, true)]
        }
        (2, Quantity::Qu) => vec![make("", 2.0, 5.0 / (2.0 * p) - 0.25, true)],
        (2, Quantity::W) => vec![
            make("linf", f64::INFINITY, 5.0 / (2.0 * p) - 1.25, false),
            make("l1", 1.0, 5.0 / (2.0 * p) + 0.75, false),
        ],
        (2, Quantity::Dbar) => vec![
            make("linf", f64::INFINITY, 5.0 / (2.0 * p) - 0.25, false),
            make("l1", 1.0, 5.0 / (2.0 * p) + 1.75, false),
        ],
        // N = 3: b in Ltilde^{2p/(p-2)} B^{2/p - 1/2}, Qu in Ltilde^2 B^{4/p - 1/2}
        (3, Quantity::B) => {
            let rho = if p == 2.0 { f64::INFINITY } else { 2.0 * p / (p - 2.0) };
            vec![make("", rho, 2.0 / p - 0.5, true)]
        }
        (3, Quantity::Qu) => vec![make("", 2.0, 4.0 / p - 0.5, true)],
        (3, Quantity::W) => vec![
            make("linf", f64::INFINITY, 4.0 / p - 1.5, false),
            make("l1", 1.0, 4.0 / p + 0.5, false),
        ],
        (3, Quantity::Dbar) => vec![
            make("linf", f64::INFINITY, 4.0 / p - 0.5, false),
            make("l1", 1.0, 4.0 / p + 1.5, false),
        ],
        // N >= 4 is exponent lookup only (no solver); rates use N/p - 1/2
        (_, Quantity::B) | (_, Quantity::Qu) => vec![make("", 2.0, np - 0.5, true)],
        (_, Quantity::W) => vec![
            make("linf", f64::INFINITY, np - 1.5, false),
            make("l1", 1.0, np + 0.5, false),
        ],
        (_, Quantity::Dbar) => vec![
            make("linf", f64::INFINITY, np - 0.5, false),
            make("l1", 1.0, np + 1.5, false),
        ],
    }
}

/// Strict decrease with multiplicative slack: `v[i+1] <= v[i] * (1 + slack)`.
pub fn monotone_decreasing_with_slack(values: &[f64], slack: f64) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] * (1.0 + slack))
}
