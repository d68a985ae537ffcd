//! Lie closures of Pauli generating sets and the anticommutation
//! equivalence classes `C_k(G)` of Pauli strings.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{all_strings, anticommute_count, pauli_commutator, LocalGenerator, PauliString, SymmetrizedPauli};
use crate::{Matrix, C64};

/// Default bound on the number of strings a closure may reach.
pub const DEFAULT_CLOSURE_CAP: usize = 4096;

/// Default separation fraction for the compatibility test.
pub const DEFAULT_EPSILON: f64 = 0.25;

/// Largest register accepted by [`class_weight_distribution`].
pub const WEIGHT_DISTRIBUTION_QUBIT_CAP: usize = 8;

/// Real basis of a dynamical Lie algebra spanned by Pauli strings.
#[derive(Clone, Debug, PartialEq)]
pub struct DlaResult {
    n_qubits: usize,
    basis: Vec<PauliString>,
}

impl DlaResult {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Phase-stripped basis strings in discovery order.
    pub fn basis(&self) -> &[PauliString] {
        &self.basis
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, p: &PauliString) -> bool {
        self.basis.contains(&p.stripped())
    }

    /// Basis strings sorted canonically, for order-independent comparison.
    pub fn sorted_basis(&self) -> Vec<PauliString> {
        let mut b = self.basis.clone();
        b.sort();
        b
    }

    /// Number of basis elements in each class `C_k(G)`.
    pub fn class_histogram(&self, g: &LocalGenerator) -> Result<ClassHistogram> {
        let mut counts = vec![0.0; self.n_qubits + 1];
        for p in &self.basis {
            counts[anticommute_count(p, g)?] += 1.0;
        }
        ClassHistogram::counts(counts)
    }
}

/// Lie closure of `generators` under commutation.
///
/// Commutators of Pauli strings are single strings up to a scalar, so the
/// phase-stripped strings reached by the worklist form a real basis of the
/// algebra generated by `i * generators`.
pub fn dla_closure(generators: &[PauliString], cap: usize) -> Result<DlaResult> {
    let first = generators
        .first()
        .ok_or_else(|| Error::invalid("need at least one generator"))?;
    let n = first.n_qubits();
    if cap < generators.len() {
        return Err(Error::invalid(format!(
            "closure cap {cap} is smaller than the {} generators",
            generators.len()
        )));
    }

    let mut basis: Vec<PauliString> = Vec::new();
    let mut seen: HashSet<PauliString> = HashSet::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    for g in generators {
        if g.n_qubits() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: g.n_qubits(),
            });
        }
        let s = g.stripped();
        if seen.insert(s) {
            basis.push(s);
            queue.push_back(basis.len() - 1);
        }
    }

    // Each dequeued element is commuted against the whole current basis, so
    // every pair is visited at least once.
    while let Some(idx) = queue.pop_front() {
        let current = basis[idx];
        let mut j = 0;
        while j < basis.len() {
            if j != idx {
                if let Some((_, r)) = pauli_commutator(&current, &basis[j])? {
                    if seen.insert(r) {
                        if basis.len() >= cap {
                            return Err(Error::CapExceeded {
                                what: "Lie closure",
                                requested: basis.len() + 1,
                                limit: cap,
                            });
                        }
                        basis.push(r);
                        queue.push_back(basis.len() - 1);
                    }
                }
            }
            j += 1;
        }
    }

    Ok(DlaResult { n_qubits: n, basis })
}

/// Weights indexed by class `k = 0..=n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassHistogram {
    weights: Vec<f64>,
    normalized: bool,
}

impl ClassHistogram {
    pub fn counts(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::invalid("class weights must be finite and nonnegative"));
        }
        Ok(Self {
            weights,
            normalized: false,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let t = self.total();
        if t <= 0.0 {
            return Err(Error::invalid("cannot normalize an all-zero histogram"));
        }
        Ok(Self {
            weights: self.weights.iter().map(|w| w / t).collect(),
            normalized: true,
        })
    }

    /// Index of the largest weight (first on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (k, &w) in self.weights.iter().enumerate() {
            if w > self.weights[best] {
                best = k;
            }
        }
        best
    }

    /// Entrywise mean of same-length histograms.
    pub fn mean(hists: &[ClassHistogram]) -> Result<Self> {
        let first = hists
            .first()
            .ok_or_else(|| Error::invalid("no histograms to average"))?;
        let len = first.weights.len();
        let mut acc = vec![0.0; len];
        for h in hists {
            if h.weights.len() != len {
                return Err(Error::DimensionMismatch {
                    expected: len,
                    found: h.weights.len(),
                });
            }
            for (a, w) in acc.iter_mut().zip(&h.weights) {
                *a += w;
            }
        }
        let m = hists.len() as f64;
        Ok(Self {
            weights: acc.into_iter().map(|a| a / m).collect(),
            normalized: hists.iter().all(|h| h.normalized),
        })
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// `|C_k| = binom(n, k) * 2^n` over all `4^n` strings.
///
/// The count does not depend on which non-identity letters `G` uses: on every
/// site two letters commute with the generator letter and two anticommute.
pub fn full_class_census(n: usize, g: &LocalGenerator) -> Result<ClassHistogram> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    if g.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: g.n_qubits(),
        });
    }
    let scale = 2f64.powi(n as i32);
    ClassHistogram::counts((0..=n).map(|k| binomial(n, k) * scale).collect())
}

/// Census by enumerating every string; `n <= 10`.
pub fn exhaustive_class_census(g: &LocalGenerator) -> Result<ClassHistogram> {
    let n = g.n_qubits();
    let mut counts = vec![0.0; n + 1];
    for p in all_strings(n)? {
        counts[anticommute_count(&p, g)?] += 1.0;
    }
    ClassHistogram::counts(counts)
}

/// Number of symmetrised strings per class: `(k+1)(n-k+1)`.
pub fn symmetrized_class_census(n: usize) -> Result<ClassHistogram> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    ClassHistogram::counts((0..=n).map(|k| ((k + 1) * (n - k + 1)) as f64).collect())
}

/// Symmetrised census by enumerating weak compositions of `n`.
pub fn enumerated_symmetrized_census(n: usize) -> Result<ClassHistogram> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let mut counts = vec![0.0; n + 1];
    for b in SymmetrizedPauli::all(n) {
        counts[b.class_index(crate::pauli::Letter::Z)] += 1.0;
    }
    ClassHistogram::counts(counts)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CompatibilityVerdict {
    pub k_ref: usize,
    pub k: usize,
    pub epsilon: f64,
    pub threshold: usize,
    pub compatible: bool,
}

/// `ceil(epsilon * n)`, ignoring float noise just above an integer.
pub fn separation_threshold(n: usize, epsilon: f64) -> usize {
    let t = epsilon * n as f64;
    (t - 1e-9 * t.abs().max(1.0)).ceil().max(0.0) as usize
}

/// Classes `k` and `k_ref` are compatible when `|k - k_ref| >= ceil(epsilon n)`.
pub fn compatibility_test(k: usize, k_ref: usize, n: usize, epsilon: f64) -> Result<CompatibilityVerdict> {
    if k > n || k_ref > n {
        return Err(Error::invalid(format!("class index out of range 0..={n}")));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::invalid(format!("epsilon must lie in (0, 1], got {epsilon}")));
    }
    let threshold = separation_threshold(n, epsilon);
    Ok(CompatibilityVerdict {
        k_ref,
        k,
        epsilon,
        threshold,
        compatible: k.abs_diff(k_ref) >= threshold,
    })
}

/// Squared Pauli coefficients of `o` summed per class, normalised.
///
/// `c_P = Tr(P o) / 2^n`; only the `2^n` nonzero entries of each `P` are
/// visited.
pub fn class_weight_distribution(o: &Matrix, g: &LocalGenerator) -> Result<ClassHistogram> {
    let n = g.n_qubits();
    if n > WEIGHT_DISTRIBUTION_QUBIT_CAP {
        return Err(Error::CapExceeded {
            what: "class-weight qubit",
            requested: n,
            limit: WEIGHT_DISTRIBUTION_QUBIT_CAP,
        });
    }
    let d = 1usize << n;
    if o.dim() != (d, d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: o.nrows(),
        });
    }
    let mut weights = vec![0.0; n + 1];
    for p in all_strings(n)? {
        let mut tr = C64::new(0.0, 0.0);
        p.for_each_entry(|row, col, v| tr += v * o[[col, row]]);
        let c = tr / d as f64;
        weights[anticommute_count(&p, g)?] += c.norm_sqr();
    }
    ClassHistogram::counts(weights)?.normalized()
}

/// Chernoff-Hoeffding bound `2 exp(-2 eps^2 n)` on `P(|k - n/2| >= eps n)`.
pub fn concentration_bound(n: usize, eps: f64) -> Result<f64> {
    if n == 0 || !(eps > 0.0) {
        return Err(Error::invalid("need n >= 1 and eps > 0"));
    }
    Ok(2.0 * (-2.0 * eps * eps * n as f64).exp())
}

/// Exact `P(|k - n/2| >= eps n)` for a uniformly random Pauli string.
pub fn census_tail_probability(n: usize, eps: f64) -> Result<f64> {
    if n == 0 || !(eps > 0.0) {
        return Err(Error::invalid("need n >= 1 and eps > 0"));
    }
    let g = LocalGenerator::collective_z(n)?;
    let census = full_class_census(n, &g)?.normalized()?;
    let half = n as f64 / 2.0;
    let cut = eps * n as f64 - 1e-12;
    Ok(census
        .weights()
        .iter()
        .enumerate()
        .filter(|(k, _)| (*k as f64 - half).abs() >= cut)
        .map(|(_, w)| w)
        .sum())
}

/// Report emitted by the `dla` subcommand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DlaReport {
    pub n: usize,
    pub generator: String,
    pub dla_dimension: usize,
    pub class_counts: Vec<f64>,
    pub normalized_weights: Vec<f64>,
}

impl DlaReport {
    pub fn new(dla: &DlaResult, g: &LocalGenerator) -> Result<Self> {
        let hist = dla.class_histogram(g)?;
        Ok(Self {
            n: dla.n_qubits(),
            generator: g.label(),
            dla_dimension: dla.dimension(),
            class_counts: hist.weights().to_vec(),
            normalized_weights: hist.normalized()?.weights().to_vec(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Letter;

    fn ps(list: &[&str]) -> Vec<PauliString> {
        list.iter().map(|s| s.parse().unwrap()).collect()
    }

    fn brute_force_closure(gens: &[PauliString]) -> Vec<PauliString> {
        // Repeated all-pairs sweeps until nothing new appears.
        let mut set: Vec<PauliString> = gens.iter().map(|g| g.stripped()).collect();
        set.sort();
        set.dedup();
        loop {
            let mut next = set.clone();
            for a in &set {
                for b in &set {
                    if let Some((_, r)) = pauli_commutator(a, b).unwrap() {
                        if !next.contains(&r) {
                            next.push(r);
                        }
                    }
                }
            }
            next.sort();
            if next == set {
                return set;
            }
            set = next;
        }
    }

    #[test]
    fn closure_examples() {
        assert_eq!(dla_closure(&ps(&["X"]), 16).unwrap().dimension(), 1);
        let su2 = dla_closure(&ps(&["X", "Z"]), 16).unwrap();
        let mut expect = ps(&["X", "Y", "Z"]);
        expect.sort();
        assert_eq!(su2.sorted_basis(), expect);
        let two = dla_closure(&ps(&["XX", "ZI"]), 16).unwrap();
        let mut expect = ps(&["XX", "ZI", "YX"]);
        expect.sort();
        assert_eq!(two.sorted_basis(), expect);
    }

    #[test]
    fn closure_matches_brute_force_and_is_closed() {
        let cases = [
            vec!["XX", "ZI"],
            vec!["XXI", "IZZ", "ZII"],
            vec!["XZI", "IXZ", "ZIX"],
            vec!["XI", "IX", "ZZ"],
        ];
        for gens in cases {
            let gens = ps(&gens);
            let dla = dla_closure(&gens, 1024).unwrap();
            assert_eq!(dla.sorted_basis(), brute_force_closure(&gens));
            if dla.dimension() <= 64 {
                for a in dla.basis() {
                    for b in dla.basis() {
                        if let Some((_, r)) = pauli_commutator(a, b).unwrap() {
                            assert!(dla.contains(&r));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn closure_is_order_invariant() {
        let gens = ps(&["XXI", "IZZ", "ZII", "IIX"]);
        let reference = dla_closure(&gens, 4096).unwrap().sorted_basis();
        let mut rev = gens.clone();
        rev.reverse();
        assert_eq!(dla_closure(&rev, 4096).unwrap().sorted_basis(), reference);
        let rotated = [&gens[2..], &gens[..2]].concat();
        assert_eq!(dla_closure(&rotated, 4096).unwrap().sorted_basis(), reference);
    }

    #[test]
    fn closure_overflow_is_an_error() {
        // Local X and Z on every site plus a connected XX coupling is universal: su(8).
        let gens = ps(&["XXI", "IXX", "ZII", "IZI", "IIZ", "XII", "IXI", "IIX"]);
        assert_eq!(dla_closure(&gens, 4096).unwrap().dimension(), 63);
        assert!(matches!(dla_closure(&gens, 20), Err(Error::CapExceeded { .. })));
        assert!(dla_closure(&gens, 2).is_err());
        // Without the X fields on sites 1 and 2 this is the free-fermion chain
        // extended by one boundary field: so(7), dimension 21.
        let partial = ps(&["XXI", "IXX", "ZII", "IZI", "IIZ", "XII"]);
        assert_eq!(dla_closure(&partial, 4096).unwrap().dimension(), 21);
        assert!(dla_closure(&[], 10).is_err());
    }

    #[test]
    fn dla_histogram_and_report() {
        let dla = dla_closure(&ps(&["XX", "ZI"]), 16).unwrap();
        let g = LocalGenerator::collective_z(2).unwrap();
        let hist = dla.class_histogram(&g).unwrap();
        // XX in C_2, ZI in C_0, YX in C_2
        assert_eq!(hist.weights(), &[1.0, 0.0, 2.0]);
        let report = DlaReport::new(&dla, &g).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"dla_dimension\":3"));
        let back: DlaReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn full_census_examples() {
        let g2 = LocalGenerator::collective_z(2).unwrap();
        assert_eq!(full_class_census(2, &g2).unwrap().weights(), &[4.0, 8.0, 4.0]);
        let g1 = LocalGenerator::collective_z(1).unwrap();
        assert_eq!(full_class_census(1, &g1).unwrap().weights(), &[2.0, 2.0]);
        for n in 1..=20 {
            let g = LocalGenerator::collective_z(n).unwrap();
            assert_eq!(full_class_census(n, &g).unwrap().total(), 4f64.powi(n as i32));
        }
        for n in 1..=6 {
            let g = LocalGenerator::uniform(n, Letter::X, 1.0).unwrap();
            assert_eq!(full_class_census(n, &g).unwrap(), exhaustive_class_census(&g).unwrap());
        }
    }

    #[test]
    fn symmetrized_census_examples() {
        assert_eq!(symmetrized_class_census(2).unwrap().weights(), &[3.0, 4.0, 3.0]);
        assert_eq!(symmetrized_class_census(1).unwrap().weights(), &[2.0, 2.0]);
        for n in 1..=30 {
            let h = symmetrized_class_census(n).unwrap();
            assert_eq!(h, enumerated_symmetrized_census(n).unwrap());
            assert_eq!(h.total(), binomial(n + 3, 3));
        }
    }

    #[test]
    fn symmetrized_weights_decay_polynomially() {
        for n in [8usize, 16, 32, 64] {
            let f = symmetrized_class_census(n).unwrap().normalized().unwrap();
            let ratio = f.weights()[n / 4] / f.weights()[n / 2];
            // (n/4+1)(3n/4+1) / (n/2+1)^2 -> 3/4, far above any c/n.
            assert!(ratio > 0.5, "n={n} ratio={ratio}");
            let g = LocalGenerator::collective_z(n).unwrap();
            let full = full_class_census(n, &g).unwrap().normalized().unwrap();
            assert!(full.weights()[n / 4] / full.weights()[n / 2] < ratio);
        }
    }

    #[test]
    fn compatibility_examples() {
        assert!(compatibility_test(10, 0, 10, 1.0).unwrap().compatible);
        assert!(compatibility_test(10, 0, 10, 0.25).unwrap().compatible);
        assert!(!compatibility_test(4, 4, 10, 0.01).unwrap().compatible);
        let v = compatibility_test(3, 0, 10, 0.25).unwrap();
        assert_eq!(v.threshold, 3);
        assert!(v.compatible);
        // 0.3 * 10 is 3.0000000000000004 in floating point
        assert_eq!(compatibility_test(3, 0, 10, 0.3).unwrap().threshold, 3);
        assert!(compatibility_test(11, 0, 10, 0.25).is_err());
        assert!(compatibility_test(1, 0, 10, 0.0).is_err());
        assert!(compatibility_test(1, 0, 10, 1.5).is_err());
    }

    #[test]
    fn single_site_operators_sit_in_one_class() {
        let g = LocalGenerator::collective_z(4).unwrap();
        let z1: PauliString = "ZIII".parse().unwrap();
        let x1: PauliString = "XIII".parse().unwrap();
        let wz = class_weight_distribution(&z1.to_dense().unwrap(), &g).unwrap();
        assert_eq!(wz.weights(), &[1.0, 0.0, 0.0, 0.0, 0.0]);
        let wx = class_weight_distribution(&x1.to_dense().unwrap(), &g).unwrap();
        assert_eq!(wx.weights(), &[0.0, 1.0, 0.0, 0.0, 0.0]);
        assert!(class_weight_distribution(&z1.to_dense().unwrap(), &LocalGenerator::collective_z(3).unwrap()).is_err());
    }

    #[test]
    fn weight_distribution_of_mixed_operator() {
        // (I + Z_0)/2 splits its weight evenly between I and Z_0, both in C_0;
        // adding X_1 moves a third of the weight to C_1.
        let g = LocalGenerator::collective_z(2).unwrap();
        let o = "II".parse::<PauliString>().unwrap().to_dense().unwrap()
            + "ZI".parse::<PauliString>().unwrap().to_dense().unwrap()
            + "IX".parse::<PauliString>().unwrap().to_dense().unwrap();
        let w = class_weight_distribution(&o, &g).unwrap();
        assert!((w.weights()[0] - 2.0 / 3.0).abs() < 1e-14);
        assert!((w.weights()[1] - 1.0 / 3.0).abs() < 1e-14);
        assert!((w.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn concentration_examples() {
        let b = concentration_bound(20, 0.25).unwrap();
        assert!((b - 2.0 * (-2.5f64).exp()).abs() < 1e-15);
        assert!((b - 0.16417).abs() < 1e-4);
        assert!(census_tail_probability(20, 0.25).unwrap() <= b);
        assert!((concentration_bound(5, 1e-9).unwrap() - 2.0).abs() < 1e-12);
        // n=6, eps=1/2: only k=0 and k=6 qualify, 2 * 2^6 / 4^6.
        let tail = census_tail_probability(6, 0.5).unwrap();
        assert!((tail - 2.0 * 64.0 / 4096.0).abs() < 1e-15);
        assert!(tail <= concentration_bound(6, 0.5).unwrap());
        for n in 1..=40 {
            for eps in [0.05, 0.1, 0.2, 0.3, 0.5] {
                assert!(census_tail_probability(n, eps).unwrap() <= concentration_bound(n, eps).unwrap() + 1e-15);
            }
        }
    }
}
