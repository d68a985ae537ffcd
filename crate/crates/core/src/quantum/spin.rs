use ndarray::{Array1, Array2};

use super::linalg::{dagger, identity};
use super::state::StateVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{Matrix, C64, DEFAULT_DENSE_QUBIT_CAP};

const SPIN_DIM_CAP: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => Err(Error::Parse(format!("unknown axis '{other}'"))),
        }
    }
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

/// Spin-`S` matrix with `two_s = 2S`. Row `j` is the state `m = S - j`.
pub fn spin_operator(axis: Axis, two_s: usize) -> Result<Matrix> {
    let d = two_s + 1;
    if d > SPIN_DIM_CAP {
        return Err(Error::CapExceeded {
            what: "spin dimension",
            requested: d,
            limit: SPIN_DIM_CAP,
        });
    }
    let s = two_s as f64 / 2.0;
    let m = |j: usize| s - j as f64;
    let mut out = Array2::zeros((d, d));
    match axis {
        Axis::Z => {
            for j in 0..d {
                out[[j, j]] = C64::new(m(j), 0.0);
            }
        }
        Axis::X | Axis::Y => {
            // <m+1| S_+ |m> sits at (j-1, j).
            for j in 1..d {
                let mj = m(j);
                let amp = (s * (s + 1.0) - mj * (mj + 1.0)).sqrt() / 2.0;
                let (up, down) = match axis {
                    Axis::X => (C64::new(amp, 0.0), C64::new(amp, 0.0)),
                    _ => (C64::new(0.0, -amp), C64::new(0.0, amp)),
                };
                out[[j - 1, j]] = up;
                out[[j, j - 1]] = down;
            }
        }
    }
    Ok(out)
}

fn check_register(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("need at least one qubit"));
    }
    if n > DEFAULT_DENSE_QUBIT_CAP {
        return Err(Error::CapExceeded {
            what: "dense qubit",
            requested: n,
            limit: DEFAULT_DENSE_QUBIT_CAP,
        });
    }
    Ok(())
}

/// Equal superposition of all weight-`q` basis states.
///
/// `S_z = (1/2) sum Z` acts on it with eigenvalue `n/2 - q`, so it is the
/// spin state with index `q` in [`spin_operator`]'s basis.
pub fn dicke_state(n: usize, q: usize) -> Result<StateVector> {
    check_register(n)?;
    if q > n {
        return Err(Error::invalid(format!("excitation number {q} exceeds {n}")));
    }
    let amp = C64::new(1.0 / crate::orbit::binomial(n, q).sqrt(), 0.0);
    let a = Array1::from_shape_fn(1 << n, |i: usize| {
        if i.count_ones() as usize == q {
            amp
        } else {
            C64::new(0.0, 0.0)
        }
    });
    StateVector::normalized(a)
}

/// `2^n x (n+1)` isometry whose column `q` is `dicke_state(n, q)`.
pub fn symmetric_isometry(n: usize) -> Result<Matrix> {
    check_register(n)?;
    let norms: Vec<f64> = (0..=n).map(|q| 1.0 / crate::orbit::binomial(n, q).sqrt()).collect();
    let mut b = Array2::zeros((1 << n, n + 1));
    for i in 0..1usize << n {
        let q = i.count_ones() as usize;
        b[[i, q]] = C64::new(norms[q], 0.0);
    }
    Ok(b)
}

/// `B A B^dagger + (1 - B B^dagger)`: lifts an operator on the symmetric
/// sector to the full register, acting trivially on the complement.
pub fn embed_symmetric_operator(n: usize, op: &Matrix) -> Result<Matrix> {
    crate::error::ensure_dim(n + 1, op.nrows())?;
    crate::error::ensure_dim(n + 1, op.ncols())?;
    let b = symmetric_isometry(n)?;
    let bd = dagger(&b);
    let proj = b.dot(&bd);
    Ok(b.dot(op).dot(&bd) + identity(1 << n) - proj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{Letter, LocalGenerator};
    use crate::quantum::linalg::max_abs_diff;

    fn i() -> C64 {
        C64::new(0.0, 1.0)
    }

    #[test]
    fn spin_half_is_half_pauli() {
        for (axis, letter) in [(Axis::X, Letter::X), (Axis::Y, Letter::Y), (Axis::Z, Letter::Z)] {
            let pauli = LocalGenerator::uniform(1, letter, 0.5).unwrap().to_dense().unwrap();
            assert!(max_abs_diff(&spin_operator(axis, 1).unwrap(), &pauli) < 1e-15);
        }
    }

    #[test]
    fn commutation_relations() {
        for two_s in [1, 2, 5, 10, 31] {
            let sx = spin_operator(Axis::X, two_s).unwrap();
            let sy = spin_operator(Axis::Y, two_s).unwrap();
            let sz = spin_operator(Axis::Z, two_s).unwrap();
            let comm = sx.dot(&sy) - sy.dot(&sx);
            assert!(max_abs_diff(&comm, &sz.mapv(|v| v * i())) < 1e-10);
            let comm = sy.dot(&sz) - sz.dot(&sy);
            assert!(max_abs_diff(&comm, &sx.mapv(|v| v * i())) < 1e-10);
            // Casimir S^2 = S(S+1).
            let s = two_s as f64 / 2.0;
            let cas = sx.dot(&sx) + sy.dot(&sy) + sz.dot(&sz);
            assert!(max_abs_diff(&cas, &identity(two_s + 1).mapv(|v| v * s * (s + 1.0))) < 1e-9);
        }
    }

    #[test]
    fn trace_of_sz_squared() {
        let sz = spin_operator(Axis::Z, 10).unwrap();
        let tr: f64 = sz.dot(&sz).diag().iter().map(|v| v.re).sum();
        assert!((tr - 110.0).abs() < 1e-10);
    }

    #[test]
    fn dicke_examples() {
        assert_eq!(dicke_state(5, 0).unwrap(), StateVector::basis(32, 0).unwrap());
        let d = dicke_state(2, 1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((d.amplitudes()[1].re - h).abs() < 1e-15 && (d.amplitudes()[2].re - h).abs() < 1e-15);
        let sz = LocalGenerator::collective_z(6).unwrap().to_dense().unwrap();
        let v = sz.dot(dicke_state(6, 3).unwrap().amplitudes());
        assert!(v.iter().all(|x| x.norm() < 1e-14));
        let v = sz.dot(dicke_state(6, 1).unwrap().amplitudes());
        let expect = dicke_state(6, 1).unwrap().amplitudes().mapv(|a| a * 2.0);
        assert!(v.iter().zip(expect.iter()).all(|(a, b)| (a - b).norm() < 1e-14));
        assert!(dicke_state(3, 4).is_err());
    }

    #[test]
    fn collective_operators_restrict_to_spin_matrices() {
        let n = 5;
        let b = symmetric_isometry(n).unwrap();
        let bd = dagger(&b);
        assert!(max_abs_diff(&bd.dot(&b), &identity(n + 1)) < 1e-14);
        for (axis, letter) in [(Axis::X, Letter::X), (Axis::Y, Letter::Y), (Axis::Z, Letter::Z)] {
            let g = LocalGenerator::uniform(n, letter, 0.5).unwrap().to_dense().unwrap();
            let restricted = bd.dot(&g).dot(&b);
            assert!(
                max_abs_diff(&restricted, &spin_operator(axis, n).unwrap()) < 1e-12,
                "{axis:?}"
            );
            // The sector is invariant, so the restriction loses nothing.
            assert!(max_abs_diff(&g.dot(&b), &b.dot(&restricted)) < 1e-12);
        }
    }

    #[test]
    fn embedding_preserves_unitarity() {
        let n = 3;
        let u = crate::quantum::haar_unitary(n + 1, &mut crate::quantum::RngStream::new(1, 2).rng()).unwrap();
        let big = embed_symmetric_operator(n, &u).unwrap();
        assert!(max_abs_diff(&dagger(&big).dot(&big), &identity(8)) < 1e-12);
    }
}
