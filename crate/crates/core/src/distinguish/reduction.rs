//! Exact reduction of the qutrit zero-constraint system.
//!
//! For the target `(|0⟩⊗⟨0| + |1⟩⊗⟨1| - |2⟩⊗⟨2|)/√3` and the four
//! two-outcome measurements built from `|0⟩`, `|1⟩`, `|±⟩` and `|±i⟩` (each
//! completed with `|2⟩` in the second outcome), every zero outcome gives a
//! linear equation in the products `x_kl = α_k β_l` of a separable member.
//! Row-reducing those equations with the anchor product `x_00` kept free
//! expresses the constrained products as multiples of `x_00`; the 2×2 minor
//! identities `x_ij x_kl = x_il x_kj` that every product state satisfies then
//! expose the inconsistency.

use num_complex::Complex64;
use serde::Serialize;

use super::ZeroConstraintSystem;
use crate::error::{Error, Result};
use crate::linalg::{self, real, CMatrix, I, ONE, ZERO};
use crate::measurement::{measurement_from_basis_grouping, Measurement};
use crate::twin::{StateVector, TwoStateVector};

const SNAP: f64 = 1e-9;
const DIM: usize = 3;

pub fn example3_target() -> TwoStateVector {
    let s = real(1.0 / 3f64.sqrt());
    TwoStateVector::diagonal(&[s, s, -s]).expect("nonzero")
}

/// The four measurements `{P_1^(i), P_2^(i)}`, in order: `|0⟩`, `|1⟩`,
/// `|+⟩`, `|+i⟩` against the rest of the space.
pub fn example3_family() -> Vec<Measurement> {
    let v = |a: Complex64, b: Complex64| StateVector::unit(vec![a, b, ZERO]).expect("nonzero");
    let k2 = StateVector::basis(DIM, 2).expect("in range");
    let bases = [
        vec![v(ONE, ZERO), v(ZERO, ONE), k2.clone()],
        vec![v(ZERO, ONE), v(ONE, ZERO), k2.clone()],
        vec![v(ONE, ONE), v(ONE, -ONE), k2.clone()],
        vec![v(ONE, I), v(ONE, -I), k2],
    ];
    bases
        .iter()
        .map(|b| {
            measurement_from_basis_grouping(b, &[vec![0], vec![1, 2]], crate::DEFAULT_TOL)
                .expect("orthonormal basis")
        })
        .collect()
}

/// `Σ_{k,l} c_kl α_k β_l = 0` for one zero outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BilinearEquation {
    pub measurement: usize,
    pub outcome: usize,
    /// `coefficients[k][l]` multiplies `α_k β_l`.
    pub coefficients: Vec<Vec<Complex64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Example3Reduction {
    pub equations: Vec<BilinearEquation>,
    /// The anchor product, required to be nonzero.
    pub anchor: (usize, usize),
    /// `(k, l, c)` meaning `α_k β_l = c · α_a β_a` with `a` the anchor.
    pub reduced: Vec<(usize, usize, Complex64)>,
    /// First violated minor `((i, j), (k, l))`: `x_ij x_kl ≠ x_il x_kj`.
    pub violated_minor: Option<((usize, usize), (usize, usize))>,
    pub contradiction: bool,
    pub text: String,
}

fn snap_real(x: f64) -> f64 {
    let scaled = (x * 12.0).round();
    if (x * 12.0 - scaled).abs() < SNAP * 12.0 {
        scaled / 12.0 + 0.0
    } else {
        x
    }
}

fn snap(z: Complex64) -> Complex64 {
    Complex64::new(snap_real(z.re), snap_real(z.im))
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Twelfths print as reduced fractions, anything else as a decimal.
fn fmt_real(x: f64) -> String {
    let twelfths = x * 12.0;
    if (twelfths - twelfths.round()).abs() < 1e-12 {
        let n = twelfths.round() as i64;
        let g = gcd(n, 12).max(1);
        let (n, d) = (n / g, 12 / g);
        if d == 1 {
            format!("{n}")
        } else {
            format!("{n}/{d}")
        }
    } else {
        format!("{x:.12}")
    }
}

/// Coefficient as a standalone value, e.g. `1`, `-1/2`, `i/2`, `(1/2 - i/2)`.
fn fmt_complex(z: Complex64) -> String {
    match (z.re == 0.0, z.im == 0.0) {
        (_, true) => fmt_real(z.re),
        (true, false) => fmt_imag(z.im),
        (false, false) => {
            let im = fmt_imag(z.im.abs());
            let sign = if z.im < 0.0 { '-' } else { '+' };
            format!("({} {sign} {im})", fmt_real(z.re))
        }
    }
}

fn fmt_imag(y: f64) -> String {
    let r = fmt_real(y);
    match r.as_str() {
        "1" => "i".into(),
        "-1" => "-i".into(),
        _ => match r.split_once('/') {
            Some(("1", d)) => format!("i/{d}"),
            Some(("-1", d)) => format!("-i/{d}"),
            _ => format!("{r}i"),
        },
    }
}

fn monomial((k, l): (usize, usize)) -> String {
    format!("α{k}β{l}")
}

/// `c·m` as a signed term; `first` controls the leading sign style.
fn fmt_term(c: Complex64, m: &str, first: bool) -> String {
    let (neg, mag) = if c.im == 0.0 && c.re < 0.0 {
        (true, Complex64::new(-c.re, 0.0))
    } else if c.re == 0.0 && c.im < 0.0 {
        (true, Complex64::new(0.0, -c.im))
    } else {
        (false, c)
    };
    let body = if mag == ONE {
        m.to_string()
    } else {
        format!("{} {m}", fmt_complex(mag))
    };
    match (first, neg) {
        (true, false) => body,
        (true, true) => format!("-{body}"),
        (false, false) => format!(" + {body}"),
        (false, true) => format!(" - {body}"),
    }
}

fn fmt_linear(terms: &[(Complex64, String)]) -> String {
    let nonzero: Vec<_> = terms.iter().filter(|(c, _)| *c != ZERO).collect();
    if nonzero.is_empty() {
        return "0".into();
    }
    nonzero
        .iter()
        .enumerate()
        .map(|(i, (c, m))| fmt_term(*c, m, i == 0))
        .collect()
}

fn label(mi: usize, oi: usize) -> String {
    format!("P_{}^({})", oi + 1, mi + 1)
}

/// Coefficients of `Tr(P Φ)` in the products `α_k β_l`: `c_kl = P_lk`.
fn coefficients(p: &CMatrix) -> Vec<Vec<Complex64>> {
    (0..p.nrows())
        .map(|k| (0..p.ncols()).map(|l| snap(p[(l, k)])).collect())
        .collect()
}

fn check_shape(sys: &ZeroConstraintSystem) -> Result<()> {
    let bad = |why: &str| Err(Error::ShapeMismatch(why.into()));
    if sys.dim() != DIM {
        return bad("dimension is not 3");
    }
    let t = sys.target.matrix();
    let reference = example3_target();
    let scale = t[(0, 0)] / reference.entry(0, 0);
    if scale == ZERO || linalg::max_abs(&(t - reference.matrix() * scale)) > SNAP * t[(0, 0)].norm()
    {
        return bad("target is not proportional to diag(1, 1, -1)");
    }
    let family = example3_family();
    if sys.measurements.len() != family.len() {
        return bad("expected four measurements");
    }
    for (m, r) in sys.measurements.iter().zip(&family) {
        if m.len() != 2
            || m.projectors()
                .iter()
                .zip(r.projectors())
                .any(|(p, q)| linalg::max_abs(&(p.matrix() - q.matrix())) > SNAP)
        {
            return bad("measurement family differs");
        }
    }
    if sys.zero_outcomes != [(0, 1), (1, 1), (2, 1), (3, 1)] || sys.anchor != (0, 0) {
        return bad("zero outcomes differ");
    }
    Ok(())
}

/// Reduced row echelon form over the given column order; returns the pivot
/// column for each nonzero row.
fn row_reduce(rows: &mut [Vec<Complex64>], columns: &[usize]) -> Vec<(usize, usize)> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for &col in columns {
        if r == rows.len() {
            break;
        }
        let Some(best) = (r..rows.len())
            .filter(|&i| rows[i][col].norm() > SNAP)
            .max_by(|&a, &b| rows[a][col].norm().total_cmp(&rows[b][col].norm()))
        else {
            continue;
        };
        rows.swap(r, best);
        let lead = rows[r][col];
        for z in rows[r].iter_mut() {
            *z = snap(*z / lead);
        }
        for i in 0..rows.len() {
            if i != r {
                let f = rows[i][col];
                if f != ZERO {
                    let pivot_row = rows[r].clone();
                    for (z, p) in rows[i].iter_mut().zip(pivot_row) {
                        *z = snap(*z - f * p);
                    }
                }
            }
        }
        pivots.push((r, col));
        r += 1;
    }
    pivots
}

/// Derives the reduced system and the contradiction for the qutrit
/// counterexample. Any other system is rejected with `ShapeMismatch`.
pub fn reduce_example3(sys: &ZeroConstraintSystem) -> Result<Example3Reduction> {
    check_shape(sys)?;
    let idx = |(k, l): (usize, usize)| k * DIM + l;
    let unidx = |c: usize| (c / DIM, c % DIM);

    let equations: Vec<BilinearEquation> = sys
        .zero_outcomes
        .iter()
        .map(|&(mi, oi)| BilinearEquation {
            measurement: mi,
            outcome: oi,
            coefficients: coefficients(sys.projector((mi, oi))),
        })
        .collect();

    let anchor_coeffs = coefficients(sys.projector(sys.anchor));
    let anchor_terms: Vec<(usize, usize)> = (0..DIM)
        .flat_map(|k| (0..DIM).map(move |l| (k, l)))
        .filter(|&(k, l)| anchor_coeffs[k][l] != ZERO)
        .collect();
    let [anchor] = anchor_terms[..] else {
        return Err(Error::ShapeMismatch(
            "anchor is not a single product".into(),
        ));
    };

    let mut rows: Vec<Vec<Complex64>> = equations
        .iter()
        .map(|e| e.coefficients.iter().flatten().copied().collect())
        .collect();
    let columns: Vec<usize> = (0..DIM * DIM)
        .filter(|&c| c != idx(anchor))
        .chain(std::iter::once(idx(anchor)))
        .collect();
    let pivots = row_reduce(&mut rows, &columns);

    // Each pivot product in terms of the anchor, when nothing else is free.
    let mut in_anchor: Vec<Option<Complex64>> = vec![None; DIM * DIM];
    in_anchor[idx(anchor)] = Some(ONE);
    let mut reduced = Vec::new();
    let mut reduced_lines = Vec::new();
    for &(r, col) in &pivots {
        let others: Vec<usize> = (0..DIM * DIM)
            .filter(|&c| c != col && rows[r][c] != ZERO)
            .collect();
        if others.iter().all(|&c| c == idx(anchor)) {
            let c = snap(-rows[r][idx(anchor)]) + ZERO;
            in_anchor[col] = Some(c);
            reduced.push((unidx(col).0, unidx(col).1, c));
            reduced_lines.push(format!(
                "  {} = {}",
                monomial(unidx(col)),
                fmt_linear(&[(c, monomial(anchor))])
            ));
        } else {
            let terms: Vec<_> = (0..DIM * DIM)
                .map(|c| (rows[r][c], monomial(unidx(c))))
                .collect();
            reduced_lines.push(format!("  {} = 0", fmt_linear(&terms)));
        }
    }

    let mut violated_minor = None;
    'search: for i in 0..DIM {
        for k in i + 1..DIM {
            for j in 0..DIM {
                for l in j + 1..DIM {
                    let get = |a, b| in_anchor[idx((a, b))];
                    if let (Some(a), Some(b), Some(c), Some(d)) =
                        (get(i, j), get(k, l), get(i, l), get(k, j))
                    {
                        if (a * b - c * d).norm() > SNAP {
                            violated_minor = Some(((i, j), (k, l)));
                            break 'search;
                        }
                    }
                }
            }
        }
    }

    let mut text = String::new();
    text.push_str(&format!(
        "zero-outcome constraints ({}):\n",
        equations.len()
    ));
    for e in &equations {
        let terms: Vec<_> = (0..DIM)
            .flat_map(|k| (0..DIM).map(move |l| (k, l)))
            .map(|(k, l)| (e.coefficients[k][l], monomial((k, l))))
            .collect();
        text.push_str(&format!(
            "  Tr({} Φ) = {} = 0\n",
            label(e.measurement, e.outcome),
            fmt_linear(&terms)
        ));
    }
    text.push_str("story anchor:\n");
    text.push_str(&format!(
        "  Tr({} Φ) = {} ≠ 0\n",
        label(sys.anchor.0, sys.anchor.1),
        monomial(anchor)
    ));
    text.push_str("reduced system:\n");
    for line in &reduced_lines {
        text.push_str(line);
        text.push('\n');
    }
    text.push_str(&format!("  {} ≠ 0\n", monomial(anchor)));
    text.push_str("contradiction:\n");
    match violated_minor {
        Some(((i, j), (k, l))) => {
            let get = |a, b| in_anchor[idx((a, b))].expect("checked");
            let lhs = get(i, j) * get(k, l);
            let rhs = get(i, l) * get(k, j);
            text.push_str(&format!(
                "  separable products satisfy ({})({}) = ({})({})\n",
                monomial((i, j)),
                monomial((k, l)),
                monomial((i, l)),
                monomial((k, j))
            ));
            text.push_str(&format!(
                "  substituting: {} ({})^2 = {} ({})^2 with {} ≠ 0\n",
                fmt_complex(snap(lhs) + ZERO),
                monomial(anchor),
                fmt_complex(snap(rhs) + ZERO),
                monomial(anchor),
                monomial(anchor)
            ));
            text.push_str("  the system is inconsistent\n");
        }
        None => text.push_str("  none found\n"),
    }

    Ok(Example3Reduction {
        equations,
        anchor,
        reduced,
        contradiction: violated_minor.is_some(),
        violated_minor,
        text,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distinguish::zero_constraints;
    use crate::DEFAULT_TOL;

    fn system() -> ZeroConstraintSystem {
        zero_constraints(&example3_target(), &example3_family(), DEFAULT_TOL).unwrap()
    }

    #[test]
    fn formats_coefficients() {
        assert_eq!(fmt_complex(real(0.5)), "1/2");
        assert_eq!(fmt_complex(Complex64::new(0.0, -0.5)), "-i/2");
        assert_eq!(fmt_complex(Complex64::new(0.5, 0.5)), "(1/2 + i/2)");
        assert_eq!(fmt_complex(real(-1.0)), "-1");
        assert_eq!(fmt_complex(ZERO), "0");
        assert_eq!(
            fmt_linear(&[(real(-0.5), "x".into()), (I, "y".into())]),
            "-1/2 x + i y"
        );
    }

    #[test]
    fn reduction_is_contradictory() {
        let r = reduce_example3(&system()).unwrap();
        assert!(r.contradiction);
        assert_eq!(r.violated_minor, Some(((0, 0), (1, 1))));
        assert_eq!(r.anchor, (0, 0));
    }

    #[test]
    fn rejects_other_systems() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let ex2 = TwoStateVector::diagonal(&[real(s), real(s)]).unwrap();
        let sys =
            zero_constraints(&ex2, &[Measurement::computational(2).unwrap()], DEFAULT_TOL).unwrap();
        assert!(matches!(
            reduce_example3(&sys),
            Err(Error::ShapeMismatch(_))
        ));

        let mut sys = system();
        sys.measurements.swap(2, 3);
        assert!(matches!(
            reduce_example3(&sys),
            Err(Error::ShapeMismatch(_))
        ));

        let other = TwoStateVector::diagonal(&[real(1.0), real(1.0), real(-1.0)]).unwrap();
        let scaled = zero_constraints(
            &other.scale(Complex64::new(0.0, 2.0)).unwrap(),
            &example3_family(),
            DEFAULT_TOL,
        )
        .unwrap();
        assert!(reduce_example3(&scaled).is_ok());
    }
}
