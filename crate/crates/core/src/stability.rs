//! Stability verdicts: Morse index of the Hessian against the slope index.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::profile::{ProfileEvaluator, Regime, WaveParameters};
use crate::spectral::{
    discretize_operator, kernel_residual, lowest_eigenpairs, morse_index, spectrum_report, GridSpec,
    OperatorKind, Sector, SpectrumReport,
};
use crate::vk::{find_zstar, p_index, vk_row, VkScanRow, ZSTAR_PROBE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Space {
    FullH1,
    EvenH1,
}

impl Space {
    fn sector(self) -> Sector {
        match self {
            Space::FullH1 => Sector::FullLine,
            Space::EvenH1 => Sector::EvenSector,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    OrbitallyStable,
    OrbitallyUnstable,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    NumericPipeline,
    AnalyticTable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub space: Space,
    pub n_hessian: Option<usize>,
    pub p_index: Option<u8>,
    pub outcome: Outcome,
    pub provenance: Provenance,
    pub note: Option<String>,
}

/// n = p is stable, n − p odd is unstable, anything else is left open.
pub fn outcome_rule(n: usize, p: u8) -> Outcome {
    let p = p as usize;
    if n == p {
        Outcome::OrbitallyStable
    } else if n.abs_diff(p) % 2 == 1 {
        Outcome::OrbitallyUnstable
    } else {
        Outcome::Indeterminate
    }
}

const UNSTABLE_NOTE: &str = "orbital instability driven by a linearly unstable direction";

/// Kernel and sign conditions the n-versus-p rule relies on, checked on `grid`.
pub fn check_preconditions(p: &WaveParameters, grid: GridSpec) -> Result<()> {
    let full = grid.with_sector(Sector::FullLine);
    let k = kernel_residual(p, full)?;
    if k.l2_lowest >= k.guard {
        return Err(Error::Precondition(format!(
            "lowest eigenvalue of L2 ({:e}) is not a discrete zero mode (guard {:e})",
            k.l2_lowest, k.guard
        )));
    }
    if k.l1_gap <= k.guard {
        return Err(Error::Precondition(format!(
            "L1 has an eigenvalue within {:e} of zero (guard {:e}); its kernel is not trivial on this grid",
            k.l1_gap, k.guard
        )));
    }
    let l2 = discretize_operator(OperatorKind::L2, p, full)?;
    let (_, v) = &lowest_eigenpairs(&l2, 1)?[0];
    let ev = ProfileEvaluator::new(*p);
    let (mut dot, mut nv, mut nf) = (0.0, 0.0, 0.0);
    for (x, a) in full.nodes().iter().zip(v) {
        let f = ev.phi(*x);
        dot += a * f;
        nv += a * a;
        nf += f * f;
    }
    let cosine = dot / libm::sqrt(nv * nf);
    if cosine < 1.0 - 1e-4 {
        return Err(Error::Precondition(format!(
            "ground state of L2 is not parallel to phi (cosine {cosine})"
        )));
    }
    Ok(())
}

pub fn classify_numeric(p: &WaveParameters, space: Space) -> Result<Verdict> {
    classify_numeric_on(p, space, GridSpec::working(p, space.sector()))
}

pub fn classify_numeric_on(p: &WaveParameters, space: Space, grid: GridSpec) -> Result<Verdict> {
    let pi = p_index(p)?;
    check_preconditions(p, grid)?;
    let g = grid.with_sector(space.sector());
    let n = morse_index(OperatorKind::L1, p, g)? + morse_index(OperatorKind::L2, p, g)?;
    let mut outcome = outcome_rule(n, pi);
    let mut note = None;
    if outcome == Outcome::OrbitallyUnstable {
        note = Some(String::from(UNSTABLE_NOTE));
    }
    if space == Space::FullH1 && outcome == Outcome::Indeterminate {
        let even = classify_numeric_on(p, Space::EvenH1, grid)?;
        if even.outcome == Outcome::OrbitallyUnstable {
            outcome = Outcome::OrbitallyUnstable;
            note = Some(format!(
                "n - p = {} is even in H1; unstable because the even subspace is unstable",
                n - pi as usize
            ));
        }
    }
    Ok(Verdict {
        space,
        n_hessian: Some(n),
        p_index: Some(pi),
        outcome,
        provenance: Provenance::NumericPipeline,
        note,
    })
}

/// Width of the exclusion zone around Z* shared by both classifiers.
pub const ZSTAR_EXCLUSION: f64 = 1e-6;

fn table(space: Space, n: Option<usize>, p: Option<u8>, outcome: Outcome, note: Option<&str>) -> Verdict {
    Verdict {
        space,
        n_hessian: n,
        p_index: p,
        outcome,
        provenance: Provenance::AnalyticTable,
        note: note.map(String::from),
    }
}

/// Verdicts proved for λ₁ = λ₂ = 1 (the Z* threshold) and for the
/// attractive–repulsive window.
pub fn classify_analytic(p: &WaveParameters, space: Space) -> Result<Verdict> {
    use Outcome::*;
    let z = p.z;
    match p.regime {
        Regime::AttractiveAttractive if p.is_unit_aa() => {
            let zs = find_zstar(&ZSTAR_PROBE, -0.95, -0.75)?;
            if (z - zs).abs() < ZSTAR_EXCLUSION {
                return Err(Error::Degenerate(format!("z = {z} is within {ZSTAR_EXCLUSION:e} of Z* = {zs}")));
            }
            let n_full = if z > 0.0 { 1 } else if z < 0.0 { 2 } else { 1 };
            let pi = u8::from(z > zs);
            Ok(match space {
                Space::FullH1 if z >= 0.0 => table(space, Some(n_full), Some(1), OrbitallyStable, None),
                Space::FullH1 if z > zs => table(space, Some(2), Some(1), OrbitallyUnstable, Some(UNSTABLE_NOTE)),
                Space::FullH1 => table(
                    space,
                    Some(2),
                    Some(0),
                    OrbitallyUnstable,
                    Some("unstable in the even subspace and therefore in H1"),
                ),
                Space::EvenH1 if z > zs => table(space, Some(1), Some(pi), OrbitallyStable, None),
                Space::EvenH1 => table(space, Some(1), Some(0), OrbitallyUnstable, Some(UNSTABLE_NOTE)),
            })
        }
        Regime::AttractiveAttractive => Ok(table(
            space,
            None,
            None,
            Indeterminate,
            Some("no proved verdict for lambda1, lambda2 > 0 other than (1, 1); a threshold Z*(lambda1, lambda2) is only conjectured"),
        )),
        Regime::AttractiveRepulsive => {
            if z == 0.0 {
                return Err(Error::Degenerate("z = 0 is outside the proved attractive-repulsive cases".into()));
            }
            Ok(match space {
                Space::FullH1 if z > 0.0 => table(space, Some(1), Some(1), OrbitallyStable, None),
                Space::FullH1 => table(space, Some(2), Some(1), OrbitallyUnstable, Some(UNSTABLE_NOTE)),
                Space::EvenH1 if z > 0.0 => table(
                    space,
                    Some(1),
                    Some(1),
                    OrbitallyStable,
                    Some("stable in H1, hence in the even subspace"),
                ),
                Space::EvenH1 => table(space, Some(1), Some(1), OrbitallyStable, None),
            })
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpaceComparison {
    pub numeric: Verdict,
    pub analytic: Verdict,
}

impl SpaceComparison {
    pub fn agree(&self) -> bool {
        self.numeric.outcome == self.analytic.outcome
    }
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub params: WaveParameters,
    /// Reason the point was excluded (degenerate slope, L1 kernel, no proved verdict).
    pub skipped: Option<String>,
    pub spaces: Vec<SpaceComparison>,
    /// Filled in when the classifiers disagree.
    pub context: Option<(SpectrumReport, VkScanRow)>,
}

impl Comparison {
    pub fn agree(&self) -> bool {
        self.spaces.iter().all(SpaceComparison::agree)
    }
}

/// Runs both classifiers in both spaces.
pub fn compare(p: &WaveParameters) -> Result<Comparison> {
    let mut out = Comparison {
        params: *p,
        skipped: None,
        spaces: Vec::new(),
        context: None,
    };
    for space in [Space::FullH1, Space::EvenH1] {
        let analytic = match classify_analytic(p, space) {
            Ok(v) if v.outcome == Outcome::Indeterminate => {
                out.skipped = v.note.clone();
                return Ok(out);
            }
            Ok(v) => v,
            Err(e @ Error::Degenerate(_)) => {
                out.skipped = Some(format!("{e}"));
                return Ok(out);
            }
            Err(e) => return Err(e),
        };
        let numeric = match classify_numeric(p, space) {
            Ok(v) => v,
            Err(e @ (Error::Degenerate(_) | Error::Precondition(_))) => {
                out.skipped = Some(format!("{e}"));
                out.spaces.clear();
                return Ok(out);
            }
            Err(e) => return Err(e),
        };
        out.spaces.push(SpaceComparison { numeric, analytic });
    }
    if !out.agree() {
        let op = discretize_operator(OperatorKind::L1, p, GridSpec::working(p, Sector::FullLine))?;
        out.context = Some((spectrum_report(&op, 3)?, vk_row(p)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_table() {
        assert_eq!(outcome_rule(1, 1), Outcome::OrbitallyStable);
        assert_eq!(outcome_rule(2, 1), Outcome::OrbitallyUnstable);
        assert_eq!(outcome_rule(1, 0), Outcome::OrbitallyUnstable);
        assert_eq!(outcome_rule(2, 0), Outcome::Indeterminate);
        assert_eq!(outcome_rule(0, 0), Outcome::OrbitallyStable);
    }
}
