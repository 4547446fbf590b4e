//! Condensation of a family of closed forms: the weighted sum
//! `f = Σ_p p^{−p} π_p^* f_p` on the truncated sum of the family's blocks,
//! plus the observational growth table for minimal-sup solves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Coefficient;
use crate::sumspace::PExponent;

use super::{
    cm_norm_form, is_closed, min_sup_grid, min_sup_solution, CmOptions, Form01, MinSupOptions,
    PolyForm01,
};

/// The condensation weight `p^{−p}`.
pub fn weight(p: u32) -> f64 {
    f64::from(p).powi(-(p as i32))
}

/// One family member: a closed form on `ℂ^{n(p)}` normalized (or about to
/// be normalized) to unit `C^{p−1}` norm, plus the non-constructive radius
/// metadata `r_p`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CondensationMember {
    pub p: u32,
    pub form: PolyForm01,
    pub radius_hint: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CondensationSpec {
    pub members: Vec<CondensationMember>,
}

impl CondensationSpec {
    pub fn validate(&self) -> Result<()> {
        if self.members.is_empty() {
            return Err(Error::InvalidSpec(
                "condensation needs at least one member".into(),
            ));
        }
        let mut last = 1;
        for m in &self.members {
            if m.p < 2 {
                return Err(Error::InvalidSpec(format!(
                    "member p = {} must be at least 2",
                    m.p
                )));
            }
            if m.p <= last {
                return Err(Error::InvalidSpec(
                    "member indices p must be strictly increasing".into(),
                ));
            }
            last = m.p;
        }
        Ok(())
    }
}

/// Block layout of the assembled form: `(p, dim, scalar offset)` per
/// member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockLayout {
    pub entries: Vec<(u32, usize, usize)>,
}

impl BlockLayout {
    pub fn total_dim(&self) -> usize {
        self.entries.iter().map(|&(_, dim, _)| dim).sum()
    }

    pub fn entry(&self, p: u32) -> Result<(usize, usize)> {
        self.entries
            .iter()
            .find(|&&(q, _, _)| q == p)
            .map(|&(_, dim, offset)| (dim, offset))
            .ok_or_else(|| Error::InvalidRange(format!("no block with p = {p}")))
    }
}

/// Result of a condensation: the assembled form, its layout, and the
/// rescale factor applied to each member to enforce unit `C^{p−1}` norm.
#[derive(Debug, Clone)]
pub struct CondensedForm {
    pub form: PolyForm01,
    pub layout: BlockLayout,
    pub member_scales: Vec<f64>,
    /// Members after normalization (what the weights actually multiply).
    pub normalized_members: Vec<CondensationMember>,
}

/// Assembles `Σ_p p^{−p} π_p^* f_p`. Every member must be closed; members
/// whose sampled `C^{p−1}(B_p(1))` norm strays from 1 by more than 2% are
/// rescaled to unit norm first.
pub fn condense(spec: &CondensationSpec, cm_options: &CmOptions) -> Result<CondensedForm> {
    spec.validate()?;
    let mut layout = BlockLayout {
        entries: Vec::with_capacity(spec.members.len()),
    };
    let mut offset = 0usize;
    for member in &spec.members {
        layout.entries.push((member.p, member.form.n(), offset));
        offset += member.form.n();
    }
    let total = offset;

    let mut member_scales = Vec::with_capacity(spec.members.len());
    let mut normalized_members = Vec::with_capacity(spec.members.len());
    let mut components = vec![crate::poly::PolyFunction::zero(total); total];
    for member in &spec.members {
        let report = is_closed(&member.form);
        if !report.closed {
            let max_residual = report
                .residuals
                .iter()
                .map(|(_, _, r)| r.max_coeff_norm())
                .fold(0.0, f64::max);
            return Err(Error::NotClosed { max_residual });
        }
        let p_exp = PExponent::Finite(f64::from(member.p));
        let cm = cm_norm_form(&member.form, member.p - 1, 1.0, &p_exp, cm_options);
        let scale = if (cm - 1.0).abs() > 0.02 {
            if cm == 0.0 {
                return Err(Error::InvalidSpec(format!(
                    "member p = {} has zero C^{} norm and cannot be normalized",
                    member.p,
                    member.p - 1
                )));
            }
            1.0 / cm
        } else {
            1.0
        };
        member_scales.push(scale);
        let normalized = member
            .form
            .scale(&num_complex::Complex64::new(scale, 0.0));
        let (_, member_offset) = layout.entry(member.p)?;
        let factor = num_complex::Complex64::new(weight(member.p), 0.0);
        for j in 1..=normalized.n() {
            components[member_offset + j - 1] = normalized
                .component(j)
                .embed_at(total, member_offset)?
                .scale(&factor);
        }
        normalized_members.push(CondensationMember {
            p: member.p,
            form: normalized,
            radius_hint: member.radius_hint,
        });
    }
    Ok(CondensedForm {
        form: Form01::new(components)?,
        layout,
        member_scales,
        normalized_members,
    })
}

/// Pullback of the assembled form along the block-`p` inclusion: other
/// variables set to zero and only the block's `dz̄` components kept. For a
/// condensation this recovers `p^{−p} f_p` exactly.
pub fn pullback_block(form: &PolyForm01, layout: &BlockLayout, p: u32) -> Result<PolyForm01> {
    let (dim, offset) = layout.entry(p)?;
    if layout.total_dim() != form.n() {
        return Err(Error::DimensionMismatch {
            expected: layout.total_dim(),
            got: form.n(),
        });
    }
    Form01::new(
        (1..=dim)
            .map(|j| form.component(offset + j).project_window(offset, dim))
            .collect::<Result<Vec<_>>>()?,
    )
}

/// One row of the growth experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthRow {
    pub p: u32,
    pub n: usize,
    pub r: f64,
    pub cm_norm: f64,
    pub min_sup: f64,
}

/// Observational table: for each member, the `C^{p−1}(B_p(1))` norm and
/// the minimal-sup estimate on `B_{p,n}(r)` of the normalized member.
pub fn growth_table(
    members: &[CondensationMember],
    r: f64,
    holo_degree: u32,
    grid_points: usize,
    seed: u64,
    cm_options: &CmOptions,
    minsup_options: &MinSupOptions,
) -> Result<Vec<GrowthRow>> {
    let mut rows = Vec::with_capacity(members.len());
    for member in members {
        if !is_closed(&member.form).closed {
            return Err(Error::NotClosed {
                max_residual: f64::NAN,
            });
        }
        let n = member.form.n();
        let p_exp = PExponent::Finite(f64::from(member.p));
        let cm = cm_norm_form(&member.form, member.p - 1, 1.0, &p_exp, cm_options);
        let grid = min_sup_grid(n, r, &p_exp, grid_points, seed + u64::from(member.p));
        let (_, sup_raw) = min_sup_solution(&member.form, &grid, holo_degree, minsup_options)?;
        // Minimal-sup estimate of the C^{p−1}-normalized member; both the
        // homotopy solver and the correction class are linear, so the
        // normalization is a plain division.
        let min_sup = if cm > 0.0 { sup_raw / cm } else { sup_raw };
        rows.push(GrowthRow {
            p: member.p,
            n,
            r,
            cm_norm: cm,
            min_sup,
        });
    }
    Ok(rows)
}

/// Bundled synthetic family member: `f_p = ∂̄(z̄_1^p) = p z̄_1^{p−1} dz̄_1`
/// on `ℂ^dim`, prescaled to unit sampled `C^{p−1}` norm.
pub fn synthetic_member(p: u32, dim: usize, cm_options: &CmOptions) -> CondensationMember {
    let mut zbar_pow = crate::poly::PolyFunction::constant(dim, num_complex::Complex64::new(1.0, 0.0));
    let zbar = crate::poly::PolyFunction::conj_var(dim, 1);
    for _ in 0..p {
        zbar_pow = zbar_pow.mul(&zbar);
    }
    let raw = super::dbar(&zbar_pow);
    let p_exp = PExponent::Finite(f64::from(p));
    let cm = cm_norm_form(&raw, p - 1, 1.0, &p_exp, cm_options);
    let form = raw.scale(&num_complex::Complex64::new(1.0 / cm, 0.0));
    CondensationMember {
        p,
        form,
        radius_hint: 1.0 / f64::from(p),
    }
}
