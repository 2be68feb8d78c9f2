//! JSON document schemas for the command line: forms, quasi-formations,
//! formation isomorphisms, linking forms and raw matrices.  All unbounded
//! integers travel as decimal strings; rationals as `p/q` strings.

use serde::Deserialize;
use oddform_core::formations::{
    boundary_of_form, FormationIso, QuasiFormation, SplitFormation,
};
use oddform_core::forms::{Eps, QuadraticForm};
use oddform_core::linking::LinkingForm;
use oddform_core::matrix::Mat;
use oddform_core::ring::Ring;
use oddform_core::{Error, Result};

fn check_header(v: &Option<String>, kind: &Option<String>, want: &str) -> Result<()> {
    match v.as_deref() {
        None | Some("1") => {}
        Some(other) => {
            return Err(Error::Document(format!("unsupported format_version '{other}'")))
        }
    }
    match kind.as_deref() {
        None => Ok(()),
        Some(k) if k == want => Ok(()),
        Some(k) => Err(Error::Document(format!("expected kind '{want}', found '{k}'"))),
    }
}

#[derive(Deserialize)]
pub struct MatrixDoc {
    pub format_version: Option<String>,
    pub kind: Option<String>,
    pub ring: Ring,
    pub matrix: Mat,
}

impl MatrixDoc {
    pub fn into_mat(self) -> Result<Mat> {
        check_header(&self.format_version, &self.kind, "matrix")?;
        self.ring.validate()?;
        Ok(self.matrix.with_ring(self.ring))
    }
}

#[derive(Deserialize)]
pub struct FormDoc {
    pub format_version: Option<String>,
    pub kind: Option<String>,
    pub ring: Ring,
    pub epsilon: Eps,
    pub theta: Mat,
}

impl FormDoc {
    pub fn into_form(self) -> Result<QuadraticForm> {
        check_header(&self.format_version, &self.kind, "form")?;
        self.ring.validate()?;
        QuadraticForm::new(self.ring, self.epsilon, self.theta.with_ring(self.ring))
    }
}

#[derive(Deserialize)]
pub struct QuasiFormationDoc {
    pub format_version: Option<String>,
    pub kind: Option<String>,
    pub form: FormDoc,
    #[serde(rename = "L")]
    pub lagrangian: Mat,
    #[serde(rename = "V")]
    pub v: Mat,
    #[serde(default)]
    pub stab: usize,
}

impl QuasiFormationDoc {
    pub fn into_quasi(self) -> Result<QuasiFormation> {
        check_header(&self.format_version, &self.kind, "quasiformation")?;
        let form = self.form.into_form()?;
        let ring = form.ring;
        let mut x =
            QuasiFormation::new(form, self.lagrangian.with_ring(ring), self.v.with_ring(ring))?;
        x.stab = self.stab;
        Ok(x)
    }
}

#[derive(Deserialize)]
pub struct FormationIsoDoc {
    pub format_version: Option<String>,
    pub kind: Option<String>,
    pub alpha: Mat,
    pub beta: Mat,
    pub nu: Mat,
}

impl FormationIsoDoc {
    /// Assemble a verified stable isomorphism `d(v) + (P,P*) -> d(w) + (P',P'*)`,
    /// with the trivial ranks inferred from the matrix sizes.
    pub fn into_iso(self, v: &QuadraticForm, w: &QuadraticForm) -> Result<FormationIso> {
        check_header(&self.format_version, &self.kind, "formation_iso")?;
        let ring = v.ring;
        let alpha = self.alpha.with_ring(ring);
        if alpha.rows() < w.rank() || alpha.cols() < v.rank() {
            return Err(Error::Document("iso matrices smaller than the boundary".into()));
        }
        let p = alpha.cols() - v.rank();
        let p2 = alpha.rows() - w.rank();
        let src = boundary_of_form(v)
            .direct_sum(&SplitFormation::trivial(ring, v.epsilon.flip(), p))?;
        let tgt = boundary_of_form(w)
            .direct_sum(&SplitFormation::trivial(ring, w.epsilon.flip(), p2))?;
        FormationIso::new(src, tgt, alpha, self.beta.with_ring(ring), self.nu.with_ring(ring))
    }
}

#[derive(Deserialize)]
pub struct LinkingFormDoc {
    pub format_version: Option<String>,
    pub kind: Option<String>,
    pub epsilon: Eps,
    pub factors: Vec<String>,
    pub pairing: Vec<Vec<String>>,
    #[serde(default)]
    pub refinement: Vec<String>,
}

impl LinkingFormDoc {
    pub fn into_linking(self) -> Result<LinkingForm> {
        check_header(&self.format_version, &self.kind, "linking_form")?;
        let doc = serde_json::json!({
            "epsilon": self.epsilon.sign(),
            "factors": self.factors,
            "pairing": self.pairing,
            "refinement": self.refinement,
        });
        let lf: LinkingForm = serde_json::from_value(doc)
            .map_err(|e| Error::Document(format!("linking form: {e}")))?;
        lf.validate()?;
        Ok(lf)
    }
}

