//! Coalgebra (comonoid) objects in the monoidal category of
//! n-representations: comultiplication and counit with exact axiom checking.
//!
//! The tensor is strict on ordered Kronecker bases, so associator and
//! unitors are identity reindexings; the only nontrivial coherence matrix is
//! the middle-swap permutation used when tensoring two coalgebras.
//!
//! Cofree coalgebras are out of scope: their defining colimit ranges over
//! all finite-dimensional coalgebra maps into the base object, which is not
//! a finitely enumerable diagram. This module provides the axiom checker
//! such objects would be validated with.

use crate::exactlin::{ExactMatrix, FieldSpec, LinError};
use crate::nrep::{nrep_tensor, NRepError, NRepMorphism, NRepresentation};
use crate::rep::{RepError, RepMorphism, Representation};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoalgError {
    #[error("coassociativity fails at {0}")]
    NotCoassociative(String),
    #[error("{side} counit law fails at {location}")]
    CounitLawFails { side: String, location: String },
    #[error("structure morphism has wrong endpoints: {0}")]
    EndpointMismatch(String),
    #[error(transparent)]
    NRep(#[from] NRepError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Lin(#[from] LinError),
}

/// A verified comonoid in the category of n-representations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoalgebraObject {
    pub carrier: NRepresentation,
    /// carrier -> carrier (x) carrier.
    pub comult: NRepMorphism,
    /// carrier -> monoidal unit.
    pub counit: NRepMorphism,
}

/// Checks the comonoid axioms for one slot: `delta: d -> d*d`,
/// `eps: d -> 1`, both as matrices over the slot's space of dimension `d`.
fn check_slot(
    field: FieldSpec,
    delta: &ExactMatrix,
    eps: &ExactMatrix,
    location: &str,
) -> Result<(), CoalgError> {
    let d = delta.cols();
    let id = ExactMatrix::identity(field, d);
    // (delta (x) id) . delta = (id (x) delta) . delta; the associator is the
    // identity on ordered Kronecker bases.
    let lhs = delta.kron(&id)?.mul(delta)?;
    let rhs = id.kron(delta)?.mul(delta)?;
    if lhs != rhs {
        return Err(CoalgError::NotCoassociative(location.to_string()));
    }
    // (eps (x) id) . delta = id = (id (x) eps) . delta; the unitors are
    // identity reindexings since 1*d = d on ordered bases.
    if eps.kron(&id)?.mul(delta)? != id {
        return Err(CoalgError::CounitLawFails {
            side: "left".into(),
            location: location.to_string(),
        });
    }
    if id.kron(eps)?.mul(delta)? != id {
        return Err(CoalgError::CounitLawFails {
            side: "right".into(),
            location: location.to_string(),
        });
    }
    Ok(())
}

/// Verifies raw coalgebra data: endpoint shapes, morphism conditions (via
/// the verified morphism types), and both axiom families as exact matrix
/// identities. Reports the first failing level/vertex.
pub fn check_coalgebra(
    carrier: NRepresentation,
    comult: NRepMorphism,
    counit: NRepMorphism,
) -> Result<CoalgebraObject, CoalgError> {
    if comult.source != carrier {
        return Err(CoalgError::EndpointMismatch(
            "comultiplication source is not the carrier".into(),
        ));
    }
    if comult.target != nrep_tensor(&carrier, &carrier)? {
        return Err(CoalgError::EndpointMismatch(
            "comultiplication target is not carrier (x) carrier".into(),
        ));
    }
    if counit.source != carrier {
        return Err(CoalgError::EndpointMismatch(
            "counit source is not the carrier".into(),
        ));
    }
    if counit.target != NRepresentation::unit(&carrier.quivers, carrier.field())? {
        return Err(CoalgError::EndpointMismatch(
            "counit target is not the monoidal unit".into(),
        ));
    }
    let field = carrier.field();
    for (m, q) in carrier.quivers.iter().enumerate() {
        for v in &q.vertices {
            let location = format!("level {}, vertex `{}`", m + 1, v);
            check_slot(
                field,
                comult.comp_morphisms[m].comp_at(v),
                counit.comp_morphisms[m].comp_at(v),
                &location,
            )?;
        }
    }
    Ok(CoalgebraObject {
        carrier,
        comult,
        counit,
    })
}

/// Rep-level variant of `check_coalgebra`, used to re-run the axioms over a
/// glued quiver.
pub fn check_rep_coalgebra(
    carrier: &Representation,
    comult: &RepMorphism,
    counit: &RepMorphism,
) -> Result<(), CoalgError> {
    if comult.source != *carrier
        || comult.target != crate::rep::tensor(carrier, carrier)?
        || counit.source != *carrier
        || counit.target != Representation::unit(carrier.quiver.clone(), carrier.field)
    {
        return Err(CoalgError::EndpointMismatch(
            "structure morphism endpoints".into(),
        ));
    }
    for v in &carrier.quiver.vertices {
        let location = format!("vertex `{}`", v);
        check_slot(
            carrier.field,
            comult.comp_at(v),
            counit.comp_at(v),
            &location,
        )?;
    }
    Ok(())
}

/// The canonical comonoid on the monoidal unit: every comultiplication and
/// counit component is the 1x1 identity.
pub fn unit_coalgebra(
    quivers: &[std::sync::Arc<crate::quiver::Quiver>],
    field: FieldSpec,
) -> Result<CoalgebraObject, CoalgError> {
    let carrier = NRepresentation::unit(quivers, field)?;
    let tensor = nrep_tensor(&carrier, &carrier)?;
    // carrier (x) carrier has exactly the unit's data, so the canonical iso
    // is the identity family.
    let comult = NRepMorphism::new(
        carrier.clone(),
        tensor,
        carrier.comps.iter().map(RepMorphism::identity).collect(),
    )?;
    let counit = NRepMorphism::identity(&carrier);
    check_coalgebra(carrier, comult, counit)
}

/// Middle-swap permutation on ordered Kronecker bases:
/// `(A (x) A) (x) (B (x) B) -> (A (x) B) (x) (A (x) B)`.
fn middle_swap(field: FieldSpec, da: usize, db: usize) -> ExactMatrix {
    let n = da * da * db * db;
    let mut p = ExactMatrix::zeros(field, n, n);
    for i1 in 0..da {
        for i2 in 0..da {
            for j1 in 0..db {
                for j2 in 0..db {
                    let src = ((i1 * da + i2) * db + j1) * db + j2;
                    let dst = ((i1 * db + j1) * da + i2) * db + j2;
                    p.set(dst, src, field.one());
                }
            }
        }
    }
    p
}

/// Tensor of two verified coalgebras: comultiplication is the Kronecker
/// product of the comultiplications followed by the middle swap, counit the
/// Kronecker product of the counits. The result is re-verified, not assumed.
pub fn tensor_coalgebra(
    a: &CoalgebraObject,
    b: &CoalgebraObject,
) -> Result<CoalgebraObject, CoalgError> {
    let carrier = nrep_tensor(&a.carrier, &b.carrier)?;
    let tensor = nrep_tensor(&carrier, &carrier)?;
    let field = carrier.field();
    let n = carrier.level_count();
    let mut comult_morphisms = Vec::with_capacity(n);
    let mut counit_morphisms = Vec::with_capacity(n);
    let unit = NRepresentation::unit(&carrier.quivers, field)?;
    for m in 0..n {
        let q = &carrier.quivers[m];
        let mut dm = Vec::new();
        let mut em = Vec::new();
        for v in q.vertices.iter() {
            let da = a.carrier.comps[m].dim_at(v);
            let db = b.carrier.comps[m].dim_at(v);
            let delta = middle_swap(field, da, db).mul(
                &a.comult.comp_morphisms[m]
                    .comp_at(v)
                    .kron(b.comult.comp_morphisms[m].comp_at(v))?,
            )?;
            dm.push(delta);
            em.push(
                a.counit.comp_morphisms[m]
                    .comp_at(v)
                    .kron(b.counit.comp_morphisms[m].comp_at(v))?,
            );
        }
        comult_morphisms.push(RepMorphism::new(
            carrier.comps[m].clone(),
            tensor.comps[m].clone(),
            dm,
        )?);
        counit_morphisms.push(RepMorphism::new(
            carrier.comps[m].clone(),
            unit.comps[m].clone(),
            em,
        )?);
    }
    let comult = NRepMorphism::new(carrier.clone(), tensor, comult_morphisms)?;
    let counit = NRepMorphism::new(carrier.clone(), unit, counit_morphisms)?;
    check_coalgebra(carrier, comult, counit)
}
