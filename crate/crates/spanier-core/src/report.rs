//! Plain report payloads for the presentation- and Spanier-level queries.
//!
//! The richer pipelines carry their own report types
//! ([`crate::covering::UniversalCertificate`], [`crate::wedge::T3Report`],
//! [`crate::tower::CoverabilityReport`]); these smaller ones cover the
//! single-shot questions and keep everything rendered and serializable.

use alloc::string::String;
use alloc::vec::Vec;

use crate::fpgroup::AbelianInvariants;
use crate::spanier::{NormalSubgroupData, Pi1Data};

/// Generators, relators and abelianization of a fundamental group.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PresentationReport {
    pub generators: Vec<String>,
    pub relators: Vec<String>,
    pub abelianization: AbelianInvariants,
}

pub fn presentation_report(data: &Pi1Data) -> PresentationReport {
    PresentationReport {
        generators: data.presentation.generators.clone(),
        relators: data.presentation.relators.iter().map(|r| data.presentation.render(r)).collect(),
        abelianization: crate::fpgroup::abelianization(&data.presentation, &[]),
    }
}

/// Normal generators of a Spanier group with the abelianized quotient.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpanierReport {
    pub normal_generators: Vec<String>,
    pub quotient_abelianization: AbelianInvariants,
    pub provenance: String,
}

pub fn spanier_report(data: &NormalSubgroupData) -> SpanierReport {
    SpanierReport {
        normal_generators: data
            .generators
            .iter()
            .map(|w| data.pi1.presentation.render(w))
            .collect(),
        quotient_abelianization: data.quotient_invariants(),
        provenance: data.provenance.clone(),
    }
}
