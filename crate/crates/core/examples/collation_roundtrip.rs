//! Curvature → transition functions → curvature: the flux survives the round trip, and
//! doubling the transition functions doubles it.

use cech_monopole::cochain::{Cochain, CochainValues};
use cech_monopole::collation::{
    build_partition, collate_to_form, collated_flux, quantize_with, QuantizeOptions,
};
use cech_monopole::cover::CapCover;
use cech_monopole::forms::monopole_curvature;

fn main() -> cech_monopole::Result<()> {
    let cover = CapCover::three_caps();
    let partition = build_partition(&cover)?;
    for g in [0.5, 1.0] {
        let qz = quantize_with(
            &monopole_curvature(g)?,
            &cover,
            1.0,
            1e-8,
            &QuantizeOptions::default(),
        )?;
        let flux = collated_flux(
            &collate_to_form(&qz.transitions, &partition, &qz.nerve)?,
            1e-7,
        )?
        .value;
        let CochainValues::Samples(fs) = qz.transitions.values() else {
            unreachable!("quantization produces sampled transition functions")
        };
        let doubled = Cochain::new(
            &qz.nerve,
            1,
            CochainValues::Samples(fs.iter().map(|f| f.scaled(2.0)).collect()),
        )?;
        let doubled_flux =
            collated_flux(&collate_to_form(&doubled, &partition, &qz.nerve)?, 1e-7)?.value;
        println!(
            "G = {g}: ∫F = {:.12}, collated ∫F' = {flux:.12}, from 2g: {doubled_flux:.12}",
            qz.report.total_flux
        );
    }
    Ok(())
}
