use graft_core::fuchsian::{FNCoords, PantsDecomposition, WeightedMulticurve};
use graft_core::grafting::{graft, multicurve_length};
use graft_core::mesh::{build_grafted_mesh, collapsing_map, harmonic_flow};
use std::time::Instant;

fn main() {
    let pd = PantsDecomposition::standard(2).unwrap();
    let theta = 2.0 * std::f64::consts::PI;
    for k in 0..=6 {
        let ell = (1u64 << k) as f64;
        let t0 = Instant::now();
        let coords = match FNCoords::new(vec![ell, 2.0, 1.2], vec![0.3, -0.1, 0.0]) {
            Ok(c) => c,
            Err(e) => { println!("k={k}: coords error {e}"); continue; }
        };
        let mu = WeightedMulticurve::single(0, theta).unwrap();
        let gs = match graft(&pd, &coords, &mu) {
            Ok(g) => g,
            Err(e) => { println!("k={k}: graft error {e}"); continue; }
        };
        let bigl = multicurve_length(&coords, &mu).unwrap();
        let res = if ell <= 4.0 { 0.15 } else { 0.25 };
        let mesh = match build_grafted_mesh(&gs, res) {
            Ok(m) => m,
            Err(e) => { println!("k={k}: mesh error {e}"); continue; }
        };
        if let Err(e) = mesh.validate() { println!("k={k}: validate error {e}"); continue; }
        let map = match collapsing_map(&gs, &mesh) {
            Ok(m) => m,
            Err(e) => { println!("k={k}: map error {e}"); continue; }
        };
        match harmonic_flow(&mesh, &map, 10, 0.0) {
            Ok((_, rep)) => println!(
                "k={k} ell={ell}: L/2={:.4} flow={:.4} margin={:.4} verts={} tris={} [{:.2?}]",
                0.5 * bigl, rep.energy, rep.energy - 0.5 * bigl,
                mesh.vertices.len(), mesh.triangles.len(), t0.elapsed()
            ),
            Err(e) => println!("k={k}: flow error {e}"),
        }
    }
}
