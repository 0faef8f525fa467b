use graft_core::fuchsian::{FNCoords, PantsDecomposition, WeightedMulticurve};
use graft_core::grafting::graft;
use graft_core::mesh::build_grafted_mesh;

fn main() {
    let pd = PantsDecomposition::standard(2).unwrap();
    let coords = FNCoords::new(vec![32.0, 2.0, 1.2], vec![0.3, -0.1, 0.0]).unwrap();
    let mu = WeightedMulticurve::single(0, 2.0 * std::f64::consts::PI).unwrap();
    let gs = graft(&pd, &coords, &mu).unwrap();
    match build_grafted_mesh(&gs, 0.25) {
        Ok(m) => println!("built: {} verts", m.vertices.len()),
        Err(e) => println!("error: {e}"),
    }
}
