use graft_core::fuchsian::PantsGeometry;
use num_complex::Complex64;

fn main() {
    for lens in [[32.0, 2.0, 1.2], [32.0, 1.2, 2.0]] {
        let p = PantsGeometry::<f64>::new(lens[0], lens[1], lens[2]).unwrap();
        println!("lengths {:?}", lens);
        println!("  u={:e} c={:e} rho={:e} c^2-rho^2={:e}", p.u, p.c, p.rho, p.c * p.c - p.rho * p.rho);
        for (k, z) in p.corners.iter().enumerate() {
            let depth = (z.re / z.norm()).atanh();
            println!("  P{} = ({:e}, {:e})  |z|={:e} depth={:e}", k + 1, z.re, z.im, z.norm(), depth);
        }
        let depth_of = |z: Complex64| (z.re / z.norm()).atanh();
        println!("  wall_start_len = depth(P2) = {:e}", depth_of(p.corners[1]));
        println!("  wall_end_len   = depth(P5) = {:e}", depth_of(p.corners[4]));
    }
}
