use steklov_lab::eigen::{first_eigenpair, SolverOpts};
use steklov_lab::mesh::Mesh;
use steklov_lab::weights::{WeightKind, WeightSpec};

fn main() {
    for (p, q, tol) in [(2.0f64, 4.0f64, 1e-9), (1.5, 4.0, 1e-8)] {
        let w = WeightSpec::new(WeightKind::Composite {
            base: Box::new(WeightSpec::new(WeightKind::BoxPower { q })),
            shift: None,
        });
        println!("p = {p}, q = {q}, grade 2");
        let mut prev: Option<f64> = None;
        for n in [16usize, 32, 64] {
            let mesh = Mesh::box_graded(0.25, n, 2.0);
            let g = w.sample_on_boundary(&mesh).unwrap();
            let opts = SolverOpts { seeds: 4, tol, ..Default::default() };
            let t = std::time::Instant::now();
            match first_eigenpair(&mesh, &g, p, &opts) {
                Ok(res) => {
                    let l1 = res.lambda1;
                    let gap = prev.map(|q2| (l1 - q2).abs() / l1);
                    println!("  n={n:3} lambda1={l1:.9} gap={gap:?} res={:.2e} agree={:.2e} iters={:?} {:?}",
                        res.residual_norm, res.seed_agreement, res.iterations, t.elapsed());
                    prev = Some(l1);
                }
                Err(e) => println!("  n={n:3} FAILED: {e} after {:?}", t.elapsed()),
            }
        }
    }
}
