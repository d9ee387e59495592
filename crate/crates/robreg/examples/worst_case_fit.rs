//! Fit a robust regression and inspect the worst case it protects against.
//!
//! ```sh
//! cargo run --example worst_case_fit
//! ```

use ndarray::array;
use robreg::robust::{adversarial_perturbation, perturbed_residual, worst_case_residual};
use robreg::solvers::{solve_weighted_l1, SolverOptions};
use robreg::{NormTag, ProblemInstance, UncertaintyModel};

fn main() -> Result<(), robreg::Error> {
    // three samples, two features, per-feature disturbance budgets
    let p = ProblemInstance::new(
        array![[1.0, 0.2], [0.3, 0.9], [-0.2, 0.5]],
        array![1.0, -2.0, 0.5],
    )?;
    let radii = array![0.3, 0.15];
    let loss = NormTag::l2();

    let sol = solve_weighted_l1(&p, &radii, &loss, &SolverOptions::default())?;
    println!("fitted weights      : {:?}", sol.x);
    println!("penalized objective : {:.12}", sol.objective);
    println!(
        "converged           : {} (gap {:.2e})",
        sol.converged, sol.certificate_gap
    );

    // the objective *is* the worst-case residual of the fitted weights
    let u = UncertaintyModel::uncoupled(radii)?;
    let x = sol.weights();
    let worst = worst_case_residual(&p, &x, &u, &loss)?;
    println!("worst-case residual : {worst:.12}");

    // and the disturbance achieving it is explicit
    let delta = adversarial_perturbation(&p, &x, &u)?;
    let achieved = perturbed_residual(&p, &x, &delta, &loss)?;
    println!("adversary achieves  : {achieved:.12}");
    Ok(())
}
