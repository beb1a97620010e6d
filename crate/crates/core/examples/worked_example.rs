//! The five-facility example end to end: operator choice, gain vector,
//! approximate and exact row values, and the objective change of each swap.

use fnqap::feasible::{apply_quadruple_flip, objective, objective_binary, to_binary};
use fnqap::gradient::{approximate_gradient, error_corrector, evaluate_full_neighbourhood, gain_vector, GradientMode};
use fnqap::instance::{Instance, Matrix};
use fnqap::neighbourhood::build_full_neighbourhood;
use fnqap::qubo::build_q_operator;

fn main() -> fnqap::Result<()> {
    let dist = Matrix::from_rows(&[
        vec![0.0, 1.0, 0.0, 1.0, 4.0],
        vec![1.0, 0.0, 4.0, 2.0, 0.0],
        vec![0.0, 0.0, 0.0, 3.0, 5.0],
        vec![2.0, 3.0, 1.0, 0.0, 1.0],
        vec![4.0, 5.0, 0.0, 3.0, 0.0],
    ])?;
    let flow = Matrix::from_rows(&[
        vec![0.0, 2.0, 1.0, 0.0, 4.0],
        vec![2.0, 0.0, 3.0, 2.0, 2.0],
        vec![1.0, 3.0, 0.0, 7.0, 0.0],
        vec![0.0, 2.0, 7.0, 0.0, 3.0],
        vec![4.0, 2.0, 0.0, 3.0, 0.0],
    ])?;
    let inst = Instance::new("five", flow, dist)?;
    let q = build_q_operator(&inst);
    println!("class {}, orientation {:?}, symmetrized {}", inst.symmetry(), q.orientation(), q.is_symmetrized());

    let x = to_binary(&[2, 0, 1, 3, 4])?;
    let native = q.decode(&x.to_permutation());
    println!("support {:?}", x.support());
    println!("x^T Q x = {} = f({native:?}) = {}", objective_binary(&q, &x)?, objective(&inst, &native)?);

    let nb = build_full_neighbourhood(&x)?;
    let gd = gain_vector(&q, &x)?;
    println!("g = {:?}", gd.g);
    let approx = approximate_gradient(&nb, &gd)?;
    let corr = error_corrector(&nb, &q);
    let exact = evaluate_full_neighbourhood(&x, &nb, &q, GradientMode::Exact)?;
    let f0 = objective_binary(&q, &x)?;
    println!("row  z1 z2 z3 z4   approx  corr   exact   f(y)-f(x)");
    for (i, r) in nb.rows().iter().enumerate() {
        let y = apply_quadruple_flip(&x, r)?;
        println!(
            "N{i}  {:>2} {:>2} {:>2} {:>2}  {:>7} {:>5} {:>7} {:>10}",
            r.z1,
            r.z2,
            r.z3,
            r.z4,
            approx.values[i],
            corr[i],
            exact.values[i],
            objective_binary(&q, &y)? - f0
        );
    }
    Ok(())
}
