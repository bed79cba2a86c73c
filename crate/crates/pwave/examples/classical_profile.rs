//! Solve the decoupled (t = 0) scalar vortex profile and inspect its core
//! slope and far-field expansion.

use pwave::asym::fit_tail;
use pwave::classical::solve_classical;
use pwave::grid::RadialGrid;
use pwave::solver::BcMode;

fn main() {
    let grid = RadialGrid::new(60.0, 3000).unwrap();
    let (p, report) = solve_classical(grid, BcMode::Asymptotic, 1e-12, 60).unwrap();
    println!(
        "converged in {} Newton steps, final residual {:.3e}",
        report.iterations, report.final_residual
    );

    // Core behavior: f(r) = f'(0) r + O(r^3).
    let h = p.grid.h;
    let f_prime_0 = (4.0 * p.f_minus[1] - p.f_minus[2]) / (2.0 * h);
    println!("core slope f'(0) = {f_prime_0:.6}");

    // Monotone, pinned between 0 and 1.
    let monotone = p.f_minus.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    let bounded = (1..p.grid.n).all(|i| p.f_minus[i] > 0.0 && p.f_minus[i] < 1.0);
    println!("monotone: {monotone}, strictly inside (0, 1): {bounded}");

    // Far field: f = 1 - 1/(2 r^2) - 9/(8 r^4) + ...
    let fit = fit_tail(&p, 25.0, 54.0).unwrap();
    println!(
        "tail fit on [25, 54]:  a = {:+.6}  (expansion: -0.5)",
        fit.a_minus
    );
    println!(
        "                       b = {:+.6}  (expansion: -1.125)",
        fit.b_minus
    );
    println!("fit rms {:.3e}", fit.rms_minus);

    let mid = p.grid.n / 2;
    println!(
        "sample: f({:.1}) = {:.12}",
        p.grid.r[mid],
        p.f_minus[mid]
    );
}
