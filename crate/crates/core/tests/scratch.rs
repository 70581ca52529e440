//! Temporary diagnostics harness (not part of the suite).

use nsp_core::params::PhysParamsOne;
use nsp_core::rarewave::profile_onefluid;
use nsp_core::sim::{
    cfl_dt_onefluid, initial_state_onefluid, step_onefluid, GridSpec, ModelConfig, Perturbation,
    SimConfig,
};

#[test]
#[ignore]
fn probe_stability_baseline() {
    for amplitude in [0.0, 0.05] {
        let params = PhysParamsOne::new(1.0, 1.0, 2.0, 0.0, 0.1).unwrap();
        let mut config = SimConfig::new(
            ModelConfig::OneFluid(params),
            GridSpec::new(60.0, 0.1),
            200.0,
            Perturbation::gaussian(amplitude),
        );
        config.output_stride = 5.0;
        let grid = config.validate().unwrap();
        let mut state = initial_state_onefluid(&params, &config.perturbation, grid).unwrap();
        println!("--- amplitude {amplitude}, grid [{}, {}] x {}", grid.x_min, grid.x_max, grid.n_cells);
        let mut next_out = 0.0;
        while state.time < 200.0 - 1e-9 {
            if state.time >= next_out - 1e-9 {
                let profile = profile_onefluid(&params, state.time, grid).unwrap();
                let mut sup = 0.0f64;
                let mut argmax = 0.0;
                let mut sup_u = 0.0f64;
                for i in 0..grid.n_cells {
                    let d = (state.n.values()[i] - profile.nr.values()[i]).abs();
                    if d > sup {
                        sup = d;
                        argmax = grid.node(i);
                    }
                    sup_u = sup_u.max((state.u.values()[i] - profile.ur.values()[i]).abs());
                }
                let rep = nsp_core::diagnostics::energy_report_onefluid(&state, &profile, &params).unwrap();
                println!(
                    "t = {:7.2}  sup_n = {:.4e} at x = {:8.2}  sup_u = {:.4e}  qgap = {:.4e}  lyap = {:.6e}",
                    state.time, sup, argmax, sup_u, rep.quasineutral_gap, rep.lyapunov
                );
                next_out += 5.0;
            }
            let dt = cfl_dt_onefluid(&state, &params, 0.4).min(next_out - state.time).min(200.0 - state.time);
            step_onefluid(&mut state, &params, dt.max(1e-6), 0.5).unwrap();
        }
    }
}
