use arma_core::experiments::{
    experiment_convergence, experiment_mobility, experiment_response_fit, BuiltinResponse,
    ConvergenceConfig, MobilityConfig, ResponseFitConfig, Scenario,
};

fn csv_bytes(write: impl FnOnce(&mut Vec<u8>)) -> Vec<u8> {
    let mut buf = Vec::new();
    write(&mut buf);
    buf
}

fn small_mobility() -> MobilityConfig {
    MobilityConfig {
        node_count: 30,
        speeds: vec![0.0, 5.0],
        duration: 60,
        eval_every: 20,
        repetitions: 2,
        range: 300.0,
        ..MobilityConfig::default()
    }
}

#[test]
fn response_fit_has_two_columns_per_order() {
    let cfg = ResponseFitConfig {
        orders: vec![2, 4],
        grid_size: 200,
        ..Default::default()
    };
    let r = experiment_response_fit(&cfg).unwrap();
    let bytes = csv_bytes(|b| r.write_csv(&mut *b).unwrap());
    let text = String::from_utf8(bytes).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(header, "mu,g_star,arma_2,fir_2,arma_4,fir_4");
    assert_eq!(text.lines().count(), 201);
    for line in text.lines().skip(1) {
        assert_eq!(line.split(',').count(), 2 + 2 * cfg.orders.len());
    }
}

#[test]
fn response_fit_window_kind() {
    let cfg = ResponseFitConfig {
        kind: BuiltinResponse::Window,
        orders: vec![5],
        grid_size: 300,
        ..Default::default()
    };
    let r = experiment_response_fit(&cfg).unwrap();
    assert_eq!(r.arma_l2.len(), 1);
    assert!(r.arma_l2[0].is_finite() && r.fir_l2[0].is_finite());
}

#[test]
fn convergence_is_deterministic() {
    let cfg = ConvergenceConfig {
        node_count: 30,
        rounds: 40,
        ..Default::default()
    };
    let a = experiment_convergence(&cfg).unwrap();
    let b = experiment_convergence(&cfg).unwrap();
    assert_eq!(
        csv_bytes(|w| a.write_csv(&mut *w).unwrap()),
        csv_bytes(|w| b.write_csv(&mut *w).unwrap())
    );
    for name in ["parallel", "periodic", "fir"] {
        assert!(a.series(name).is_some(), "{name}");
    }
}

#[test]
fn convergence_depends_on_seed() {
    let cfg = ConvergenceConfig {
        node_count: 30,
        rounds: 10,
        ..Default::default()
    };
    let other = ConvergenceConfig {
        seed: 2,
        ..cfg.clone()
    };
    let a = experiment_convergence(&cfg).unwrap();
    let b = experiment_convergence(&other).unwrap();
    assert_ne!(
        csv_bytes(|w| a.write_csv(&mut *w).unwrap()),
        csv_bytes(|w| b.write_csv(&mut *w).unwrap())
    );
}

#[test]
fn mobility_rows_cover_speeds_and_filters() {
    let cfg = small_mobility();
    let a = experiment_mobility(&cfg).unwrap();
    let b = experiment_mobility(&cfg).unwrap();
    let bytes = csv_bytes(|w| a.write_csv(&mut *w).unwrap());
    assert_eq!(bytes, csv_bytes(|w| b.write_csv(&mut *w).unwrap()));
    let filters: std::collections::BTreeSet<_> = a.rows.iter().map(|r| r.filter.clone()).collect();
    assert_eq!(a.rows.len(), cfg.speeds.len() * filters.len());
    for s in &cfg.speeds {
        for f in &filters {
            let row = a.row(*s, f).unwrap();
            assert_eq!(row.runs.len(), cfg.repetitions);
            assert!(row.mean_error.is_finite());
        }
    }
    let text = String::from_utf8(bytes).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "speed,filter,mean_error,std_error"
    );
}

#[test]
fn scenarios_parse_from_toml() {
    let s: Scenario =
        toml::from_str("experiment = \"fig1\"\norders = [3]\ngrid_size = 100\n").unwrap();
    let r = s.run().unwrap();
    assert_eq!(r.scenario(), "fig1");
    assert!(toml::from_str::<Scenario>("experiment = \"fig9\"\n").is_err());
    assert!(toml::from_str::<Scenario>("experiment = \"fig2\"\nbogus = 1\n").is_err());
}
