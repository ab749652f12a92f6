use ehcap::csma::evaluate_csma;
use ehcap::game::sne;
use ehcap::{
    AccessSet, AlohaNetwork, AlohaNetwork32, AlohaNetwork64, Battery, BackoffBranch, ChannelParams32, ChannelParams64,
    CsmaParams, CsmaParams32, CsmaParams64, EnergyModel32, EnergyModel64, Error, NetworkParams32, NetworkParams64,
    QuadratureSpec,
};

fn net64(lambda: f64, p: f64, battery: Battery) -> AlohaNetwork64 {
    let channel = ChannelParams64::new(3.0, 2.0, 2.0).unwrap();
    let energy = EnergyModel64::new(p, battery).unwrap();
    AlohaNetwork::new(&NetworkParams64::new(lambda, channel, energy).unwrap())
}

fn net32(lambda: f32, p: f32, battery: Battery) -> AlohaNetwork32 {
    let channel = ChannelParams32::new(3.0, 2.0, 2.0).unwrap();
    let energy = EnergyModel32::new(p, battery).unwrap();
    AlohaNetwork::new(&NetworkParams32::new(lambda, channel, energy).unwrap())
}

#[test]
fn single_and_double_precision_agree() {
    for battery in [Battery::Unbounded, Battery::Finite(1), Battery::Finite(5)] {
        let (a, b) = (net64(0.1, 0.5, battery), net32(0.1, 0.5, battery));
        for q in [0.05, 0.2, 0.5, 0.9] {
            let (x, y) = (a.evaluate(q), b.evaluate(q as f32));
            assert!(((x.capacity - y.capacity as f64) / x.capacity).abs() < 1e-4, "{battery} q={q}");
        }
        let (oa, ob) = (a.optimal_access(), b.optimal_access());
        assert!((oa.capacity - ob.capacity as f64).abs() / oa.capacity < 1e-4);
    }
}

#[test]
fn csma_in_both_precisions() {
    let ch64 = ChannelParams64::new(3.0, 2.0, 2.0).unwrap();
    let ch32 = ChannelParams32::new(3.0, 2.0, 2.0).unwrap();
    for (lambda, branch) in [(0.01, BackoffBranch::HighEnergy), (0.1, BackoffBranch::EnergyLimited)] {
        let p64: CsmaParams64 = CsmaParams::new(
            NetworkParams64::new(lambda, ch64, EnergyModel64::new(0.5, Battery::Unbounded).unwrap()).unwrap(),
            2,
        )
        .unwrap();
        let p32: CsmaParams32 = CsmaParams::new(
            NetworkParams32::new(lambda as f32, ch32, EnergyModel32::new(0.5, Battery::Unbounded).unwrap()).unwrap(),
            2,
        )
        .unwrap();
        let a = evaluate_csma(&p64, &QuadratureSpec::default()).unwrap();
        let b = evaluate_csma(&p32, &QuadratureSpec::default()).unwrap();
        assert_eq!(a.branch, branch);
        assert_eq!(b.branch, branch);
        assert!((a.p_out - b.p_out as f64).abs() < 1e-4);
        assert!(a.p_out <= a.fkg_bound + 1e-9);
    }
}

#[test]
fn optimum_and_equilibrium() {
    let net = net64(0.1, 0.5, Battery::Unbounded);
    match net.optimal_access().kind {
        AccessSet::Point(q) => assert!((q - net.critical_ratio()).abs() < 1e-15),
        other => panic!("{other}"),
    }
    let eq = sne(&net);
    assert!(eq.poa > 1.0);
    assert!(eq.capacity_at_sne < net.optimal_access().capacity);
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(matches!(ChannelParams64::new(2.0, 2.0, 2.0), Err(Error::InvalidParameter { .. })));
    assert!(ChannelParams64::new(3.0, -1.0, 2.0).is_err());
    assert!(ChannelParams64::new(3.0, 2.0, f64::NAN).is_err());
    assert!(EnergyModel64::new(1.5, Battery::Unbounded).is_err());
    assert!(Battery::finite(0).is_err());
    let ch = ChannelParams64::new(3.0, 2.0, 2.0).unwrap();
    let finite = NetworkParams64::new(0.1, ch, EnergyModel64::new(0.5, Battery::Finite(3)).unwrap()).unwrap();
    assert!(matches!(CsmaParams::new(finite, 1), Err(Error::Unsupported(_))));
    let unbounded = NetworkParams64::new(0.1, ch, EnergyModel64::new(0.5, Battery::Unbounded).unwrap()).unwrap();
    assert!(CsmaParams::new(unbounded, 0).is_err());
    assert!(NetworkParams64::new(-0.1, ch, EnergyModel64::new(0.5, Battery::Unbounded).unwrap()).is_err());
}
