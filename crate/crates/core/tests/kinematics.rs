use proptest::prelude::*;
use salamander_core::robot::{build_robot, Limb};
use salamander_core::{BodyPose, JointVector, RobotModel, RobotVersion, ScenarioConfig};

fn model(version: RobotVersion) -> RobotModel<f64> {
    build_robot(&ScenarioConfig::for_version(version)).unwrap()
}

/// Hand-derived foot positions: shoulder mount at (+-L, +-w), limb of length l
/// at angle s from the lateral axis, front segment turned by the spine about
/// the body origin, then the body pose.
fn oracle_feet(q: &[f64], pose: (f64, f64, f64)) -> [(f64, f64); 4] {
    let (big_l, w, l) = (0.15, 0.05, 0.08);
    let spine = if q.len() > 8 { q[8] } else { 0.0 };
    let mounts = [(big_l, w, 1.0), (big_l, -w, -1.0), (-big_l, w, 1.0), (-big_l, -w, -1.0)];
    let mut out = [(0.0, 0.0); 4];
    for (i, (mx, my, side)) in mounts.iter().enumerate() {
        let s = q[2 * i];
        let mut x = mx + l * s.sin();
        let mut y = my + side * l * s.cos();
        if i < 2 {
            let (sn, cs) = spine.sin_cos();
            (x, y) = (cs * x - sn * y, sn * x + cs * y);
        }
        let (px, py, th) = pose;
        out[i] = (px + th.cos() * x - th.sin() * y, py + th.sin() * x + th.cos() * y);
    }
    out
}

#[test]
fn zero_posture_matches_hand_values() {
    let m = model(RobotVersion::Hildebrand8);
    let feet = m.forward_kinematics(&BodyPose::origin(), &m.home_posture()).unwrap();
    let expect = [(0.15, 0.13), (0.15, -0.13), (-0.15, 0.13), (-0.15, -0.13)];
    for (p, e) in feet.positions.iter().zip(expect) {
        assert!((p.x - e.0).abs() < 1e-15 && (p.y - e.1).abs() < 1e-15, "{p:?} vs {e:?}");
    }
    assert!(feet.down.iter().all(|d| *d));
}

#[test]
fn shoulder_swing_moves_foot_forward() {
    let m = model(RobotVersion::Hildebrand8);
    let mut q = m.home_posture();
    q[Limb::FrontLeft.shoulder()] = 1.0;
    let f = m.foot_in_body(&q, Limb::FrontLeft);
    assert!((f.x - (0.15 + 0.08 * 1f64.sin())).abs() < 1e-15);
    assert!((f.y - (0.05 + 0.08 * 1f64.cos())).abs() < 1e-15);
}

proptest! {
    #[test]
    fn fk_matches_oracle(
        q in proptest::collection::vec(-1.0f64..1.0, 9),
        x in -2.0f64..2.0, y in -2.0f64..2.0, th in -3.0f64..3.0,
    ) {
        let m = model(RobotVersion::Rl9);
        let qv = JointVector::new(q.clone()).unwrap();
        let feet = m.forward_kinematics(&BodyPose::new(x, y, th), &qv).unwrap();
        let expect = oracle_feet(&q, (x, y, th));
        for (p, e) in feet.positions.iter().zip(expect) {
            prop_assert!((p.x - e.0).abs() < 1e-12 && (p.y - e.1).abs() < 1e-12);
        }
    }

    #[test]
    fn mirrored_posture_mirrors_feet(q in proptest::collection::vec(-0.5f64..0.5, 9)) {
        let m = model(RobotVersion::Rl9);
        let qv = JointVector::new(q).unwrap();
        let a = m.feet_in_body(&qv).unwrap();
        let b = m.feet_in_body(&qv.mirrored()).unwrap();
        for limb in Limb::ALL {
            let pa = a.positions[limb.index()];
            let pb = b.positions[limb.mirrored().index()];
            prop_assert!((pa.x - pb.x).abs() < 1e-12 && (pa.y + pb.y).abs() < 1e-12);
            prop_assert_eq!(a.down[limb.index()], b.down[limb.mirrored().index()]);
        }
    }

    #[test]
    fn clamped_action_is_feasible(
        cur in proptest::collection::vec(-0.5f64..0.5, 8),
        req in proptest::collection::vec(-3.0f64..3.0, 8),
    ) {
        for v in [RobotVersion::Rl8, RobotVersion::Rl8TorqueLimited] {
            let m = model(v);
            let cur = JointVector::new(cur.clone()).unwrap();
            let out = m.clamp_action(&cur, &JointVector::new(req.clone()).unwrap()).unwrap();
            for j in 0..8 {
                let lim = m.joint_limits()[j];
                prop_assert!(out[j] >= lim.min && out[j] <= lim.max);
                prop_assert!((out[j] - cur[j]).abs() <= m.action_limits()[j] + 1e-12);
            }
            let again = m.clamp_action(&cur, &out).unwrap();
            prop_assert_eq!(again, out);
        }
    }
}

#[test]
fn f32_and_f64_models_agree() {
    let cfg = ScenarioConfig::for_version(RobotVersion::Rl9);
    let m64: RobotModel<f64> = build_robot(&cfg).unwrap();
    let m32: RobotModel<f32> = build_robot(&cfg).unwrap();
    let q = [0.3, -0.2, -0.7, 0.1, 0.5, 0.0, -0.1, 0.4, 0.25];
    let f64s = m64.feet_in_body(&JointVector::new(q.to_vec()).unwrap()).unwrap();
    let f32s = m32
        .feet_in_body(&JointVector::new(q.iter().map(|v| *v as f32).collect()).unwrap())
        .unwrap();
    for (a, b) in f64s.positions.iter().zip(f32s.positions) {
        assert!((a.x - b.x as f64).abs() < 1e-6 && (a.y - b.y as f64).abs() < 1e-6);
    }
}
