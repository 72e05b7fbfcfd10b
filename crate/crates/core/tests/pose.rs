use collar_grasp_core::camera::{deproject_pixel, project_point, CameraIntrinsics, Extrinsics, GraspPose};
use collar_grasp_core::cloud::local_surface_stats;
use collar_grasp_core::linalg::{Mat3, Vec3};
use collar_grasp_core::pose::{
    estimate_orientation_from, plan_at, plan_to_world, Confidence, OrientationEstimate,
};
use collar_grasp_core::{transform_pose, Frame};
use nalgebra::{Matrix3, Matrix4, Rotation3, Unit, Vector3, Vector4};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn na_rotation(r: &mut ChaCha8Rng) -> Rotation3<f64> {
    let axis = Vector3::new(
        r.random_range(-1.0..1.0),
        r.random_range(-1.0..1.0),
        r.random_range(-1.0..1.0),
    );
    let angle = r.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle)
}

fn to_mat3(m: &Matrix3<f64>) -> Mat3<f64> {
    Mat3::from_rows([
        [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
        [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
        [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
    ])
}

fn to_na(m: &Mat3<f64>) -> Matrix3<f64> {
    let a = m.to_row_major();
    Matrix3::from_row_slice(&a)
}

fn v(p: Vec3<f64>) -> Vector3<f64> {
    Vector3::new(p.x, p.y, p.z)
}

fn random_pose(r: &mut ChaCha8Rng) -> GraspPose<f64> {
    let rot = to_mat3(na_rotation(r).matrix());
    let pos = Vec3::new(r.random_range(-0.3..0.3), r.random_range(-0.3..0.3), r.random_range(0.3..1.2));
    GraspPose::new(pos, rot, Frame::Camera)
}

fn random_extrinsics(r: &mut ChaCha8Rng) -> (Extrinsics<f64>, Rotation3<f64>, Vector3<f64>) {
    let rot = na_rotation(r);
    let t = Vector3::new(r.random_range(-2.0..2.0), r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
    let ext = Extrinsics::new(to_mat3(rot.matrix()), Vec3::new(t.x, t.y, t.z)).unwrap();
    (ext, rot, t)
}

#[test]
fn pose_transform_matches_independent_multiply() {
    let mut r = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..500 {
        let pose = random_pose(&mut r);
        let (ext, rot, t) = random_extrinsics(&mut r);
        let out = transform_pose(&pose, &ext).unwrap();
        assert_eq!(out.frame, Frame::World);
        let want_rot = rot.matrix() * to_na(&pose.orientation);
        let want_pos = rot * v(pose.position) + t;
        assert!((to_na(&out.orientation) - want_rot).abs().max() < 1e-12);
        assert!((v(out.position) - want_pos).norm() < 1e-12);
        let o = to_na(&out.orientation);
        assert!((o.transpose() * o - Matrix3::identity()).abs().max() < 1e-9);
        assert!((o.determinant() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn world_transform_preserves_distances() {
    let mut r = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let (ext, _, _) = random_extrinsics(&mut r);
        let a = random_pose(&mut r);
        let b = random_pose(&mut r);
        let d0 = a.position.distance(b.position);
        let d1 = transform_pose(&a, &ext).unwrap().position.distance(transform_pose(&b, &ext).unwrap().position);
        assert!((d0 - d1).abs() < 1e-12);
    }
}

#[test]
fn world_pose_rejects_world_input() {
    let pose = GraspPose::<f64>::new(Vec3::zeros(), Mat3::identity(), Frame::World);
    assert!(transform_pose(&pose, &Extrinsics::identity()).is_err());
}

#[test]
fn pre_grasp_example() {
    let orient = OrientationEstimate {
        rotation: Mat3::identity(),
        confidence: Confidence::Normal,
    };
    let plan = plan_at(Vec3::new(0.3, 0.2, 0.01), &orient, 0.05, Frame::Camera).unwrap();
    assert!(plan.pre_grasp.position.distance(Vec3::new(0.3, 0.2, 0.06)) < 1e-15);
    let zero = plan_at(Vec3::new(0.3, 0.2, 0.01), &orient, 0.0, Frame::Camera).unwrap();
    assert_eq!(zero.pre_grasp.position, zero.goal.position);
    assert!(plan_at(Vec3::zeros(), &orient, -0.01, Frame::Camera).is_err());
}

fn orientation_of(pose: &GraspPose<f64>) -> OrientationEstimate<f64> {
    OrientationEstimate {
        rotation: pose.orientation,
        confidence: Confidence::Normal,
    }
}

#[test]
fn plan_to_world_matches_homogeneous_matrices() {
    let mut r = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..300 {
        let pose = random_pose(&mut r);
        let plan = plan_at(pose.position, &orientation_of(&pose), 0.05, Frame::Camera).unwrap();
        let (ext, rot, t) = random_extrinsics(&mut r);
        let world = plan_to_world(&plan, &ext).unwrap();

        let mut h = rot.to_homogeneous();
        h.fixed_view_mut::<3, 1>(0, 3).copy_from(&t);
        for (cam, out) in [(&plan.goal, &world.goal), (&plan.pre_grasp, &world.pre_grasp)] {
            let mut pose_h = Matrix4::identity();
            pose_h.fixed_view_mut::<3, 3>(0, 0).copy_from(&to_na(&cam.orientation));
            pose_h.fixed_view_mut::<3, 1>(0, 3).copy_from(&v(cam.position));
            let want = h * pose_h;
            let got_p = Vector4::new(out.position.x, out.position.y, out.position.z, 1.0);
            assert!((want.column(3) - got_p).norm() < 1e-12);
            assert!((want.fixed_view::<3, 3>(0, 0) - to_na(&out.orientation)).abs().max() < 1e-12);
        }
        // Transforming then building equals building then transforming.
        let moved = transform_pose(&plan.goal, &ext).unwrap();
        let rebuilt = plan_at(moved.position, &orientation_of(&moved), 0.05, Frame::World).unwrap();
        assert!(rebuilt.pre_grasp.position.distance(world.pre_grasp.position) < 1e-12);
        assert_eq!(world.confidence, plan.confidence);
    }
}

fn anisotropic_region(r: &mut ChaCha8Rng, n: usize) -> Vec<Vec3<f64>> {
    (0..n)
        .map(|_| {
            Vec3::new(
                r.random_range(-0.03..0.03),
                r.random_range(-0.012..0.012),
                0.7 + r.random_range(-0.003..0.003),
            )
        })
        .collect()
}

#[test]
fn orientation_is_rotation_equivariant() {
    let mut r = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..200 {
        let pts = anisotropic_region(&mut r, 60);
        let rot = na_rotation(&mut r);
        let rm = to_mat3(rot.matrix());
        let moved: Vec<_> = pts.iter().map(|&p| rm.mul_vec(p)).collect();
        let origin = Vec3::zeros();
        let a = estimate_orientation_from(&local_surface_stats(&pts).unwrap(), pts[0], origin).unwrap();
        let b = estimate_orientation_from(&local_surface_stats(&moved).unwrap(), moved[0], origin).unwrap();
        for k in 0..3 {
            let expect = rm.mul_vec(a.rotation.col(k));
            let got = b.rotation.col(k);
            let c = expect.dot(got).abs().min(1.0);
            let angle = c.acos();
            assert!(angle < 1e-6, "axis {k}: {angle}");
        }
        // Z is fixed by the viewer, so it carries no sign ambiguity.
        assert!(rm.mul_vec(a.rotation.col(2)).dot(b.rotation.col(2)) > 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn pre_grasp_distance_is_offset(seed in 0u64..1_000_000, offset in 0.0f64..0.2) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let pose = random_pose(&mut r);
        let plan = plan_at(pose.position, &orientation_of(&pose), offset, Frame::Camera).unwrap();
        prop_assert!((plan.pre_grasp.position.distance(plan.goal.position) - offset).abs() < 1e-9);
        prop_assert!(plan.goal.is_valid() && plan.pre_grasp.is_valid());
    }

    #[test]
    fn deprojection_round_trips(u in 0.0f64..640.0, v in 0.0f64..480.0, d in 1u16..u16::MAX) {
        let intr = CameraIntrinsics::new(615.0, 612.0, 321.5, 238.25, 0.001).unwrap();
        let p = deproject_pixel(u, v, f64::from(d), &intr).unwrap();
        let (u2, v2, d2) = project_point(p, &intr).unwrap();
        prop_assert!((u - u2).abs() < 1e-6 && (v - v2).abs() < 1e-6 && (f64::from(d) - d2).abs() < 1e-6);
    }
}
