//! Shared fixtures: the running rank-3 flip example and randomised
//! generators for fans, ample divisors and flips.
#![allow(dead_code)] // each test target uses its own subset

use std::sync::Arc;

use rand::rngs::StdRng;
use rand::Rng;

use flipstab::fan::{analyze_fan, Cone, Fan};
use flipstab::flip::{build_flip, validate_flipping_cone, FlipData};
use flipstab::intersection::{cartier_and_ample, divisor_of_character, InvariantDivisor};
use flipstab::lattice::{primitive_vector, LatticeVector};
use flipstab::linalg::solve;
use flipstab::rat::{rat_int, Rat};
use flipstab::subspace::Subspace;

pub fn lv(c: &[i64]) -> LatticeVector {
    LatticeVector::from_i64(c)
}

pub fn example_rays() -> Vec<LatticeVector> {
    vec![
        lv(&[-1, -1, -1]), // u0
        lv(&[1, 0, 0]),    // u1
        lv(&[1, 1, -1]),   // u2
        lv(&[0, 1, 0]),    // u3
        lv(&[0, 0, 1]),    // u4
    ]
}

pub fn base_fan() -> Arc<Fan> {
    Arc::new(
        Fan::new(
            3,
            example_rays(),
            vec![
                vec![1, 2, 3, 4],
                vec![0, 1, 2],
                vec![0, 2, 3],
                vec![0, 3, 4],
                vec![0, 4, 1],
            ],
        )
        .expect("base fan is well formed"),
    )
}

pub fn example_flip() -> FlipData {
    let base = base_fan();
    let fc = validate_flipping_cone(&base, &Cone::new([1, 2, 3, 4])).expect("flipping cone");
    build_flip(&base, &fc).expect("flip builds")
}

pub fn l0() -> InvariantDivisor {
    InvariantDivisor::prime(0)
}

pub fn f1() -> Subspace {
    Subspace::line(&lv(&[0, 0, 1])).unwrap()
}

pub fn f2() -> Subspace {
    Subspace::span_of(&[lv(&[-1, -1, -1]), lv(&[1, 1, -1]), lv(&[0, 0, 1])]).unwrap()
}

pub fn fan_p2() -> Arc<Fan> {
    Arc::new(
        Fan::new(
            2,
            vec![lv(&[1, 0]), lv(&[0, 1]), lv(&[-1, -1])],
            vec![vec![0, 1], vec![1, 2], vec![2, 0]],
        )
        .unwrap(),
    )
}

/// The fan of octants: complete, simplicial, unimodular.
pub fn octahedron_fan() -> Fan {
    let rays = vec![
        lv(&[1, 0, 0]),
        lv(&[-1, 0, 0]),
        lv(&[0, 1, 0]),
        lv(&[0, -1, 0]),
        lv(&[0, 0, 1]),
        lv(&[0, 0, -1]),
    ];
    let mut cones = Vec::new();
    for x in [0usize, 1] {
        for y in [2usize, 3] {
            for z in [4usize, 5] {
                cones.push(vec![x, y, z]);
            }
        }
    }
    Fan::new(3, rays, cones).unwrap()
}

/// Value of the support function of `d` at `v`, read off the maximal cone
/// containing `v`.
fn support_value(fan: &Fan, d: &InvariantDivisor, v: &LatticeVector) -> Rat {
    for c in fan.max_cones() {
        let geom = fan.cone_geom(c);
        if geom.contains(v) {
            let rays: Vec<usize> = c.ray_indices().collect();
            let rows: Vec<Vec<Rat>> = rays.iter().map(|&i| fan.ray(i).to_rat_row()).collect();
            let rhs: Vec<Rat> = rays.iter().map(|&i| -d.coeff(i)).collect();
            let m = solve(&rows, &rhs).expect("divisor has linear data on the cone");
            return v.dot_rat(&m);
        }
    }
    panic!("point outside the support of a complete fan");
}

/// Stellar subdivision of a simplicial maximal cone at an interior point,
/// carrying an ample divisor along: the new coefficient starts at the
/// pullback value and is bumped until the result is ample again.
pub fn stellar_subdivide_with_ample(
    fan: &Fan,
    ample: &InvariantDivisor,
    cone_idx: usize,
    weights: &[i64],
) -> (Fan, InvariantDivisor) {
    let cone: Vec<usize> = fan.max_cones()[cone_idx].ray_indices().collect();
    assert_eq!(cone.len(), weights.len());
    let mut v = LatticeVector::zero(fan.rank());
    for (&ri, &w) in cone.iter().zip(weights) {
        assert!(w >= 1);
        v = v.add(&fan.ray(ri).scaled(&w.into()));
    }
    let v = primitive_vector(&v).unwrap();
    let phi_v = support_value(fan, ample, &v);

    let mut rays = fan.rays().to_vec();
    let new_ray = rays.len();
    rays.push(v);
    let mut cones: Vec<Vec<usize>> = fan
        .max_cones()
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != cone_idx)
        .map(|(_, c)| c.ray_indices().collect())
        .collect();
    for drop in &cone {
        let mut sub: Vec<usize> = cone.iter().copied().filter(|r| r != drop).collect();
        sub.push(new_ray);
        cones.push(sub);
    }
    let new_fan = Fan::new(fan.rank(), rays, cones).unwrap();
    let report = analyze_fan(&new_fan);
    assert!(
        report.is_valid && report.is_complete,
        "subdivision stays complete"
    );

    // raise the support function at v until strictly convex again
    let mut delta = rat_int(1);
    loop {
        let mut d = ample.clone();
        d.set(new_ray, -&phi_v - &delta);
        if cartier_and_ample(&new_fan, &d).unwrap().is_ample() {
            return (new_fan, d);
        }
        delta /= rat_int(2);
        assert!(
            delta > Rat::new(1.into(), 1_000_000.into()),
            "ample bump not found"
        );
    }
}

/// A random complete simplicial rank-3 fan with an ample divisor on it.
pub fn random_fan_with_ample(rng: &mut StdRng, steps: usize) -> (Fan, InvariantDivisor) {
    let mut fan = octahedron_fan();
    let mut ample = (0..fan.ray_count()).fold(InvariantDivisor::zero(), |acc, i| {
        acc.add(&InvariantDivisor::prime(i))
    });
    assert!(cartier_and_ample(&fan, &ample).unwrap().is_ample());
    for _ in 0..steps {
        let cone_idx = rng.gen_range(0..fan.max_cones().len());
        let arity = fan.max_cones()[cone_idx].len();
        let weights: Vec<i64> = (0..arity).map(|_| rng.gen_range(1..=3)).collect();
        let (f, a) = stellar_subdivide_with_ample(&fan, &ample, cone_idx, &weights);
        fan = f;
        ample = a;
    }
    // shear by a random principal divisor and rescale: stays ample
    let m: Vec<Rat> = (0..3).map(|_| rat_int(rng.gen_range(-2..=2))).collect();
    ample = ample
        .add(&divisor_of_character(&fan, &m))
        .scaled(&rat_int(rng.gen_range(1..=3)));
    (fan, ample)
}

/// A random unimodular change of coordinates applied to the example flip,
/// optionally subdividing one of the cones away from the flipping locus.
pub fn randomized_flip(rng: &mut StdRng) -> (FlipData, InvariantDivisor) {
    // random product of elementary integer shears and coordinate swaps
    let mut basis: Vec<LatticeVector> = vec![lv(&[1, 0, 0]), lv(&[0, 1, 0]), lv(&[0, 0, 1])];
    for _ in 0..6 {
        let i = rng.gen_range(0..3);
        let mut j = rng.gen_range(0..3);
        while j == i {
            j = rng.gen_range(0..3);
        }
        match rng.gen_range(0..3) {
            0 => basis.swap(i, j),
            1 => {
                let shear = basis[j].scaled(&rng.gen_range(-2..=2i64).into());
                basis[i] = basis[i].add(&shear);
            }
            _ => basis[i] = basis[i].scaled(&(-1i64).into()),
        }
    }
    let transform = |v: &LatticeVector| -> LatticeVector {
        let mut out = LatticeVector::zero(3);
        for (c, b) in v.0.iter().zip(&basis) {
            out = out.add(&b.scaled(c));
        }
        out
    };
    let rays: Vec<LatticeVector> = example_rays().iter().map(transform).collect();
    let mut cones = vec![
        vec![1, 2, 3, 4],
        vec![0, 1, 2],
        vec![0, 2, 3],
        vec![0, 3, 4],
        vec![0, 4, 1],
    ];
    // occasionally subdivide an outer cone to vary the combinatorics
    let mut rays = rays;
    let mut ample = l0();
    if rng.gen_bool(0.5) {
        let base = Fan::new(3, rays.clone(), cones.clone()).unwrap();
        let outer = rng.gen_range(1..cones.len());
        let (subdivided, a) = stellar_subdivide_with_ample(&base, &ample, outer, &[1, 1, 1]);
        rays = subdivided.rays().to_vec();
        cones = subdivided
            .max_cones()
            .iter()
            .map(|c| c.ray_indices().collect())
            .collect();
        ample = a;
    }
    let base = Arc::new(Fan::new(3, rays, cones).unwrap());
    let fc = validate_flipping_cone(&base, &Cone::new([1, 2, 3, 4])).unwrap();
    (build_flip(&base, &fc).unwrap(), ample)
}
