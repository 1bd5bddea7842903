//! Deterministic generators for the randomized verification suites.
//!
//! All generators draw from [`CounterRng`], so a recorded seed reproduces the
//! exact angle, frame, or model on any platform.

use crate::finprob::FiniteDistribution;
use crate::models::{FactorizedModel, Setting, StochasticKernelModel, Variant};
use crate::quantum::{Angle, Frame, Ray};
use crate::rng::CounterRng;

pub fn angle(rng: &mut CounterRng) -> Angle {
    Angle::new(rng.next_f64() * std::f64::consts::PI)
}

/// Standard-normal pair via Box–Muller.
fn gaussian_pair(rng: &mut CounterRng) -> (f64, f64) {
    let u1 = (1.0 - rng.next_f64()).max(f64::MIN_POSITIVE);
    let u2 = rng.next_f64();
    let r = (-2.0 * u1.ln()).sqrt();
    let t = 2.0 * std::f64::consts::PI * u2;
    (r * t.cos(), r * t.sin())
}

/// Uniformly distributed ray (isotropic Gaussian, normalized).
pub fn ray(rng: &mut CounterRng) -> Ray {
    loop {
        let (x, y) = gaussian_pair(rng);
        let (z, _) = gaussian_pair(rng);
        if let Ok(r) = Ray::direction([x, y, z]) {
            return r;
        }
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Random orthonormal frame: one random ray, one Gram–Schmidt companion,
/// and their cross product.
pub fn frame(rng: &mut CounterRng) -> Frame {
    loop {
        let r1 = ray(rng);
        let v = ray(rng).components();
        let c1 = r1.components();
        let proj = c1[0] * v[0] + c1[1] * v[1] + c1[2] * v[2];
        let w = [v[0] - proj * c1[0], v[1] - proj * c1[1], v[2] - proj * c1[2]];
        let Ok(r2) = Ray::direction(w) else { continue };
        let Ok(r3) = Ray::direction(cross(c1, r2.components())) else {
            continue;
        };
        if let Ok(f) = Frame::new([r1, r2, r3]) {
            return f;
        }
    }
}

/// Two frames that share one ray bit-for-bit: the second frame keeps the
/// shared ray and rotates the complementary plane by a random angle. Returns
/// the frames and the shared ray's position in each.
pub fn frame_pair_sharing_ray(rng: &mut CounterRng) -> (Frame, Frame, usize, usize) {
    let base = frame(rng);
    let [r1, r2, r3] = *base.rays();
    let phi = rng.next_f64() * std::f64::consts::PI;
    let (c, s) = (phi.cos(), phi.sin());
    let a = r2.components();
    let b = r3.components();
    let u = Ray::direction([
        c * a[0] + s * b[0],
        c * a[1] + s * b[1],
        c * a[2] + s * b[2],
    ])
    .expect("rotation of orthonormal rays");
    let v = Ray::direction([
        -s * a[0] + c * b[0],
        -s * a[1] + c * b[1],
        -s * a[2] + c * b[2],
    ])
    .expect("rotation of orthonormal rays");
    let pos_a = rng.next_index(3);
    let pos_b = rng.next_index(3);
    let place = |shared: Ray, fill: [Ray; 2], pos: usize| -> Frame {
        let mut rays = Vec::with_capacity(3);
        let mut fill = fill.into_iter();
        for k in 0..3 {
            if k == pos {
                rays.push(shared);
            } else {
                rays.push(fill.next().unwrap());
            }
        }
        Frame::new([rays[0], rays[1], rays[2]]).expect("orthonormal by construction")
    };
    (
        place(r1, [r2, r3], pos_a),
        place(r1, [u, v], pos_b),
        pos_a,
        pos_b,
    )
}

/// Full-support distribution over `n` values; weights are bounded away from
/// zero so conditionals and binomial bounds stay well-behaved.
pub fn distribution(rng: &mut CounterRng, n: usize) -> FiniteDistribution {
    let raw: Vec<f64> = (0..n).map(|_| 0.2 + rng.next_f64()).collect();
    let sum: f64 = raw.iter().sum();
    FiniteDistribution::new(raw.iter().map(|w| w / sum).collect())
        .expect("normalized full-support weights")
}

/// Random photon-variant deterministic model.
pub fn photon_model(rng: &mut CounterRng, n_a: usize, n_b: usize, n_z: usize) -> FactorizedModel {
    let settings_a: Vec<Setting> = (0..n_a).map(|_| Setting::Angle(angle(rng))).collect();
    let settings_b: Vec<Setting> = (0..n_b).map(|_| Setting::Angle(angle(rng))).collect();
    let responses = |rng: &mut CounterRng, n: usize| -> Vec<Vec<usize>> {
        (0..n)
            .map(|_| (0..n_z).map(|_| rng.next_index(2)).collect())
            .collect()
    };
    let p_a = distribution(rng, n_a);
    let p_b = distribution(rng, n_b);
    let p_z = distribution(rng, n_z);
    let response_f = responses(rng, n_a);
    let response_g = responses(rng, n_b);
    FactorizedModel::new(
        Variant::Photon,
        settings_a,
        p_a,
        settings_b,
        p_b,
        (0..n_z).map(|i| format!("z{i}")).collect(),
        p_z,
        response_f,
        response_g,
    )
    .expect("generated model is well-formed")
}

/// Random spin-one deterministic model with random frame settings.
pub fn spin1_model(rng: &mut CounterRng, n_a: usize, n_b: usize, n_z: usize) -> FactorizedModel {
    let settings_a: Vec<Setting> = (0..n_a).map(|_| Setting::Frame(frame(rng))).collect();
    let settings_b: Vec<Setting> = (0..n_b).map(|_| Setting::Frame(frame(rng))).collect();
    let responses = |rng: &mut CounterRng, n: usize| -> Vec<Vec<usize>> {
        (0..n)
            .map(|_| (0..n_z).map(|_| rng.next_index(3)).collect())
            .collect()
    };
    let p_a = distribution(rng, n_a);
    let p_b = distribution(rng, n_b);
    let p_z = distribution(rng, n_z);
    let response_f = responses(rng, n_a);
    let response_g = responses(rng, n_b);
    FactorizedModel::new(
        Variant::Spin1,
        settings_a,
        p_a,
        settings_b,
        p_b,
        (0..n_z).map(|i| format!("z{i}")).collect(),
        p_z,
        response_f,
        response_g,
    )
    .expect("generated model is well-formed")
}

/// Random photon-variant stochastic kernel model.
pub fn kernel_model(rng: &mut CounterRng, n_a: usize, n_b: usize, n_z: usize) -> StochasticKernelModel {
    let settings_a: Vec<Setting> = (0..n_a).map(|_| Setting::Angle(angle(rng))).collect();
    let settings_b: Vec<Setting> = (0..n_b).map(|_| Setting::Angle(angle(rng))).collect();
    let kernels = |rng: &mut CounterRng, n: usize| -> Vec<Vec<Vec<f64>>> {
        (0..n)
            .map(|_| {
                (0..n_z)
                    .map(|_| {
                        let p = rng.next_f64();
                        vec![1.0 - p, p]
                    })
                    .collect()
            })
            .collect()
    };
    let p_a = distribution(rng, n_a);
    let p_b = distribution(rng, n_b);
    let p_z = distribution(rng, n_z);
    let kernel_f = kernels(rng, n_a);
    let kernel_g = kernels(rng, n_b);
    StochasticKernelModel::new(
        Variant::Photon,
        settings_a,
        p_a,
        settings_b,
        p_b,
        (0..n_z).map(|i| format!("z{i}")).collect(),
        p_z,
        kernel_f,
        kernel_g,
    )
    .expect("generated model is well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_seed_deterministic() {
        let f1 = frame(&mut CounterRng::new(5));
        let f2 = frame(&mut CounterRng::new(5));
        assert_eq!(f1.to_row_major(), f2.to_row_major());
        let m1 = photon_model(&mut CounterRng::new(5), 2, 2, 4);
        let m2 = photon_model(&mut CounterRng::new(5), 2, 2, 4);
        assert_eq!(m1.response_f(), m2.response_f());
    }

    #[test]
    fn shared_ray_pairs_share_exactly() {
        for seed in 0..20 {
            let (a, b, i, j) = frame_pair_sharing_ray(&mut CounterRng::new(seed));
            assert_eq!(a.rays()[i].components(), b.rays()[j].components());
        }
    }

    #[test]
    fn generated_distributions_have_full_support() {
        let mut rng = CounterRng::new(8);
        for n in 1..=20 {
            assert!(distribution(&mut rng, n).full_support());
        }
    }
}
