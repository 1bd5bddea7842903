//! Quantum-mechanical predictions used as "Nature": closed-form statistics
//! for the photon EPR experiment and the spin-one experiment, plus Born-rule
//! oracles that recompute them from explicit state vectors and operators.
//!
//! The oracles share no arithmetic with the closed forms: the photon oracle
//! contracts a 4-dimensional state with polarization projectors, the
//! spin-one oracle builds the angular-momentum component operators, squares
//! them, and evaluates the joint on the 9-dimensional product state. Both
//! must agree with the closed forms to within [`tol::EXACT`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

type C = Complex64;

/// A polarizer axis, normalized into `[0, π)`; the axis is orientation-free
/// so angles differing by π name the same setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angle(f64);

impl Angle {
    pub fn new(radians: f64) -> Angle {
        let mut v = radians.rem_euclid(std::f64::consts::PI);
        // rem_euclid can land exactly on π through rounding
        if v >= std::f64::consts::PI {
            v = 0.0;
        }
        Angle(v)
    }

    pub fn radians(&self) -> f64 {
        self.0
    }
}

/// A direction in 3-space, unit-norm and defined up to sign. The stored
/// representative is canonical: its first nonzero component is positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    components: [f64; 3],
}

impl Ray {
    /// Requires a vector already of unit norm within [`tol::ORTHO`];
    /// canonicalizes the sign.
    pub fn new(components: [f64; 3]) -> Result<Ray> {
        let norm = dot3(&components, &components).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > tol::ORTHO {
            return Err(Error::Input(format!("ray norm {norm} not within {} of 1", tol::ORTHO)));
        }
        Ok(Ray {
            components: canonical_sign(components),
        })
    }

    /// Scales an arbitrary nonzero vector to unit norm, then canonicalizes.
    /// A line in a ray file denotes a direction, so this is the file and
    /// CLI entry point.
    pub fn direction(components: [f64; 3]) -> Result<Ray> {
        let norm = dot3(&components, &components).sqrt();
        if !norm.is_finite() || norm < 1e-12 {
            return Err(Error::Input("ray direction must be a nonzero finite vector".into()));
        }
        Ok(Ray {
            components: canonical_sign([
                components[0] / norm,
                components[1] / norm,
                components[2] / norm,
            ]),
        })
    }

    pub fn components(&self) -> [f64; 3] {
        self.components
    }

    pub fn dot(&self, other: &Ray) -> f64 {
        dot3(&self.components, &other.components)
    }

    /// Same direction up to sign, at the orthogonality tolerance.
    pub fn same_direction(&self, other: &Ray) -> bool {
        self.dot(other).abs() >= 1.0 - tol::ORTHO
    }
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn canonical_sign(v: [f64; 3]) -> [f64; 3] {
    for c in v {
        if c.abs() > tol::ORTHO {
            return if c < 0.0 { [-v[0], -v[1], -v[2]] } else { v };
        }
    }
    v
}

/// An orthonormal basis of 3-space with axes defined up to sign: the
/// spin-one measurement setting. Rays failing pairwise orthogonality within
/// [`tol::ORTHO`] are rejected, never re-orthogonalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    rays: [Ray; 3],
}

impl Frame {
    pub fn new(rays: [Ray; 3]) -> Result<Frame> {
        for i in 0..3 {
            for j in (i + 1)..3 {
                let d = rays[i].dot(&rays[j]).abs();
                if d > tol::ORTHO {
                    return Err(Error::Input(format!(
                        "frame rays {i} and {j} have inner product {d}, not orthogonal"
                    )));
                }
            }
        }
        Ok(Frame { rays })
    }

    /// Nine reals, row per ray; rows are taken as directions.
    pub fn from_row_major(v: &[f64]) -> Result<Frame> {
        if v.len() != 9 {
            return Err(Error::Input(format!("frame needs 9 reals, got {}", v.len())));
        }
        Frame::new([
            Ray::direction([v[0], v[1], v[2]])?,
            Ray::direction([v[3], v[4], v[5]])?,
            Ray::direction([v[6], v[7], v[8]])?,
        ])
    }

    pub fn rays(&self) -> &[Ray; 3] {
        &self.rays
    }

    pub fn to_row_major(&self) -> [f64; 9] {
        let mut out = [0.0; 9];
        for (i, r) in self.rays.iter().enumerate() {
            out[3 * i..3 * i + 3].copy_from_slice(&r.components());
        }
        out
    }

    /// Positions `(i, j)` with `self.rays[i] = ±other.rays[j]`.
    pub fn shared_rays(&self, other: &Frame) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                if self.rays[i].same_direction(&other.rays[j]) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// Joint outcome probabilities for one component pair of a bipartite
/// experiment with binary outcomes per component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairStats {
    pub p11: f64,
    pub p10: f64,
    pub p01: f64,
    pub p00: f64,
}

impl PairStats {
    /// `P(F ≠ G)` for this pair.
    pub fn mismatch(&self) -> f64 {
        self.p10 + self.p01
    }

    pub fn total(&self) -> f64 {
        self.p11 + self.p10 + self.p01 + self.p00
    }

    pub fn max_abs_diff(&self, other: &PairStats) -> f64 {
        [
            (self.p11 - other.p11).abs(),
            (self.p10 - other.p10).abs(),
            (self.p01 - other.p01).abs(),
            (self.p00 - other.p00).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Joint distribution of the two parties' zero positions in the spin-one
/// experiment: `cells[i][j] = P(Alice's zero at i, Bob's zero at j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinJointTable {
    cells: [[f64; 3]; 3],
}

impl SpinJointTable {
    pub fn cells(&self) -> &[[f64; 3]; 3] {
        &self.cells
    }

    pub fn cell(&self, i: usize, j: usize) -> f64 {
        self.cells[i][j]
    }

    pub fn total(&self) -> f64 {
        self.cells.iter().flatten().sum()
    }

    /// Statistics of the component pair `(i, j)`: Alice's component `i` is 0
    /// exactly when her zero position is `i`, so the pair marginals are sums
    /// of rows and columns of the zero-position joint.
    pub fn pair_stats(&self, i: usize, j: usize) -> PairStats {
        let row_i: f64 = (0..3).map(|c| self.cells[i][c]).sum();
        let col_j: f64 = (0..3).map(|r| self.cells[r][j]).sum();
        let p00 = self.cells[i][j];
        let p01 = row_i - p00;
        let p10 = col_j - p00;
        let p11 = 1.0 - row_i - col_j + p00;
        PairStats { p11, p10, p01, p00 }
    }

    pub fn max_abs_diff(&self, other: &SpinJointTable) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                m = m.max((self.cells[i][j] - other.cells[i][j]).abs());
            }
        }
        m
    }
}

/// Closed-form photon pair statistics at polarizer angles `(α, β)`:
/// `p11 = p00 = cos²(α−β)/2`, `p10 = p01 = sin²(α−β)/2`.
pub fn photon_stats(alpha: Angle, beta: Angle) -> PairStats {
    let d = alpha.radians() - beta.radians();
    let same = d.cos().powi(2) / 2.0;
    let diff = d.sin().powi(2) / 2.0;
    PairStats {
        p11: same,
        p10: diff,
        p01: diff,
        p00: same,
    }
}

/// Closed-form spin-one pair statistics for rays `(a, b)` with
/// `c² = ⟨a,b⟩²`: `p11 = (1+c²)/3`, `p00 = c²/3`, `p10 = p01 = (1−c²)/3`.
pub fn spin1_pair_stats(a: &Ray, b: &Ray) -> PairStats {
    let c2 = a.dot(b).powi(2);
    PairStats {
        p11: (1.0 + c2) / 3.0,
        p10: (1.0 - c2) / 3.0,
        p01: (1.0 - c2) / 3.0,
        p00: c2 / 3.0,
    }
}

/// Full 9-cell zero-position joint for frames `(a, b)`:
/// `cell(i,j) = ⟨a_i,b_j⟩²/3`. Orthonormality of the frames makes the table
/// normalized and every pair marginal consistent with [`spin1_pair_stats`].
pub fn spin1_joint(a: &Frame, b: &Frame) -> SpinJointTable {
    let mut cells = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            cells[i][j] = a.rays()[i].dot(&b.rays()[j]).powi(2) / 3.0;
        }
    }
    SpinJointTable { cells }
}

/// Born-rule oracle for the photon experiment: contracts the maximally
/// entangled two-qubit state with explicit polarization projectors at the
/// two angles. Must agree with [`photon_stats`] to [`tol::EXACT`].
pub fn born_oracle_photon(alpha: Angle, beta: Angle) -> PairStats {
    // |ψ⟩ = (|00⟩ + |11⟩)/√2 over the basis |00⟩,|01⟩,|10⟩,|11⟩
    let s = 1.0 / 2.0_f64.sqrt();
    let psi = [C::new(s, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(s, 0.0)];
    let pass = |t: f64| [C::new(t.cos(), 0.0), C::new(t.sin(), 0.0)];
    let block = |t: f64| [C::new(-t.sin(), 0.0), C::new(t.cos(), 0.0)];
    let prob = |ua: [C; 2], ub: [C; 2]| -> f64 {
        // amplitude ⟨u_a ⊗ u_b | ψ⟩
        let mut amp = C::new(0.0, 0.0);
        for (i, ai) in ua.iter().enumerate() {
            for (j, bj) in ub.iter().enumerate() {
                amp += ai.conj() * bj.conj() * psi[2 * i + j];
            }
        }
        amp.norm_sqr()
    };
    let (a, b) = (alpha.radians(), beta.radians());
    PairStats {
        p11: prob(pass(a), pass(b)),
        p10: prob(pass(a), block(b)),
        p01: prob(block(a), pass(b)),
        p00: prob(block(a), block(b)),
    }
}

// 3×3 complex matrices, row-major; sizes are fixed so the helpers stay local.
pub(crate) type CMat3 = [[C; 3]; 3];

fn mat3_zero() -> CMat3 {
    [[C::new(0.0, 0.0); 3]; 3]
}

fn mat3_mul(a: &CMat3, b: &CMat3) -> CMat3 {
    let mut out = mat3_zero();
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

/// Spin-one angular-momentum component operators `(J_x, J_y, J_z)` in the
/// real (Cartesian) basis: `(J_k)_{lm} = −i ε_{klm}`.
pub(crate) fn angular_momentum() -> [CMat3; 3] {
    let mut j = [mat3_zero(), mat3_zero(), mat3_zero()];
    let eps = |k: usize, l: usize, m: usize| -> f64 {
        match (k, l, m) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
            _ => 0.0,
        }
    };
    for k in 0..3 {
        for l in 0..3 {
            for m in 0..3 {
                j[k][l][m] = C::new(0.0, -eps(k, l, m));
            }
        }
    }
    j
}

/// `(⟨r, J⟩)²` for a ray `r`: the squared spin component along `r`, with
/// spectrum {0, 1}.
pub(crate) fn squared_component(r: &Ray, j: &[CMat3; 3]) -> CMat3 {
    let c = r.components();
    let mut jr = mat3_zero();
    for k in 0..3 {
        for l in 0..3 {
            for m in 0..3 {
                jr[l][m] += C::new(c[k], 0.0) * j[k][l][m];
            }
        }
    }
    mat3_mul(&jr, &jr)
}

/// Born-rule oracle for the spin-one experiment: builds the three
/// angular-momentum component operators per wing, forms the squared
/// projections `⟨a_i,J⟩²`, and evaluates joint outcome probabilities on the
/// 9-dimensional maximally correlated state. Must agree with
/// [`spin1_joint`] to [`tol::EXACT`].
pub fn born_oracle_spin1(a: &Frame, b: &Frame) -> SpinJointTable {
    let j = angular_momentum();
    // In the Cartesian basis the EPR state is Σ_k |k⟩|k⟩ / √3; writing it in
    // this basis (rather than the J_z eigenbasis) is the convention that
    // reproduces the pairwise statistics for every frame choice.
    let s = 1.0 / 3.0_f64.sqrt();
    let mut psi = [C::new(0.0, 0.0); 9];
    for k in 0..3 {
        psi[3 * k + k] = C::new(s, 0.0);
    }
    let mut cells = [[0.0; 3]; 3];
    for i in 0..3 {
        for jx in 0..3 {
            // projector onto the zero outcome of each wing's component:
            // P⁰ = I − ⟨r,J⟩²
            let pa = zero_projector(&a.rays()[i], &j);
            let pb = zero_projector(&b.rays()[jx], &j);
            // ⟨ψ| P⁰_a ⊗ P⁰_b |ψ⟩
            let mut val = C::new(0.0, 0.0);
            for r1 in 0..3 {
                for c1 in 0..3 {
                    for r2 in 0..3 {
                        for c2 in 0..3 {
                            val += psi[3 * r1 + r2].conj() * pa[r1][c1] * pb[r2][c2] * psi[3 * c1 + c2];
                        }
                    }
                }
            }
            cells[i][jx] = val.re;
        }
    }
    SpinJointTable { cells }
}

fn zero_projector(r: &Ray, j: &[CMat3; 3]) -> CMat3 {
    let sq = squared_component(r, j);
    let mut out = mat3_zero();
    for l in 0..3 {
        for m in 0..3 {
            let id = if l == m { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) };
            out[l][m] = id - sq[l][m];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::rng::CounterRng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

    fn standard_frame() -> Frame {
        Frame::new([
            Ray::new([1.0, 0.0, 0.0]).unwrap(),
            Ray::new([0.0, 1.0, 0.0]).unwrap(),
            Ray::new([0.0, 0.0, 1.0]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn angle_normalizes_into_half_open_pi() {
        assert_eq!(Angle::new(0.0).radians(), 0.0);
        assert_eq!(Angle::new(PI).radians(), 0.0);
        assert!((Angle::new(-0.1).radians() - (PI - 0.1)).abs() <= 1e-15);
        assert!(Angle::new(3.6).radians() < PI);
    }

    #[test]
    fn ray_requires_unit_norm_and_canonical_sign() {
        assert!(Ray::new([0.0, 1.0, 1.0]).is_err());
        let r = Ray::new([-1.0, 0.0, 0.0]).unwrap();
        assert_eq!(r.components(), [1.0, 0.0, 0.0]);
        let d = Ray::direction([0.0, -2.0, 2.0]).unwrap();
        assert!((d.components()[1] - 1.0 / 2.0_f64.sqrt()).abs() <= 1e-15);
        assert!(Ray::direction([0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn frame_rejects_non_orthogonal_rays_without_repair() {
        let r1 = Ray::new([1.0, 0.0, 0.0]).unwrap();
        let r2 = Ray::direction([1.0, 1.0, 0.0]).unwrap();
        let r3 = Ray::new([0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(Frame::new([r1, r2, r3]), Err(Error::Input(_))));
    }

    #[test]
    fn photon_equal_angles_match_perfectly() {
        let s = photon_stats(Angle::new(0.7), Angle::new(0.7));
        assert_eq!(s.mismatch(), 0.0);
        assert!((s.p11 - 0.5).abs() <= tol::EXACT);
        assert!((s.p00 - 0.5).abs() <= tol::EXACT);
    }

    #[test]
    fn photon_right_angle_mismatch_is_one() {
        let s = photon_stats(Angle::new(FRAC_PI_2), Angle::new(0.0));
        assert!((s.mismatch() - 1.0).abs() <= tol::EXACT);
    }

    #[test]
    fn photon_sixty_degrees_from_complete_statistics() {
        let s = photon_stats(Angle::new(FRAC_PI_3), Angle::new(0.0));
        assert!((s.p11 - 0.125).abs() <= tol::EXACT);
        assert!((s.mismatch() - 0.75).abs() <= tol::EXACT);
    }

    #[test]
    fn photon_depends_only_on_angle_difference_mod_pi() {
        for seed in 0..50u64 {
            let mut rng = CounterRng::new(seed);
            let a = rng.next_f64() * PI;
            let b = rng.next_f64() * PI;
            let shift = rng.next_f64() * 2.0 * PI;
            let s1 = photon_stats(Angle::new(a), Angle::new(b));
            let s2 = photon_stats(Angle::new(a + shift), Angle::new(b + shift));
            assert!(s1.max_abs_diff(&s2) <= 1e-10, "shift invariance at seed {seed}");
        }
    }

    #[test]
    fn born_oracle_photon_matches_closed_form_at_anchors() {
        let o = born_oracle_photon(Angle::new(0.0), Angle::new(0.0));
        assert!((o.p11 - 0.5).abs() <= tol::EXACT);
        assert!((o.p00 - 0.5).abs() <= tol::EXACT);
        let o = born_oracle_photon(Angle::new(FRAC_PI_4), Angle::new(0.0));
        assert!((o.mismatch() - 0.5).abs() <= tol::EXACT);
    }

    #[test]
    fn born_oracle_photon_matches_closed_form_randomized() {
        let mut rng = CounterRng::new(0xEB);
        for _ in 0..1000 {
            let a = Angle::new(rng.next_f64() * PI);
            let b = Angle::new(rng.next_f64() * PI);
            let diff = photon_stats(a, b).max_abs_diff(&born_oracle_photon(a, b));
            assert!(diff <= tol::EXACT);
        }
    }

    #[test]
    fn spin1_pair_anchors() {
        let x = Ray::new([1.0, 0.0, 0.0]).unwrap();
        let y = Ray::new([0.0, 1.0, 0.0]).unwrap();
        let s = spin1_pair_stats(&x, &y);
        assert!((s.p11 - 1.0 / 3.0).abs() <= tol::EXACT);
        assert!(s.p00.abs() <= tol::EXACT);
        assert!((s.mismatch() - 2.0 / 3.0).abs() <= tol::EXACT);

        let s = spin1_pair_stats(&x, &x);
        assert!((s.p11 - 2.0 / 3.0).abs() <= tol::EXACT);
        assert!((s.p00 - 1.0 / 3.0).abs() <= tol::EXACT);
        assert!(s.mismatch() <= tol::EXACT);

        let diag = Ray::direction([1.0, 1.0, 0.0]).unwrap();
        let s = spin1_pair_stats(&x, &diag);
        assert!((s.mismatch() - 1.0 / 3.0).abs() <= tol::EXACT);
    }

    #[test]
    fn spin1_pair_stats_invariant_under_sign_flips() {
        // Ray construction canonicalizes, so negating input components
        // yields the identical ray and identical statistics.
        let a = Ray::direction([0.3, -0.4, 0.5]).unwrap();
        let b = Ray::direction([-0.3, 0.4, -0.5]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn spin1_joint_identical_frames_is_diagonal() {
        let f = standard_frame();
        let t = spin1_joint(&f, &f);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 / 3.0 } else { 0.0 };
                assert!((t.cell(i, j) - expect).abs() <= tol::EXACT);
            }
        }
    }

    #[test]
    fn spin1_joint_shared_first_ray_pins_first_row_and_column() {
        let f = standard_frame();
        let c = FRAC_PI_3.cos();
        let s = FRAC_PI_3.sin();
        let g = Frame::new([
            Ray::new([1.0, 0.0, 0.0]).unwrap(),
            Ray::direction([0.0, c, s]).unwrap(),
            Ray::direction([0.0, -s, c]).unwrap(),
        ])
        .unwrap();
        let t = spin1_joint(&f, &g);
        assert!((t.cell(0, 0) - 1.0 / 3.0).abs() <= tol::EXACT);
        for k in 1..3 {
            assert!(t.cell(0, k).abs() <= tol::EXACT);
            assert!(t.cell(k, 0).abs() <= tol::EXACT);
        }
    }

    #[test]
    fn spin1_joint_normalizes_for_random_frames() {
        let mut rng = CounterRng::new(3);
        for _ in 0..100 {
            let a = gen::frame(&mut rng);
            let b = gen::frame(&mut rng);
            assert!((spin1_joint(&a, &b).total() - 1.0).abs() <= tol::EXACT);
        }
    }

    #[test]
    fn born_oracle_spin1_identical_frames_is_perfectly_correlated() {
        let f = standard_frame();
        let t = born_oracle_spin1(&f, &f);
        for i in 0..3 {
            assert!((t.cell(i, i) - 1.0 / 3.0).abs() <= tol::EXACT);
        }
    }

    #[test]
    fn squared_components_of_a_frame_sum_to_twice_identity() {
        let j = angular_momentum();
        let mut rng = CounterRng::new(11);
        for _ in 0..20 {
            let f = gen::frame(&mut rng);
            let mut sum = mat3_zero();
            for r in f.rays() {
                let sq = squared_component(r, &j);
                for l in 0..3 {
                    for m in 0..3 {
                        sum[l][m] += sq[l][m];
                    }
                }
            }
            for l in 0..3 {
                for m in 0..3 {
                    let expect = if l == m { 2.0 } else { 0.0 };
                    assert!((sum[l][m].re - expect).abs() <= tol::EXACT);
                    assert!(sum[l][m].im.abs() <= tol::EXACT);
                }
            }
        }
    }

    #[test]
    fn born_oracle_spin1_matches_closed_form_randomized() {
        let mut rng = CounterRng::new(0x51);
        for _ in 0..100 {
            let a = gen::frame(&mut rng);
            let b = gen::frame(&mut rng);
            let diff = spin1_joint(&a, &b).max_abs_diff(&born_oracle_spin1(&a, &b));
            assert!(diff <= tol::EXACT);
        }
    }

    #[test]
    fn alice_marginal_gives_each_component_two_thirds() {
        let mut rng = CounterRng::new(21);
        for _ in 0..50 {
            let a = gen::frame(&mut rng);
            let b = gen::frame(&mut rng);
            let t = spin1_joint(&a, &b);
            for i in 0..3 {
                for j in 0..3 {
                    let s = t.pair_stats(i, j);
                    // P(F_i = 1) = 2/3 and P(F_i = 0) = 1/3, frame-free
                    assert!((s.p11 + s.p10 - 2.0 / 3.0).abs() <= tol::EXACT);
                    assert!((s.p00 + s.p01 - 1.0 / 3.0).abs() <= tol::EXACT);
                }
            }
        }
    }

    #[test]
    fn shared_ray_pairs_have_zero_mismatch() {
        let mut rng = CounterRng::new(33);
        for _ in 0..100 {
            let (a, b, i, j) = gen::frame_pair_sharing_ray(&mut rng);
            let s = spin1_joint(&a, &b).pair_stats(i, j);
            assert!(s.p10.abs() <= tol::EXACT);
            assert!(s.p01.abs() <= tol::EXACT);
        }
    }

    #[test]
    fn pair_stats_of_joint_match_closed_form_per_ray_pair() {
        let mut rng = CounterRng::new(55);
        for _ in 0..50 {
            let a = gen::frame(&mut rng);
            let b = gen::frame(&mut rng);
            let t = spin1_joint(&a, &b);
            for i in 0..3 {
                for j in 0..3 {
                    let direct = spin1_pair_stats(&a.rays()[i], &b.rays()[j]);
                    assert!(t.pair_stats(i, j).max_abs_diff(&direct) <= tol::EXACT);
                }
            }
        }
    }
}
