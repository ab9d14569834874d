//! Gardens of Eden, mutually erasable patterns and pre-injectivity certificates.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::ca::{LinearCA, Pattern};
use crate::error::{Error, Result};
use crate::ff::{intersect_kernels, FFMatrix};
use crate::group::{ElementSet, GroupCtx, Word};

/// Default bound on `rows * cols` for the matrices built by the searches here.
pub const MATRIX_CAP: usize = 1 << 26;

/// Two patterns on the same window whose zero extensions have the same image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MepPair {
    pub phi1: Pattern,
    pub phi2: Pattern,
}

fn basis_vector(m: usize, j: usize) -> Vec<u64> {
    let mut v = vec![0; m];
    v[j] = 1;
    v
}

/// A vector `e_j` with `y_j != 0` lies outside the hyperplane `y^T x = 0`.
fn outside_column_space(a: &FFMatrix) -> Option<Vec<u64>> {
    let y = a.left_kernel_basis().into_iter().next()?;
    let j = y.iter().position(|&c| c != 0)?;
    Some(basis_vector(a.rows(), j))
}

/// A one-cell pattern outside `Σ_s im(α_s)`, the only values `Θ` can take at a cell.
pub fn goe_unit_witness(ca: &LinearCA) -> Result<Option<Pattern>> {
    let m = ca.m();
    let mut joined = FFMatrix::zeros(ca.field(), m, m * ca.alpha().len());
    for (k, a) in ca.alpha().iter().enumerate() {
        for i in 0..m {
            joined.row_mut(i)[k * m..(k + 1) * m].copy_from_slice(a.row(i));
        }
    }
    match outside_column_space(&joined) {
        Some(v) => Ok(Some(Pattern::new(ElementSet::singleton(ca.ctx().identity()), m, vec![v])?)),
        None => Ok(None),
    }
}

/// A pattern on `W` outside the image of [`LinearCA::image_map`], if the map is not onto.
pub fn goe_window(ca: &LinearCA, window: &ElementSet, cap: usize) -> Result<Option<Pattern>> {
    if window.is_empty() {
        return Err(Error::EmptySet("window"));
    }
    let cols = ca.image_domain(window).len() * ca.m();
    let rows = window.len() * ca.m();
    if rows.saturating_mul(cols) > cap {
        return Err(Error::CapExceeded(format!("image map of {rows}x{cols} exceeds {cap} entries")));
    }
    let im = ca.image_map(window)?;
    match outside_column_space(&im) {
        Some(v) => Ok(Some(Pattern::from_flat(window.clone(), ca.m(), &v)?)),
        None => Ok(None),
    }
}

/// The matrix of `φ|_B -> (Θ φ)|_{S^-1 B}` for `B = ball(r)`, with its row cells.
pub fn kernel_system(ca: &LinearCA, radius: usize) -> (FFMatrix, ElementSet, ElementSet) {
    let ctx = ca.ctx();
    let ball = ctx.ball(radius);
    let rows = ctx.set_product(&ctx.inverse_set(ca.memory()), &ball);
    (ca.local_matrix(&rows, &ball), rows, ball)
}

/// A nonzero configuration supported in `ball(r)` with zero image, reported as
/// the pair `(φ|_B, 0|_B)`; `None` when no such configuration exists.
pub fn mep_search(ca: &LinearCA, radius: usize) -> Result<Option<MepPair>> {
    mep_search_capped(ca, radius, MATRIX_CAP)
}

pub fn mep_search_capped(ca: &LinearCA, radius: usize, cap: usize) -> Result<Option<MepPair>> {
    let ctx = ca.ctx();
    let ball_len = ctx.ball(radius).len();
    let row_len = ctx.set_product(&ctx.inverse_set(ca.memory()), &ctx.ball(radius)).len();
    let (r, c) = (row_len * ca.m(), ball_len * ca.m());
    if r.saturating_mul(c) > cap {
        return Err(Error::CapExceeded(format!("kernel system of {r}x{c} exceeds {cap} entries")));
    }
    let (m, _, ball) = kernel_system(ca, radius);
    let Some(v) = m.kernel_basis_tall().into_iter().next() else {
        return Ok(None);
    };
    let phi1 = Pattern::from_flat(ball.clone(), ca.m(), &v)?;
    let phi2 = Pattern::zeros(ball, ca.m())?;
    Ok(Some(MepPair { phi1, phi2 }))
}

/// `ρ(g) = 1 / #{s in S : g in s F}` for every `g` in `S F`, in canonical order.
pub fn rho(ctx: &GroupCtx, s: &ElementSet, f: &ElementSet) -> Vec<(Word, BigRational)> {
    let sf = ctx.set_product(s, f);
    let mut counts = vec![0i64; sf.len()];
    for si in s {
        for fw in f {
            if let Some(i) = sf.index_of(&ctx.mul(si, fw)) {
                counts[i] += 1;
            }
        }
    }
    sf.iter().cloned().zip(counts.into_iter().map(|c| BigRational::new(BigInt::from(1), BigInt::from(c)))).collect()
}

/// `(Σ_{f in F} Σ_{s in S} ρ(s f), #(S F))`; the two always agree.
pub fn double_count(ctx: &GroupCtx, s: &ElementSet, f: &ElementSet) -> (BigRational, usize) {
    let table = rho(ctx, s, f);
    let sf: ElementSet = table.iter().map(|(g, _)| g.clone()).collect();
    let mut total = BigRational::zero();
    for fw in f {
        for si in s {
            let g = ctx.mul(si, fw);
            total += &table[sf.index_of(&g).expect("s f lies in S F")].1;
        }
    }
    (total, sf.len())
}

/// Proof that every configuration with support exactly `F` has a nonzero image.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreinjCertificate {
    #[serde(rename = "F")]
    pub support: Vec<String>,
    pub f: String,
    /// `(g, ρ(g))` for `g` in `S F`, ρ as an exact fraction.
    pub rho: Vec<(String, String)>,
    /// `(s, T_s)` for `s` in `S`.
    #[serde(rename = "Tfamily")]
    pub t_family: Vec<(String, Vec<String>)>,
    #[serde(rename = "sumX")]
    pub sum_x: usize,
    #[serde(rename = "sizeY")]
    pub size_y: usize,
    pub kernel_dim: usize,
}

/// Scans `f in F` in canonical order for one whose family
/// `T_s = {t in S : s f in t F}` has `Σ_s #X_{s,T_s} >= #Y` and a trivial
/// stacked kernel. `Ok(None)` when no `f` passes.
pub fn preinj_certificate(ca: &LinearCA, f_set: &ElementSet) -> Result<Option<PreinjCertificate>> {
    let sys = ca.provenance().ok_or_else(|| Error::Precondition("automaton has no cycle-system provenance".into()))?;
    if f_set.is_empty() {
        return Err(Error::EmptySet("F"));
    }
    let ctx = ca.ctx();
    let s = ca.memory();
    let table = rho(ctx, s, f_set);
    let sf: ElementSet = table.iter().map(|(g, _)| g.clone()).collect();
    for fw in f_set {
        let mut family = Vec::with_capacity(s.len());
        let mut blocks = Vec::with_capacity(s.len());
        let mut sum_x = 0;
        for (i, si) in s.iter().enumerate() {
            let g = ctx.mul(si, fw);
            let t: Vec<usize> = s
                .iter()
                .enumerate()
                .filter(|(_, tw)| f_set.contains(&ctx.mul(&ctx.inv(tw), &g)))
                .map(|(j, _)| j)
                .collect();
            debug_assert_eq!(
                table[sf.index_of(&g).unwrap()].1,
                BigRational::new(BigInt::from(1), BigInt::from(t.len()))
            );
            let x = sys.x_set(i, t.iter().copied());
            let rows: Vec<usize> = x.ones().collect();
            sum_x += rows.len();
            blocks.push(ca.alpha()[i].select_rows(&rows));
            family.push((si.to_string(), t.iter().map(|&j| s.as_slice()[j].to_string()).collect()));
        }
        if sum_x < sys.size_y() {
            continue;
        }
        let kernel_dim = intersect_kernels(&blocks)?.len();
        if kernel_dim == 0 {
            return Ok(Some(PreinjCertificate {
                support: f_set.iter().map(|w| w.to_string()).collect(),
                f: fw.to_string(),
                rho: table.iter().map(|(g, r)| (g.to_string(), r.to_string())).collect(),
                t_family: family,
                sum_x,
                size_y: sys.size_y(),
                kernel_dim,
            }));
        }
    }
    Ok(None)
}

/// Outcome of [`mm_probe`]. Both searches are truncations: `conclusive` means
/// they agree, which is all a bounded search can say about the equivalence of
/// the two properties.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MmProbe {
    pub mep_found: bool,
    pub goe_found: bool,
    pub conclusive: bool,
    pub radius: usize,
    pub window: usize,
}

/// Kernel search on `ball(r)` and image search over boxes `{0..L-1}^rank`
/// with at most `w` cells.
pub fn mm_probe(ca: &LinearCA, radius: usize, w: usize) -> Result<MmProbe> {
    let ctx = ca.ctx();
    if !ctx.is_abelian() {
        return Err(Error::Precondition("mm_probe runs on free abelian groups only".into()));
    }
    let mep_found = mep_search(ca, radius)?.is_some();
    let rank = ctx.num_generators() as u32;
    let mut goe_found = false;
    for side in 1usize.. {
        if side.checked_pow(rank).is_none_or(|n| n > w) {
            break;
        }
        let window = interval_box(ctx, side)?;
        if goe_window(ca, &window, MATRIX_CAP)?.is_some() {
            goe_found = true;
            break;
        }
    }
    Ok(MmProbe { mep_found, goe_found, conclusive: mep_found == goe_found, radius, window: w })
}

fn interval_box(ctx: &GroupCtx, side: usize) -> Result<ElementSet> {
    let rank = ctx.num_generators();
    let mut out = Vec::new();
    let total = side.pow(rank as u32);
    for mut code in 0..total {
        let mut v = vec![0i64; rank];
        for x in v.iter_mut() {
            *x = (code % side) as i64;
            code /= side;
        }
        out.push(ctx.word_from_vector(&v)?);
    }
    Ok(out.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ca::Config;
    use crate::ff::PrimeField;
    use crate::rng::Stream;
    use proptest::prelude::*;

    #[test]
    fn muller_goe_and_radius_two_kernel() {
        for p in [2, 3] {
            let ca = LinearCA::muller(p).unwrap();
            let unit = goe_unit_witness(&ca).unwrap().unwrap();
            assert_eq!(unit.values(), &[vec![0, 1]]);
            let id = ElementSet::singleton(ca.ctx().identity());
            assert!(goe_window(&ca, &id, MATRIX_CAP).unwrap().is_some());
            assert!(mep_search(&ca, 1).unwrap().is_none());
            let pair = mep_search(&ca, 3).unwrap().expect("kernel element of radius 2");
            let phi = pair.phi1.to_config(ca.field()).unwrap();
            assert!(!phi.is_zero() && ca.apply(&phi).unwrap().is_zero());
            // The hand-made kernel element: x (x y) = y and x (x z) = z cancel
            // the contributions of φ(1) at y and z.
            let ctx = ca.ctx();
            let minus = p - 1;
            let hand = Config::from_entries(
                ca.field(),
                2,
                [
                    (ctx.identity(), vec![0, 1]),
                    (ctx.parse_word("x y").unwrap(), vec![minus, 0]),
                    (ctx.parse_word("x z").unwrap(), vec![minus, 0]),
                ],
            )
            .unwrap();
            assert!(ca.apply(&hand).unwrap().is_zero());
            let (m, _, ball) = kernel_system(&ca, 3);
            assert_eq!((ball.len(), m.cols()), (22, 44));
        }
    }

    #[test]
    fn zero_and_identity_cases() {
        let ctx = GroupCtx::w3();
        let zero = LinearCA::zero(ctx.clone(), 2, 2).unwrap();
        let pair = mep_search(&zero, 0).unwrap().unwrap();
        assert_eq!(pair.phi1.values(), &[vec![1, 0]]);
        assert_eq!(pair.phi2.values(), &[vec![0, 0]]);
        let id = LinearCA::identity(ctx.clone(), 3, 2).unwrap();
        assert!(goe_unit_witness(&id).unwrap().is_none());
        assert!(goe_window(&id, &ctx.ball(1), MATRIX_CAP).unwrap().is_none());
        assert!(mep_search(&id, 2).unwrap().is_none());
        assert!(goe_window(&id, &ElementSet::new([]), MATRIX_CAP).is_err());
    }

    #[test]
    fn probe_examples() {
        let z = GroupCtx::free_abelian(1).unwrap();
        let zero = LinearCA::zero(z.clone(), 2, 1).unwrap();
        let r = mm_probe(&zero, 2, 3).unwrap();
        assert!(r.mep_found && r.goe_found && r.conclusive);
        let shift = LinearCA::z_shift(2, 1).unwrap();
        let r = mm_probe(&shift, 3, 4).unwrap();
        assert!(!r.mep_found && !r.goe_found && r.conclusive);
        assert!(mm_probe(&LinearCA::muller(2).unwrap(), 1, 2).is_err());
    }

    #[test]
    fn mep_search_complete_on_tiny_instances() {
        // Z, m = 1, S = {0, 1}, p = 2: brute force over every support in the ball.
        let z = GroupCtx::free_abelian(1).unwrap();
        let f = PrimeField::new(2).unwrap();
        let memory = ElementSet::new([z.identity(), z.word_from_vector(&[1]).unwrap()]);
        for code in 0..16u64 {
            let alpha = vec![
                FFMatrix::from_data(f, 1, 1, vec![code & 1]).unwrap(),
                FFMatrix::from_data(f, 1, 1, vec![(code >> 1) & 1]).unwrap(),
            ];
            let ca = LinearCA::new(z.clone(), memory.clone(), alpha, None).unwrap();
            for r in 0..=2 {
                let ball = z.ball(r);
                let brute = (1u64..1 << ball.len()).any(|bits| {
                    let phi = Config::from_entries(
                        f,
                        1,
                        ball.iter().enumerate().map(|(i, g)| (g.clone(), vec![(bits >> i) & 1])),
                    )
                    .unwrap();
                    ca.apply(&phi).unwrap().is_zero()
                });
                assert_eq!(mep_search(&ca, r).unwrap().is_some(), brute, "code={code} r={r}");
            }
        }
    }

    #[test]
    fn goe_witness_is_sound() {
        let ca = LinearCA::muller(3).unwrap();
        let ctx = ca.ctx().clone();
        let window: ElementSet = ctx.ball(1);
        let q = goe_window(&ca, &window, MATRIX_CAP).unwrap().unwrap();
        let dom = ca.image_domain(&window);
        let mut st = Stream::new("test/goe", 1, &[]);
        for _ in 0..1000 {
            let entries: Vec<_> = dom.iter().map(|g| (g.clone(), vec![st.below(3), st.below(3)])).collect();
            let phi = Config::from_entries(ca.field(), 2, entries).unwrap();
            assert_ne!(ca.apply(&phi).unwrap().restrict(&window).unwrap(), q);
        }
    }

    #[test]
    fn mep_witness_is_sound() {
        let z = GroupCtx::free_abelian(1).unwrap();
        let f = PrimeField::new(2).unwrap();
        // Both local maps ignore the second coordinate.
        let memory = ElementSet::new([z.identity(), z.word_from_vector(&[1]).unwrap()]);
        let a = FFMatrix::from_rows(f, &[vec![1, 0], vec![0, 0]]).unwrap();
        let ca = LinearCA::new(z, memory, vec![a.clone(), a], None).unwrap();
        let pair = mep_search(&ca, 1).unwrap().unwrap();
        let phi = pair.phi1.to_config(f).unwrap();
        assert!(!phi.is_zero());
        assert!(ca.apply(&phi).unwrap().is_zero());
    }

    #[test]
    fn rho_singleton_in_w5() {
        let ctx = GroupCtx::w5();
        let s = ctx.generators();
        let f = ElementSet::singleton(ctx.identity());
        let table = rho(&ctx, &s, &f);
        assert_eq!(table.len(), 5);
        assert!(table.iter().all(|(_, r)| *r == BigRational::from_integer(BigInt::from(1))));
    }

    proptest! {
        #[test]
        fn double_counting_identity(seed in any::<u64>()) {
            let mut st = Stream::new("test/rho", seed, &[]);
            let ctx = if st.coin() { GroupCtx::w3() } else { GroupCtx::free_group(2).unwrap() };
            let ball = ctx.ball(2);
            let pick = |st: &mut Stream| -> ElementSet {
                let set: ElementSet = ball.iter().filter(|_| st.below(4) == 0).cloned().collect();
                if set.is_empty() { ElementSet::singleton(ctx.identity()) } else { set }
            };
            let s = pick(&mut st);
            let f = pick(&mut st);
            let (total, size) = double_count(&ctx, &s, &f);
            prop_assert_eq!(total, BigRational::from_integer(BigInt::from(size)));
        }
    }
}
