//! Linear cellular automata `Θ(φ)(g) = Σ_s α_s φ(s g)` over `GF(p)^m`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ff::ext::ExtField;
use crate::ff::{FFMatrix, PrimeField};
use crate::group::{ElementSet, GroupCtx, Word};
use crate::lemma1::CycleSystem;
use crate::ore::{GRElem, GRMatrix};
use crate::rng::Stream;

/// A finitely supported configuration `G -> GF(p)^m`. Zero vectors are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    field: PrimeField,
    m: usize,
    entries: BTreeMap<Word, Vec<u64>>,
}

impl Config {
    pub fn zero(field: PrimeField, m: usize) -> Self {
        Self { field, m, entries: BTreeMap::new() }
    }

    /// Values are reduced mod `p`; repeated words are summed.
    pub fn from_entries(field: PrimeField, m: usize, entries: impl IntoIterator<Item = (Word, Vec<u64>)>) -> Result<Self> {
        let mut out = Self::zero(field, m);
        for (g, v) in entries {
            if v.len() != m {
                return Err(Error::Dimension(format!("value at {g} has length {}, expected {m}", v.len())));
            }
            let v: Vec<u64> = v.iter().map(|&x| field.reduce(x)).collect();
            out.add_at(g, &v);
        }
        Ok(out)
    }

    /// `δ_g · v`.
    pub fn delta(field: PrimeField, g: Word, v: Vec<u64>) -> Result<Self> {
        let m = v.len();
        Self::from_entries(field, m, [(g, v)])
    }

    fn add_at(&mut self, g: Word, v: &[u64]) {
        let f = self.field;
        let slot = self.entries.entry(g.clone()).or_insert_with(|| vec![0; v.len()]);
        for (a, &b) in slot.iter_mut().zip(v) {
            *a = f.add(*a, b);
        }
        if slot.iter().all(|&x| x == 0) {
            self.entries.remove(&g);
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, g: &Word) -> Option<&[u64]> {
        self.entries.get(g).map(|v| v.as_slice())
    }

    /// Value at `g`, zero outside the support.
    pub fn value(&self, g: &Word) -> Vec<u64> {
        self.get(g).map(|v| v.to_vec()).unwrap_or_else(|| vec![0; self.m])
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Word, &Vec<u64>)> {
        self.entries.iter()
    }

    pub fn support(&self) -> ElementSet {
        self.entries.keys().cloned().collect()
    }

    pub fn restrict(&self, window: &ElementSet) -> Result<Pattern> {
        Pattern::new(window.clone(), self.m, window.iter().map(|g| self.value(g)).collect())
    }

    pub fn add(&self, other: &Config) -> Result<Config> {
        self.check_compatible(other.field, other.m)?;
        let mut out = self.clone();
        for (g, v) in &other.entries {
            out.add_at(g.clone(), v);
        }
        Ok(out)
    }

    pub fn scale(&self, c: u64) -> Config {
        let f = self.field;
        let c = f.reduce(c);
        let mut out = Config::zero(f, self.m);
        for (g, v) in &self.entries {
            let w: Vec<u64> = v.iter().map(|&x| f.mul(x, c)).collect();
            out.add_at(g.clone(), &w);
        }
        out
    }

    fn check_compatible(&self, field: PrimeField, m: usize) -> Result<()> {
        if self.field != field || self.m != m {
            return Err(Error::Mismatch(format!(
                "configuration over GF({})^{} used with GF({})^{}",
                self.field.p(),
                self.m,
                field.p(),
                m
            )));
        }
        Ok(())
    }
}

/// Values on a finite window, one `m`-vector per window element (zeros allowed).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    window: ElementSet,
    m: usize,
    values: Vec<Vec<u64>>,
}

impl Pattern {
    pub fn new(window: ElementSet, m: usize, values: Vec<Vec<u64>>) -> Result<Self> {
        if window.is_empty() {
            return Err(Error::EmptySet("pattern window"));
        }
        if values.len() != window.len() || values.iter().any(|v| v.len() != m) {
            return Err(Error::Dimension(format!("{} values of length {m} expected", window.len())));
        }
        Ok(Self { window, m, values })
    }

    pub fn zeros(window: ElementSet, m: usize) -> Result<Self> {
        let n = window.len();
        Self::new(window, m, vec![vec![0; m]; n])
    }

    /// Inverse of [`Pattern::flatten`].
    pub fn from_flat(window: ElementSet, m: usize, flat: &[u64]) -> Result<Self> {
        if flat.len() != window.len() * m {
            return Err(Error::Dimension(format!("flat pattern of length {}", flat.len())));
        }
        let values = if m == 0 { vec![Vec::new(); window.len()] } else { flat.chunks(m).map(|c| c.to_vec()).collect() };
        Self::new(window, m, values)
    }

    pub fn window(&self) -> &ElementSet {
        &self.window
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[Vec<u64>] {
        &self.values
    }

    pub fn value(&self, g: &Word) -> Option<&[u64]> {
        self.window.index_of(g).map(|i| self.values[i].as_slice())
    }

    /// Window-major, coordinate-minor.
    pub fn flatten(&self) -> Vec<u64> {
        self.values.concat()
    }

    /// The configuration equal to this pattern on the window and zero elsewhere.
    pub fn to_config(&self, field: PrimeField) -> Result<Config> {
        Config::from_entries(field, self.m, self.window.iter().cloned().zip(self.values.iter().cloned()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCA {
    ctx: GroupCtx,
    memory: ElementSet,
    field: PrimeField,
    m: usize,
    alpha: Vec<FFMatrix>,
    provenance: Option<CycleSystem>,
}

impl LinearCA {
    /// `alpha[i]` belongs to the `i`-th memory element in canonical order.
    /// With a provenance system, `m` must equal its ground set size and the
    /// rows of `alpha[i]` outside `X_i` must vanish.
    pub fn new(ctx: GroupCtx, memory: ElementSet, alpha: Vec<FFMatrix>, provenance: Option<CycleSystem>) -> Result<Self> {
        if memory.is_empty() {
            return Err(Error::EmptySet("memory set"));
        }
        if alpha.len() != memory.len() {
            return Err(Error::Dimension(format!("{} matrices for a memory set of size {}", alpha.len(), memory.len())));
        }
        let field = alpha[0].field();
        let m = alpha[0].rows();
        for a in &alpha {
            if a.rows() != m || a.cols() != m {
                return Err(Error::Dimension(format!("local map of shape {}x{}, expected {m}x{m}", a.rows(), a.cols())));
            }
            if a.field() != field {
                return Err(Error::Mismatch("local maps over different fields".into()));
            }
        }
        if let Some(sys) = &provenance {
            if sys.n() != memory.len() || sys.size_y() != m {
                return Err(Error::Mismatch(format!(
                    "cycle system with n = {}, #Y = {} for #S = {}, m = {m}",
                    sys.n(),
                    sys.size_y(),
                    memory.len()
                )));
            }
            for (i, a) in alpha.iter().enumerate() {
                let xi = sys.x(i);
                if let Some(row) = (0..m).find(|&r| !xi.contains(r) && !a.row_is_zero(r)) {
                    return Err(Error::Precondition(format!("alpha[{i}] has a nonzero row {row} outside X_{}", i + 1)));
                }
            }
        }
        Ok(Self { ctx, memory, field, m, alpha, provenance })
    }

    /// Muller's automaton on `W3`: `S = {x, y, z}`, `m = 2`,
    /// `α_x = [[1,0],[0,0]]`, `α_y = α_z = [[0,1],[0,0]]`.
    pub fn muller(p: u64) -> Result<Self> {
        let field = PrimeField::new(p)?;
        let ctx = GroupCtx::w3();
        let ax = FFMatrix::from_rows(field, &[vec![1, 0], vec![0, 0]])?;
        let ayz = FFMatrix::from_rows(field, &[vec![0, 1], vec![0, 0]])?;
        let memory = ctx.generators();
        Self::new(ctx, memory, vec![ax, ayz.clone(), ayz], None)
    }

    /// `S = {s}` with a single local map.
    pub fn single_cell(ctx: GroupCtx, s: Word, alpha: FFMatrix) -> Result<Self> {
        Self::new(ctx, ElementSet::singleton(s), vec![alpha], None)
    }

    pub fn identity(ctx: GroupCtx, p: u64, m: usize) -> Result<Self> {
        let id = ctx.identity();
        Self::single_cell(ctx, id, FFMatrix::identity(PrimeField::new(p)?, m))
    }

    pub fn zero(ctx: GroupCtx, p: u64, m: usize) -> Result<Self> {
        let id = ctx.identity();
        Self::single_cell(ctx, id, FFMatrix::zeros(PrimeField::new(p)?, m, m))
    }

    /// The shift `Θ(φ)(g) = φ(g + 1)` on `Z`.
    pub fn z_shift(p: u64, m: usize) -> Result<Self> {
        let ctx = GroupCtx::free_abelian(1)?;
        let one = ctx.word_from_vector(&[1])?;
        Self::single_cell(ctx, one, FFMatrix::identity(PrimeField::new(p)?, m))
    }

    /// Uniformly random local maps for the given memory set.
    pub fn random(ctx: GroupCtx, memory: ElementSet, field: PrimeField, m: usize, stream: &mut Stream) -> Result<Self> {
        let alpha = memory
            .iter()
            .map(|_| {
                let data = (0..m * m).map(|_| stream.below(field.p())).collect();
                FFMatrix::from_data(field, m, m, data)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ctx, memory, alpha, None)
    }

    pub fn ctx(&self) -> &GroupCtx {
        &self.ctx
    }

    pub fn memory(&self) -> &ElementSet {
        &self.memory
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn alpha(&self) -> &[FFMatrix] {
        &self.alpha
    }

    pub fn alpha_for(&self, s: &Word) -> Option<&FFMatrix> {
        self.memory.index_of(s).map(|i| &self.alpha[i])
    }

    pub fn provenance(&self) -> Option<&CycleSystem> {
        self.provenance.as_ref()
    }

    pub fn apply(&self, phi: &Config) -> Result<Config> {
        phi.check_compatible(self.field, self.m)?;
        let inverses: Vec<Word> = self.memory.iter().map(|s| self.ctx.inv(s)).collect();
        let mut out = Config::zero(self.field, self.m);
        for (h, v) in phi.entries() {
            for (s_inv, a) in inverses.iter().zip(&self.alpha) {
                let contribution = a.mul_vec(v)?;
                if contribution.iter().any(|&x| x != 0) {
                    out.add_at(self.ctx.mul(s_inv, h), &contribution);
                }
            }
        }
        Ok(out)
    }

    /// Matrix of `φ|_cols -> Θ(φ)|_rows`, restricted to the given column
    /// cells: block `(g, h)` is `Σ_{s : s g = h} α_s`. Rows and columns are
    /// cell-major, coordinate-minor.
    pub fn local_matrix(&self, rows: &ElementSet, cols: &ElementSet) -> FFMatrix {
        let m = self.m;
        let f = self.field;
        let mut out = FFMatrix::zeros(f, rows.len() * m, cols.len() * m);
        for (gi, g) in rows.iter().enumerate() {
            for (s, a) in self.memory.iter().zip(&self.alpha) {
                let h = self.ctx.mul(s, g);
                let Some(hi) = cols.index_of(&h) else { continue };
                for i in 0..m {
                    let src = a.row(i);
                    let dst = &mut out.row_mut(gi * m + i)[hi * m..(hi + 1) * m];
                    for (d, &x) in dst.iter_mut().zip(src) {
                        *d = f.add(*d, x);
                    }
                }
            }
        }
        out
    }

    /// The cells `S W` on which `Θ(φ)|_W` depends.
    pub fn image_domain(&self, window: &ElementSet) -> ElementSet {
        self.ctx.set_product(&self.memory, window)
    }

    /// Matrix of `φ|_{SW} -> Θ(φ)|_W`, columns indexed by [`LinearCA::image_domain`].
    pub fn image_map(&self, window: &ElementSet) -> Result<FFMatrix> {
        if window.is_empty() {
            return Err(Error::EmptySet("window"));
        }
        Ok(self.local_matrix(window, &self.image_domain(window)))
    }

    /// `M = Σ_s α_s · s` over `GF(p) G`.
    pub fn to_groupring_matrix(&self) -> GRMatrix {
        let k = self.scalar_ring();
        let mut out = GRMatrix::zeros(&self.ctx, &k, self.m, self.m);
        for i in 0..self.m {
            for j in 0..self.m {
                let terms = self.memory.iter().zip(&self.alpha).map(|(s, a)| (s.clone(), a.get(i, j)));
                out.set(i, j, GRElem::from_prime_terms(&self.ctx, &k, terms));
            }
        }
        out
    }

    pub fn scalar_ring(&self) -> ExtField {
        ExtField::new(self.field.p(), 1).expect("prime field")
    }

    /// Encodes `φ` as the column `(Σ_g φ(g)_j g^-1)_j`. Under this encoding
    /// `encode(Θ φ) = gr_mat_apply_right(M, encode(φ))`.
    pub fn encode_config(&self, phi: &Config) -> Result<Vec<GRElem>> {
        phi.check_compatible(self.field, self.m)?;
        let k = self.scalar_ring();
        Ok((0..self.m)
            .map(|j| GRElem::from_prime_terms(&self.ctx, &k, phi.entries().map(|(g, v)| (self.ctx.inv(g), v[j]))))
            .collect())
    }

    pub fn decode_config(&self, column: &[GRElem]) -> Result<Config> {
        if column.len() != self.m {
            return Err(Error::Dimension(format!("column of length {} for m = {}", column.len(), self.m)));
        }
        let mut entries = Vec::new();
        for (j, e) in column.iter().enumerate() {
            if e.field().degree() != 1 || e.field().p() != self.p() {
                return Err(Error::Mismatch("column over a different field".into()));
            }
            for (g, c) in e.terms() {
                let mut v = vec![0; self.m];
                v[j] = c.0[0];
                entries.push((self.ctx.inv(g), v));
            }
        }
        Config::from_entries(self.field, self.m, entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ore::{gr_mat_apply_right, parse_elem};
    use proptest::prelude::*;

    fn w(ctx: &GroupCtx, t: &str) -> Word {
        ctx.parse_word(t).unwrap()
    }

    #[test]
    fn muller_apply_examples() {
        let ca = LinearCA::muller(2).unwrap();
        let f = ca.field();
        let ctx = ca.ctx().clone();
        let phi = Config::delta(f, ctx.identity(), vec![0, 1]).unwrap();
        let expected =
            Config::from_entries(f, 2, [(w(&ctx, "y"), vec![1, 0]), (w(&ctx, "z"), vec![1, 0])]).unwrap();
        assert_eq!(ca.apply(&phi).unwrap(), expected);
        let phi = Config::delta(f, ctx.identity(), vec![1, 0]).unwrap();
        assert_eq!(ca.apply(&phi).unwrap(), Config::delta(f, w(&ctx, "x"), vec![1, 0]).unwrap());
        assert!(ca.apply(&Config::zero(f, 2)).unwrap().is_zero());
    }

    #[test]
    fn muller_image_map_and_matrix() {
        let ca = LinearCA::muller(3).unwrap();
        let id = ElementSet::singleton(ca.ctx().identity());
        let im = ca.image_map(&id).unwrap();
        assert_eq!((im.rows(), im.cols()), (2, 6));
        assert_eq!(im.rank(), 1);
        assert_eq!(ca.to_groupring_matrix().pretty(), "[[x, y + z],[0, 0]]");
    }

    #[test]
    fn identity_ca() {
        let ctx = GroupCtx::w5();
        let ca = LinearCA::identity(ctx.clone(), 5, 3).unwrap();
        let ball = ctx.ball(1);
        let im = ca.image_map(&ball).unwrap();
        assert_eq!(im.rank(), 18);
        let k = ca.scalar_ring();
        assert_eq!(ca.to_groupring_matrix(), GRMatrix::identity(&ctx, &k, 3));
    }

    #[test]
    fn rejects_bad_shapes_and_mismatches() {
        let ctx = GroupCtx::w3();
        let f = PrimeField::new(2).unwrap();
        let g = PrimeField::new(3).unwrap();
        assert!(LinearCA::new(ctx.clone(), ctx.generators(), vec![FFMatrix::zeros(f, 2, 2)], None).is_err());
        let mixed = vec![FFMatrix::zeros(f, 2, 2), FFMatrix::zeros(g, 2, 2), FFMatrix::zeros(f, 2, 2)];
        assert!(LinearCA::new(ctx.clone(), ctx.generators(), mixed, None).is_err());
        let ca = LinearCA::muller(2).unwrap();
        assert!(ca.apply(&Config::delta(g, ctx.identity(), vec![1, 0]).unwrap()).is_err());
    }

    #[test]
    fn encoding_matches_groupring_action() {
        let ca = LinearCA::muller(3).unwrap();
        let ctx = ca.ctx().clone();
        let f = ca.field();
        let phi = Config::from_entries(
            f,
            2,
            [(w(&ctx, "x y"), vec![1, 2]), (ctx.identity(), vec![0, 1]), (w(&ctx, "z"), vec![2, 2])],
        )
        .unwrap();
        let lhs = ca.encode_config(&ca.apply(&phi).unwrap()).unwrap();
        let rhs = gr_mat_apply_right(&ca.to_groupring_matrix(), &ca.encode_config(&phi).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(ca.decode_config(&ca.encode_config(&phi).unwrap()).unwrap(), phi);
        let k = ca.scalar_ring();
        assert_eq!(ca.to_groupring_matrix().get(0, 1), &parse_elem(&ctx, &k, "y + z").unwrap());
    }

    fn random_config(ctx: &GroupCtx, f: PrimeField, m: usize, radius: usize, seed: u64) -> Config {
        let mut s = Stream::new("test/config", seed, &[]);
        let ball = ctx.ball(radius);
        let mut entries = Vec::new();
        for g in &ball {
            if s.coin() {
                entries.push((g.clone(), (0..m).map(|_| s.below(f.p())).collect()));
            }
        }
        Config::from_entries(f, m, entries).unwrap()
    }

    fn random_ca(seed: u64) -> LinearCA {
        let ctx = GroupCtx::w3();
        let f = PrimeField::new(3).unwrap();
        let mut s = Stream::new("test/ca", seed, &[]);
        let ball = ctx.ball(1);
        let keep: Vec<bool> = ball.iter().map(|_| s.coin()).collect();
        let memory: ElementSet = ball.iter().zip(&keep).filter(|(_, &k)| k).map(|(g, _)| g.clone()).collect();
        let memory = if memory.is_empty() { ElementSet::singleton(ctx.identity()) } else { memory };
        LinearCA::random(ctx, memory, f, 2, &mut s).unwrap()
    }

    proptest! {
        #[test]
        fn locality(seed in any::<u64>()) {
            let ca = random_ca(seed);
            let ctx = ca.ctx().clone();
            let f = ca.field();
            let window: ElementSet = ctx.ball(1).iter().take(3).cloned().collect();
            let dom = ca.image_domain(&window);
            let phi = random_config(&ctx, f, 2, 2, seed);
            let noise = random_config(&ctx, f, 2, 3, seed ^ 1);
            // psi agrees with phi on SW and is random elsewhere.
            let outside = Config::from_entries(f, 2, noise.entries().filter(|(g, _)| !dom.contains(g)).map(|(g, v)| (g.clone(), v.clone()))).unwrap();
            let inside = Config::from_entries(f, 2, phi.entries().filter(|(g, _)| dom.contains(g)).map(|(g, v)| (g.clone(), v.clone()))).unwrap();
            let psi = inside.add(&outside).unwrap();
            let a = ca.apply(&phi).unwrap().restrict(&window).unwrap();
            let b = ca.apply(&psi).unwrap().restrict(&window).unwrap();
            prop_assert_eq!(&a, &b);
            let im = ca.image_map(&window).unwrap();
            let flat = im.mul_vec(&phi.restrict(&dom).unwrap().flatten()).unwrap();
            prop_assert_eq!(flat, a.flatten());
        }

        #[test]
        fn linearity_and_support(seed in any::<u64>(), lambda in 0u64..3) {
            let ca = random_ca(seed);
            let ctx = ca.ctx().clone();
            let f = ca.field();
            let phi = random_config(&ctx, f, 2, 2, seed);
            let psi = random_config(&ctx, f, 2, 2, seed.wrapping_add(7));
            let lhs = ca.apply(&phi.add(&psi.scale(lambda)).unwrap()).unwrap();
            let rhs = ca.apply(&phi).unwrap().add(&ca.apply(&psi).unwrap().scale(lambda)).unwrap();
            prop_assert_eq!(lhs, rhs);
            let image = ca.apply(&phi).unwrap();
            let bound = ctx.set_product(&ctx.inverse_set(ca.memory()), &phi.support());
            prop_assert!(image.support().is_subset(&bound));
        }

        #[test]
        fn groupring_encoding_on_random_input(seed in any::<u64>()) {
            let ca = random_ca(seed);
            let phi = random_config(ca.ctx(), ca.field(), 2, 2, seed);
            let lhs = ca.encode_config(&ca.apply(&phi).unwrap()).unwrap();
            let rhs = gr_mat_apply_right(&ca.to_groupring_matrix(), &ca.encode_config(&phi).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
