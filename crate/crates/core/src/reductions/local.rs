use crate::error::{Error, Result};
use crate::exact;
use crate::functions::{random_lipschitz, AnchorFunction, Evaluate};
use crate::numerics::{NormKind, Point};
use crate::protocols::Bits;
use rand::seq::index::sample;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Largest locality for which `local_to_comp` materializes all `2^r` blocks.
pub const MAX_LOCALITY: usize = 12;

/// The public part of an `r`-local family: the selector `L` and the map `f'`.
///
/// `L(z)` is piecewise constant in the first coordinate: `regions[j]` is used
/// on the `j`-th interval cut out of `[0,1]` by the increasing `cuts`.
/// `f'(a, b, z)` is `table[a * 2^r + b](z)`, with the bit strings `a`, `b`
/// read as integers whose first bit is the most significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LocalPublicRepr", into = "LocalPublicRepr")]
pub struct LocalPublic {
    n: usize,
    bits: usize,
    r: usize,
    cuts: Vec<f64>,
    regions: Vec<Vec<usize>>,
    table: Vec<AnchorFunction>,
    lambda: f64,
    norm: NormKind,
}

#[derive(Clone, Serialize, Deserialize)]
struct LocalPublicRepr {
    n: usize,
    big_n: usize,
    r: usize,
    #[serde(with = "exact::vec")]
    cuts: Vec<f64>,
    regions: Vec<Vec<usize>>,
    table: Vec<AnchorFunction>,
    #[serde(with = "exact")]
    lambda: f64,
    p: NormKind,
}

impl TryFrom<LocalPublicRepr> for LocalPublic {
    type Error = Error;

    fn try_from(r: LocalPublicRepr) -> Result<Self> {
        LocalPublic::new(r.n, r.big_n, r.r, r.cuts, r.regions, r.table, r.lambda, r.p)
    }
}

impl From<LocalPublic> for LocalPublicRepr {
    fn from(p: LocalPublic) -> Self {
        LocalPublicRepr {
            n: p.n,
            big_n: p.bits,
            r: p.r,
            cuts: p.cuts,
            regions: p.regions,
            table: p.table,
            lambda: p.lambda,
            p: p.norm,
        }
    }
}

impl LocalPublic {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        big_n: usize,
        r: usize,
        cuts: Vec<f64>,
        regions: Vec<Vec<usize>>,
        table: Vec<AnchorFunction>,
        lambda: f64,
        norm: NormKind,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if r > big_n {
            return Err(Error::InvalidParameter(format!(
                "r = {r} exceeds N = {big_n}"
            )));
        }
        if r > MAX_LOCALITY {
            return Err(Error::SizeOverflow(format!(
                "locality {r} > {MAX_LOCALITY}"
            )));
        }
        if regions.len() != cuts.len() + 1 {
            return Err(Error::InvalidParameter(format!(
                "{} cuts need {} regions, got {}",
                cuts.len(),
                cuts.len() + 1,
                regions.len()
            )));
        }
        if cuts.windows(2).any(|w| !(w[0] < w[1])) || cuts.iter().any(|c| !(0.0..=1.0).contains(c))
        {
            return Err(Error::InvalidParameter(
                "cuts must increase inside [0,1]".into(),
            ));
        }
        for reg in &regions {
            if reg.len() != r {
                return Err(Error::InvalidParameter(format!(
                    "L(z) has {} elements, expected {r}",
                    reg.len()
                )));
            }
            if reg.windows(2).any(|w| w[0] >= w[1]) || reg.iter().any(|&i| i >= big_n) {
                return Err(Error::InvalidParameter(
                    "regions must be sorted subsets of [N]".into(),
                ));
            }
        }
        if table.len() != 1 << (2 * r) {
            return Err(Error::InvalidParameter(format!(
                "f' table needs 4^{r} entries, got {}",
                table.len()
            )));
        }
        if let Some(f) = table.iter().find(|f| f.in_dim() != n || f.out_dim() != n) {
            return Err(Error::Dimension {
                expected: n,
                got: if f.in_dim() != n {
                    f.in_dim()
                } else {
                    f.out_dim()
                },
            });
        }
        if let Some(f) = table
            .iter()
            .find(|f| f.lambda() > lambda + crate::DEFAULT_TOL)
        {
            return Err(Error::InvalidParameter(format!(
                "f' entry is {}-Lipschitz, family declares {lambda}",
                f.lambda()
            )));
        }
        Ok(LocalPublic {
            n,
            bits: big_n,
            r,
            cuts,
            regions,
            table,
            lambda,
            norm,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn input_bits(&self) -> usize {
        self.bits
    }

    pub fn locality(&self) -> usize {
        self.r
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn norm(&self) -> NormKind {
        self.norm
    }

    pub fn region_count(&self) -> usize {
        self.regions.len()
    }

    /// `L(z)`, sorted.
    pub fn select(&self, z: &[f64]) -> &[usize] {
        let j = self.cuts.partition_point(|&c| c <= z[0]);
        &self.regions[j]
    }

    /// `s|_L` as an integer, first index most significant.
    pub fn restrict(&self, s: &Bits, set: &[usize]) -> usize {
        set.iter()
            .fold(0, |acc, &i| (acc << 1) | s.get(i).unwrap_or(false) as usize)
    }

    /// `f'(a, b, z)` for `a`, `b` in `0 .. 2^r`.
    pub fn f_prime(&self, a: usize, b: usize, z: &[f64]) -> Vec<f64> {
        self.table[(a << self.r) | b].apply(z)
    }
}

/// A local family together with both players' bit strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LocalFamilyRepr", into = "LocalFamilyRepr")]
pub struct LocalFamily {
    public: LocalPublic,
    x: Bits,
    y: Bits,
}

#[derive(Clone, Serialize, Deserialize)]
struct LocalFamilyRepr {
    public: LocalPublic,
    x: Bits,
    y: Bits,
}

impl TryFrom<LocalFamilyRepr> for LocalFamily {
    type Error = Error;

    fn try_from(r: LocalFamilyRepr) -> Result<Self> {
        LocalFamily::new(r.public, r.x, r.y)
    }
}

impl From<LocalFamily> for LocalFamilyRepr {
    fn from(f: LocalFamily) -> Self {
        LocalFamilyRepr {
            public: f.public,
            x: f.x,
            y: f.y,
        }
    }
}

impl LocalFamily {
    pub fn new(public: LocalPublic, x: Bits, y: Bits) -> Result<Self> {
        for (who, s) in [("x", &x), ("y", &y)] {
            if s.len() != public.bits {
                return Err(Error::InvalidParameter(format!(
                    "{who} has {} bits, expected N = {}",
                    s.len(),
                    public.bits
                )));
            }
        }
        Ok(LocalFamily { public, x, y })
    }

    /// A random family. `regions` pieces of `L`, each a uniform `r`-subset of
    /// `[N]` with uniform cut points; `f'` entries from [`random_lipschitz`].
    /// With one region, every `f_{x,y}` is `lambda`-Lipschitz.
    #[allow(clippy::too_many_arguments)]
    pub fn random(
        seed: u64,
        big_n: usize,
        n: usize,
        r: usize,
        regions: usize,
        lambda: f64,
        norm: NormKind,
    ) -> Result<Self> {
        if regions == 0 {
            return Err(Error::InvalidParameter("need at least one region".into()));
        }
        if r > 6 {
            return Err(Error::SizeOverflow(format!(
                "random f' tables stop at r = 6, got {r}"
            )));
        }
        if r > big_n {
            return Err(Error::InvalidParameter(format!(
                "r = {r} exceeds N = {big_n}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cuts: Vec<f64> = (1..regions).map(|_| rng.random::<f64>()).collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let regions = (0..=cuts.len())
            .map(|_| {
                let mut s = sample(&mut rng, big_n, r).into_vec();
                s.sort_unstable();
                s
            })
            .collect();
        let table = (0..1usize << (2 * r))
            .map(|_| random_lipschitz(rng.random(), n, n, lambda, norm, 6))
            .collect::<Result<Vec<_>>>()?;
        let x = (0..big_n).map(|_| rng.random()).collect();
        let y = (0..big_n).map(|_| rng.random()).collect();
        let public = LocalPublic::new(n, big_n, r, cuts, regions, table, lambda, norm)?;
        LocalFamily::new(public, x, y)
    }

    pub fn public(&self) -> &LocalPublic {
        &self.public
    }

    pub fn x(&self) -> &Bits {
        &self.x
    }

    pub fn y(&self) -> &Bits {
        &self.y
    }

    pub fn dim(&self) -> usize {
        self.public.n
    }

    pub fn encoder(&self) -> LocalEncoder {
        LocalEncoder {
            public: self.public.clone(),
            x: self.x.clone(),
        }
    }

    pub fn selector(&self) -> LocalSelector {
        LocalSelector {
            public: self.public.clone(),
            y: self.y.clone(),
        }
    }
}

impl Evaluate for LocalFamily {
    fn in_dim(&self) -> usize {
        self.public.n
    }

    fn out_dim(&self) -> usize {
        self.public.n
    }

    fn apply(&self, z: &[f64]) -> Vec<f64> {
        let set = self.public.select(z);
        let a = self.public.restrict(&self.x, set);
        let b = self.public.restrict(&self.y, set);
        self.public.f_prime(a, b, z)
    }
}

/// `f_{x,y}(z) = f'(x|L(z), y|L(z), z)`.
pub fn local_eval(fam: &LocalFamily, z: &Point) -> Result<Point> {
    let set = fam.public.select(z.coords());
    if set.len() != fam.public.r {
        return Err(Error::InvalidParameter(format!(
            "L(z) has {} elements, expected {}",
            set.len(),
            fam.public.r
        )));
    }
    Point::new(fam.eval(z)?)
}

/// A's side of the composition: `z -> (f'(x|L(z), beta_1, z), ...,
/// f'(x|L(z), beta_{2^r}, z), z)`, where `beta_i` is `i - 1` written in
/// `r` bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalEncoder {
    public: LocalPublic,
    x: Bits,
}

impl Evaluate for LocalEncoder {
    fn in_dim(&self) -> usize {
        self.public.n
    }

    fn out_dim(&self) -> usize {
        self.public.n * ((1 << self.public.r) + 1)
    }

    fn apply(&self, z: &[f64]) -> Vec<f64> {
        let set = self.public.select(z);
        let a = self.public.restrict(&self.x, set);
        let mut out = Vec::with_capacity(self.out_dim());
        for beta in 0..1usize << self.public.r {
            out.extend(self.public.f_prime(a, beta, z));
        }
        out.extend_from_slice(z);
        out
    }
}

/// B's side: reads `z` from the last block and returns block `y|L(z)`.
/// Agrees with the composition target only on the image of the encoder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalSelector {
    public: LocalPublic,
    y: Bits,
}

impl Evaluate for LocalSelector {
    fn in_dim(&self) -> usize {
        self.public.n * ((1 << self.public.r) + 1)
    }

    fn out_dim(&self) -> usize {
        self.public.n
    }

    fn apply(&self, w: &[f64]) -> Vec<f64> {
        let n = self.public.n;
        let z = &w[n << self.public.r..];
        let i = self.public.restrict(&self.y, self.public.select(z));
        w[i * n..(i + 1) * n].to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::Anchor;

    fn const_table(r: usize, n: usize, v: f64) -> Vec<AnchorFunction> {
        (0..1 << (2 * r))
            .map(|_| {
                AnchorFunction::new(
                    n,
                    n,
                    vec![Anchor::new(vec![0.5; n], vec![v; n])],
                    0.0,
                    NormKind::Inf,
                )
                .unwrap()
            })
            .collect()
    }

    #[test]
    fn constant_f_prime_gives_constant_family() {
        let public = LocalPublic::new(
            2,
            4,
            1,
            vec![0.5],
            vec![vec![0], vec![3]],
            const_table(1, 2, 0.25),
            1.0,
            NormKind::Inf,
        )
        .unwrap();
        let fam =
            LocalFamily::new(public, "1010".parse().unwrap(), "0110".parse().unwrap()).unwrap();
        for z in [[0.0, 0.0], [0.7, 0.2], [1.0, 1.0]] {
            let v = local_eval(&fam, &Point::new(z.to_vec()).unwrap()).unwrap();
            assert_eq!(v.coords(), &[0.25, 0.25]);
        }
    }

    #[test]
    fn restriction_reads_most_significant_first() {
        let public = LocalPublic::new(
            1,
            4,
            2,
            vec![],
            vec![vec![1, 3]],
            const_table(2, 1, 0.0),
            1.0,
            NormKind::Inf,
        )
        .unwrap();
        let s: Bits = "0100".parse().unwrap();
        assert_eq!(public.restrict(&s, &[1, 3]), 0b10);
        let s: Bits = "0001".parse().unwrap();
        assert_eq!(public.restrict(&s, &[1, 3]), 0b01);
    }

    #[test]
    fn f_prime_ignoring_bits() {
        let f = random_lipschitz(4, 2, 2, 1.0, NormKind::Inf, 5).unwrap();
        let table = vec![f.clone(); 4];
        let public = LocalPublic::new(
            2,
            3,
            1,
            vec![0.3],
            vec![vec![0], vec![2]],
            table,
            1.0,
            NormKind::Inf,
        )
        .unwrap();
        let fam = LocalFamily::new(public, "101".parse().unwrap(), "011".parse().unwrap()).unwrap();
        let z = Point::new(vec![0.9, 0.1]).unwrap();
        assert_eq!(
            local_eval(&fam, &z).unwrap().coords(),
            f.apply(z.coords()).as_slice()
        );
    }

    #[test]
    fn direct_substitution_oracle() {
        let fam = LocalFamily::random(8, 10, 2, 2, 4, 1.0, NormKind::L2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let z: Vec<f64> = (0..2).map(|_| rng.random()).collect();
            let p = fam.public();
            let set = p.select(&z).to_vec();
            let bit = |s: &Bits, i: usize| s.get(i).unwrap() as usize;
            let a = set.iter().fold(0, |acc, &i| acc * 2 + bit(fam.x(), i));
            let b = set.iter().fold(0, |acc, &i| acc * 2 + bit(fam.y(), i));
            let want = p.table[a * 4 + b].apply(&z);
            assert_eq!(
                local_eval(&fam, &Point::new(z).unwrap()).unwrap().coords(),
                want.as_slice()
            );
        }
    }

    #[test]
    fn bad_shapes_are_rejected() {
        assert!(LocalPublic::new(
            1,
            4,
            2,
            vec![],
            vec![vec![1]],
            const_table(2, 1, 0.0),
            1.0,
            NormKind::Inf
        )
        .is_err());
        assert!(LocalPublic::new(
            1,
            4,
            1,
            vec![],
            vec![vec![1]],
            const_table(2, 1, 0.0),
            1.0,
            NormKind::Inf
        )
        .is_err());
        let public = LocalPublic::new(
            1,
            4,
            1,
            vec![],
            vec![vec![1]],
            const_table(1, 1, 0.0),
            1.0,
            NormKind::Inf,
        )
        .unwrap();
        assert!(LocalFamily::new(public, "101".parse().unwrap(), "1010".parse().unwrap()).is_err());
    }

    #[test]
    fn family_round_trips_through_json() {
        let fam = LocalFamily::random(3, 6, 2, 1, 3, 1.5, NormKind::Inf).unwrap();
        let text = serde_json::to_string(&fam).unwrap();
        let back: LocalFamily = serde_json::from_str(&text).unwrap();
        assert_eq!(back, fam);
    }
}
