use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::spectral::ops::dealias_in_place;
use crate::spectral::{Direction, PhysicalField, Projector, SpectralField3};

/// Frequency-interaction families of a Bony decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// `sum_j S_{j-1} a Delta_j b`
    T,
    /// `sum_j Delta_j a Delta~_j b` plus the product of the means
    R,
    /// `T(b, a)`
    TBar,
    /// `sum_j Delta_j a S_{j+2} b` plus the product of the means
    ScriptR,
}

impl Family {
    pub const TRIPLE: [Family; 3] = [Family::T, Family::R, Family::TBar];

    /// Operator pairs `(P_a, P_b)` whose products sum to the family.
    ///
    /// On the torus `a = M a + sum_j Delta_j a` with `M` the directional mean,
    /// so `M a * M b` belongs to neither paraproduct and is carried by the
    /// remainders.
    fn terms(self, dir: Direction, grid: &crate::spectral::Grid) -> Vec<(Projector, Projector)> {
        let range = dir.range(grid);
        let mut out: Vec<(Projector, Projector)> = range
            .iter()
            .map(|j| match self {
                Family::T => (Projector::Low(j - 1), Projector::Block(j)),
                Family::TBar => (Projector::Block(j), Projector::Low(j - 1)),
                Family::R => (Projector::Block(j), Projector::Tilde(j)),
                Family::ScriptR => (Projector::Block(j), Projector::Low(j + 2)),
            })
            .collect();
        if matches!(self, Family::R | Family::ScriptR) {
            out.push((Projector::Mean, Projector::Mean));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BonyPieces {
    pub t: SpectralField3,
    pub r: SpectralField3,
    pub tbar: SpectralField3,
    pub alt_t: SpectralField3,
    pub alt_script_r: SpectralField3,
}

impl BonyPieces {
    pub fn sum(&self) -> SpectralField3 {
        let mut s = &self.t + &self.r;
        s += &self.tbar;
        s
    }

    pub fn alt_sum(&self) -> SpectralField3 {
        &self.alt_t + &self.alt_script_r
    }
}

type Op = Vec<(Direction, Projector)>;

fn apply_ops(f: &SpectralField3, ops: &[(Direction, Projector)]) -> SpectralField3 {
    let grid = f.grid().clone();
    let ops = ops.to_vec();
    f.map_real(move |i| ops.iter().map(|(d, p)| p.factor(&grid, *d, i)).product())
}

/// Physical values of filtered copies of one field, computed once per
/// operator chain; `None` marks a chain that annihilates the field.
struct Filtered<'a> {
    f: &'a SpectralField3,
    cache: HashMap<Op, Option<PhysicalField>>,
}

impl<'a> Filtered<'a> {
    fn new(f: &'a SpectralField3) -> Self {
        Filtered { f, cache: HashMap::new() }
    }

    fn get(&mut self, ops: &Op) -> Option<&PhysicalField> {
        let f = self.f;
        self.cache
            .entry(ops.clone())
            .or_insert_with(|| {
                let p = apply_ops(f, ops);
                (p.max_abs_coeff() > 0.0).then(|| p.to_physical())
            })
            .as_ref()
    }
}

/// Dealiased `sum_terms (P_a a)(P_b b)`, accumulated in physical space.
fn sum_of_products(a: &mut Filtered, b: &mut Filtered, terms: &[(Op, Op)]) -> SpectralField3 {
    let grid = a.f.grid().clone();
    let mut acc = vec![0.0; grid.len()];
    for (oa, ob) in terms {
        let (Some(xa), Some(xb)) = (a.get(oa), b.get(ob)) else {
            continue;
        };
        for ((s, x), y) in acc.iter_mut().zip(xa.values()).zip(xb.values()) {
            *s += x * y;
        }
    }
    let mut out = PhysicalField::from_values(&grid, 1, acc)
        .expect("sized to grid")
        .to_spectral();
    dealias_in_place(&mut out);
    out
}

fn family(a: &mut Filtered, b: &mut Filtered, dir: Direction, fam: Family) -> SpectralField3 {
    let terms: Vec<(Op, Op)> = fam
        .terms(dir, a.f.grid())
        .into_iter()
        .map(|(pa, pb)| (vec![(dir, pa)], vec![(dir, pb)]))
        .collect();
    sum_of_products(a, b, &terms)
}

fn check_pair(a: &SpectralField3, b: &SpectralField3) -> Result<()> {
    a.ensure_same_grid(b)?;
    a.ensure_components(1)?;
    b.ensure_components(1)
}

/// Bony decomposition of the dealiased product `ab` in one direction.
pub fn bony(a: &SpectralField3, b: &SpectralField3, dir: Direction) -> Result<BonyPieces> {
    check_pair(a, b)?;
    let (mut fa, mut fb) = (Filtered::new(a), Filtered::new(b));
    let t = family(&mut fa, &mut fb, dir, Family::T);
    Ok(BonyPieces {
        r: family(&mut fa, &mut fb, dir, Family::R),
        tbar: family(&mut fa, &mut fb, dir, Family::TBar),
        alt_script_r: family(&mut fa, &mut fb, dir, Family::ScriptR),
        alt_t: t.clone(),
        t,
    })
}

/// The nine pieces of the simultaneous horizontal and vertical decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleBony {
    pieces: Vec<((Family, Family), SpectralField3)>,
}

impl DoubleBony {
    pub fn get(&self, h: Family, v: Family) -> Option<&SpectralField3> {
        self.pieces.iter().find(|(k, _)| *k == (h, v)).map(|(_, f)| f)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Family, Family, &SpectralField3)> {
        self.pieces.iter().map(|((h, v), f)| (*h, *v, f))
    }

    pub fn sum(&self) -> SpectralField3 {
        let mut it = self.pieces.iter();
        let mut s = it.next().expect("nine pieces").1.clone();
        for (_, f) in it {
            s += f;
        }
        s
    }
}

pub fn double_bony(a: &SpectralField3, b: &SpectralField3) -> Result<DoubleBony> {
    check_pair(a, b)?;
    let grid = a.grid();
    let (mut fa, mut fb) = (Filtered::new(a), Filtered::new(b));
    let mut pieces = Vec::with_capacity(9);
    for h in Family::TRIPLE {
        let ht = h.terms(Direction::Horizontal, grid);
        for v in Family::TRIPLE {
            let vt = v.terms(Direction::Vertical, grid);
            let mut terms = Vec::with_capacity(ht.len() * vt.len());
            for (ha, hb) in &ht {
                for (va, vb) in &vt {
                    terms.push((
                        vec![(Direction::Horizontal, *ha), (Direction::Vertical, *va)],
                        vec![(Direction::Horizontal, *hb), (Direction::Vertical, *vb)],
                    ));
                }
            }
            pieces.push(((h, v), sum_of_products(&mut fa, &mut fb, &terms)));
        }
    }
    Ok(DoubleBony { pieces })
}

/// The paraproduct `T(a,b)` split into its per-band terms `S_{j-1}a Delta_j b`.
pub fn paraproduct_bands(a: &SpectralField3, b: &SpectralField3, dir: Direction) -> Result<Vec<(i32, SpectralField3)>> {
    check_pair(a, b)?;
    let (mut fa, mut fb) = (Filtered::new(a), Filtered::new(b));
    Ok(dir
        .range(a.grid())
        .iter()
        .map(|j| {
            let term = vec![(vec![(dir, Projector::Low(j - 1))], vec![(dir, Projector::Block(j))])];
            (j, sum_of_products(&mut fa, &mut fb, &term))
        })
        .collect())
}
