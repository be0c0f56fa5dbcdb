//! Seeded random scenarios for property checks and the self-test.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{classify, PolygonKind, QuadRow, Scenario, SlopeGroup, TRIANGLE_ROWS};

/// Sampling ranges and the minimum spacing between distinct critical points.
#[derive(Debug, Clone, Copy)]
pub struct SampleOptions {
    pub slope_range: f64,
    pub point_range: f64,
    pub min_gap: f64,
    pub min_slope_gap: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub max_tries: usize,
}

impl Default for SampleOptions {
    fn default() -> Self {
        Self {
            slope_range: 2.0,
            point_range: 3.0,
            min_gap: 0.05,
            min_slope_gap: 0.05,
            epsilon: 0.1,
            delta: 0.25,
            max_tries: 100_000,
        }
    }
}

fn sorted_slopes<R: Rng>(rng: &mut R, n: usize, o: &SampleOptions) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-o.slope_range..o.slope_range)).collect();
        v.sort_by(f64::total_cmp);
        if v.windows(2).all(|w| w[1] - w[0] > o.min_slope_gap) {
            return v;
        }
    }
}

/// Intercepts realising the given critical points: b_{i+1} = b_i − p_i(a_{i+1} − a_i).
fn intercepts<R: Rng>(rng: &mut R, a: &[f64], p: &[f64]) -> Vec<f64> {
    let k = a.len();
    let mut b = vec![rng.gen_range(-1.0..1.0); 1];
    for i in 0..k - 1 {
        b.push(b[i] - p[i] * (a[i + 1] - a[i]));
    }
    b
}

/// Solve Σ p_i (a_{i+1} − a_i) = 0 for p[idx].
fn close_cycle(a: &[f64], p: &mut [f64], idx: usize) {
    let k = a.len();
    let d = |i: usize| a[(i + 1) % k] - a[i];
    let rest: f64 = (0..k).filter(|&i| i != idx).map(|i| p[i] * d(i)).sum();
    p[idx] = -rest / d(idx);
}

pub fn sample_triangle<R: Rng>(rng: &mut R, o: &SampleOptions) -> Result<Scenario> {
    let row = *TRIANGLE_ROWS.choose(rng).expect("non-empty");
    for _ in 0..o.max_tries {
        let sorted = sorted_slopes(rng, 3, o);
        let mut a = [0.0; 3];
        for (rank, &i) in row.iter().enumerate() {
            a[i] = sorted[rank];
        }
        let mut p = [0.0; 3];
        p[0] = rng.gen_range(-o.point_range..o.point_range);
        p[1] = rng.gen_range(-o.point_range..o.point_range);
        close_cycle(&a, &mut p, 2);
        if (0..3).any(|i| (p[i] - p[(i + 1) % 3]).abs() < o.min_gap) || p[2].abs() > 10.0 * o.point_range {
            continue;
        }
        let b = intercepts(rng, &a, &p);
        let s = Scenario::from_coefficients(&a, &b, o.epsilon, o.delta)?;
        if classify(&s).kind == PolygonKind::Triangle {
            return Ok(s);
        }
    }
    Err(Error::NoConvergence { terms: o.max_tries })
}

fn group_slopes<R: Rng>(rng: &mut R, g: SlopeGroup, o: &SampleOptions) -> [f64; 4] {
    let v = sorted_slopes(rng, 4, o);
    let (lo, hi) = (v[0], v[3]);
    let mut mid = [v[1], v[2]];
    mid.shuffle(rng);
    let mut low = [v[0], v[1]];
    low.shuffle(rng);
    let mut high = [v[2], v[3]];
    high.shuffle(rng);
    match g {
        SlopeGroup::EvenInsideOddUp => [lo, mid[0], hi, mid[1]],
        SlopeGroup::EvenInsideOddDown => [hi, mid[0], lo, mid[1]],
        SlopeGroup::OddInsideEvenUp => [mid[0], lo, mid[1], hi],
        SlopeGroup::OddInsideEvenDown => [mid[0], hi, mid[1], lo],
        SlopeGroup::OddBelowEven => [low[0], high[0], low[1], high[1]],
        SlopeGroup::EvenBelowOdd => [high[0], low[0], high[1], low[1]],
    }
}

/// A convex quadrilateral scenario matching `row` (either orientation).
pub fn sample_quad<R: Rng>(row: &QuadRow, rng: &mut R, o: &SampleOptions) -> Result<Scenario> {
    let tied = row.tie.map(|j| (row.order[j], row.order[j + 1]));
    let solve = (0..4)
        .rev()
        .find(|&i| tied.is_none_or(|(x, y)| i != x && i != y))
        .expect("some index is free");
    for _ in 0..o.max_tries {
        let a = group_slopes(rng, row.slopes, o);
        let mut p = [0.0; 4];
        for v in p.iter_mut() {
            *v = rng.gen_range(-o.point_range..o.point_range);
        }
        if let Some((x, y)) = tied {
            p[y] = p[x];
        }
        close_cycle(&a, &mut p, solve);
        if p[solve].abs() > 10.0 * o.point_range {
            continue;
        }
        let gaps_ok = (0..4).all(|i| {
            (0..i).all(|j| tied == Some((i, j)) || tied == Some((j, i)) || (p[i] - p[j]).abs() >= o.min_gap)
        });
        if !gaps_ok || !row.order_holds(p) {
            continue;
        }
        let b = intercepts(rng, &a, &p);
        let s = Scenario::from_coefficients(&a, &b, o.epsilon, o.delta)?;
        if classify(&s).quad_row == Some(*row) {
            return Ok(s);
        }
    }
    Err(Error::NoConvergence { terms: o.max_tries })
}
