//! Adaptive 1-D integration and non-negative series summation.
//!
//! Integration is globally adaptive Gauss–Kronrod (7/15): the panel with the
//! largest error estimate is bisected until the summed estimate drops below
//! the absolute tolerance. Panel selection is deterministic (largest error,
//! then leftmost), so results do not depend on anything but the inputs.

use crate::error::{Error, Result};

// Kronrod abscissae in (0, 1], descending; odd positions are the Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_PANELS: usize = 20_000;
const MAX_TRUNCATION_DOUBLINGS: u32 = 1100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailRule {
    /// The integrand is monotone decreasing on the tail: integrate up to the
    /// first point where it falls below `threshold` and drop the rest.
    MonotoneTruncation { threshold: f64 },
    /// Map `[a, inf)` onto `[0, 1)` with `t = a + u / (1 - u)`.
    Substitution,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UpperBound {
    Finite(f64),
    Infinite(TailRule),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationSpec {
    pub lower: f64,
    pub upper: UpperBound,
    pub abs_tol: f64,
    /// Maximum number of bisections applied to any one panel.
    pub max_depth: u32,
}

impl IntegrationSpec {
    pub fn finite(lower: f64, upper: f64, abs_tol: f64) -> Self {
        Self {
            lower,
            upper: UpperBound::Finite(upper),
            abs_tol,
            max_depth: 40,
        }
    }

    pub fn semi_infinite(lower: f64, tail: TailRule, abs_tol: f64) -> Self {
        Self {
            lower,
            upper: UpperBound::Infinite(tail),
            abs_tol,
            max_depth: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    /// False when refinement stopped at `max_depth` (or the panel budget)
    /// before reaching the tolerance.
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, depth: u32) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
        depth,
    }
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64, max_depth: u32) -> Integral {
    let mut panels = vec![gauss_kronrod(f, a, b, 0)];
    let converged = loop {
        let total_error: f64 = panels.iter().map(|p| p.error).sum();
        if total_error <= abs_tol {
            break true;
        }
        if !total_error.is_finite() {
            break false;
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|(_, p), (_, q)| p.error.total_cmp(&q.error).then(q.a.total_cmp(&p.a)))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let p = panels[worst];
        if p.depth >= max_depth || panels.len() >= MAX_PANELS {
            break false;
        }
        let mid = 0.5 * (p.a + p.b);
        panels[worst] = gauss_kronrod(f, p.a, mid, p.depth + 1);
        panels.push(gauss_kronrod(f, mid, p.b, p.depth + 1));
    };
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    Integral {
        value: panels.iter().map(|p| p.value).sum(),
        error: panels.iter().map(|p| p.error).sum(),
        converged,
    }
}

/// Integrates `f` over the domain described by `spec`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, spec: &IntegrationSpec) -> Result<Integral> {
    if !(spec.abs_tol > 0.0) {
        return Err(Error::invalid("abs_tol", "tolerance must be positive"));
    }
    if !spec.lower.is_finite() {
        return Err(Error::invalid("lower", "lower bound must be finite"));
    }
    match spec.upper {
        UpperBound::Finite(b) => {
            if !(b >= spec.lower) {
                return Err(Error::invalid("upper", "bounds must be ordered"));
            }
            if b == spec.lower {
                return Ok(Integral {
                    value: 0.0,
                    error: 0.0,
                    converged: true,
                });
            }
            Ok(adaptive(&f, spec.lower, b, spec.abs_tol, spec.max_depth))
        }
        UpperBound::Infinite(TailRule::Substitution) => {
            let a = spec.lower;
            let g = |u: f64| {
                let w = 1.0 - u;
                f(a + u / w) / (w * w)
            };
            Ok(adaptive(&g, 0.0, 1.0, spec.abs_tol, spec.max_depth))
        }
        UpperBound::Infinite(TailRule::MonotoneTruncation { threshold }) => {
            if !(threshold > 0.0) {
                return Err(Error::invalid("threshold", "truncation threshold must be positive"));
            }
            let a = spec.lower;
            let mut step = 1.0_f64.max(a.abs());
            let mut found = false;
            for _ in 0..MAX_TRUNCATION_DOUBLINGS {
                if f(a + step).abs() < threshold {
                    found = true;
                    break;
                }
                step *= 2.0;
                if !step.is_finite() {
                    break;
                }
            }
            let mut out = adaptive(&f, a, a + step, spec.abs_tol, spec.max_depth);
            out.converged &= found;
            Ok(out)
        }
    }
}

/// When to stop summing a series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    /// Stop once a term is at most `rel_tol` times the running sum.
    pub rel_tol: f64,
    /// Hard cap on the number of terms.
    pub n_max: usize,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            n_max: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    pub terms: usize,
    /// True when `n_max` was hit before the relative stop fired.
    pub truncated: bool,
}

/// Sums non-negative terms `t_start, t_{start+1}, ...` where each term is
/// produced from its predecessor by `next(n, t_n)`.
pub fn sum_series<F>(first: f64, start: usize, mut next: F, rule: StopRule) -> SeriesSum
where
    F: FnMut(usize, f64) -> f64,
{
    let mut sum = 0.0;
    let mut term = first;
    let mut n = start;
    let mut count = 0;
    loop {
        sum += term;
        count += 1;
        if term <= rule.rel_tol * sum {
            return SeriesSum {
                value: sum,
                terms: count,
                truncated: false,
            };
        }
        if count >= rule.n_max {
            return SeriesSum {
                value: sum,
                terms: count,
                truncated: true,
            };
        }
        term = next(n, term);
        n += 1;
    }
}
