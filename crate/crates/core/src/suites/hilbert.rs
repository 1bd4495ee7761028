use rand::Rng;
use serde_json::json;

use super::{Context, Observation, PropertySuite};
use crate::hilbert::{inner_product, HaarBasis};
use crate::limcore::{x_norm, CompositeNorm, CoreNorm, LimFunctionHalf, LimFunctionLine};
use crate::piecewise::GridFunction;
use crate::sample;

pub struct Hilbert;

/// Hat core on `[0, 8]` with a random peak.
pub(crate) fn hat(rng: &mut rand_chacha::ChaCha8Rng) -> crate::Result<LimFunctionHalf> {
    let left = rng.gen_range(0.1..6.0);
    let peak = left + rng.gen_range(0.2..1.0);
    let right = peak + rng.gen_range(0.2..1.0);
    let h = rng.gen_range(-3.0..3.0);
    let core = GridFunction::from_points(&[(0.0, 0.0), (left, 0.0), (peak, h), (right, 0.0)])?;
    LimFunctionHalf::new(core, vec![rng.gen_range(-2.0..2.0)])
}

fn scalar_on(rng: &mut rand_chacha::ChaCha8Rng, t_max: f64) -> crate::Result<LimFunctionHalf> {
    let x = sample::half(rng, 1);
    let end = *x.core().breaks().last().expect("nonempty core");
    let s = t_max / end.max(t_max);
    let breaks = x.core().breaks().iter().map(|t| t * s).collect();
    LimFunctionHalf::new(GridFunction::new(1, breaks, x.core().values().to_vec())?, x.limit().to_vec())
}

impl PropertySuite for Hilbert {
    fn name(&self) -> &'static str {
        "hilbert"
    }

    fn summary(&self) -> &'static str {
        "L_2,lim inner product, Haar basis, Parseval"
    }

    fn run(&self, ctx: &mut Context<'_>) {
        let n = ctx.count();
        ctx.single("gram-identity-through-depth-10", 0.0, || {
            let mut worst: f64 = 0.0;
            for t in [8.0, 3.0] {
                for depth in 0..=10 {
                    let g = HaarBasis::new(t, depth)?.gram();
                    for (i, row) in g.iter().enumerate() {
                        for (k, v) in row.iter().enumerate() {
                            worst = worst.max((v - if i == k { 1.0 } else { 0.0 }).abs());
                        }
                    }
                }
            }
            Ok(Observation::new(worst, json!({ "t_max": [8.0, 3.0], "depths": "0..=10" })))
        });

        ctx.sweep("inner-product-equals-two-norm-squared", 1e-12, n, |rng| {
            let dim = rng.gen_range(1..=3);
            let x = sample::half(rng, dim);
            let nx = x_norm(&x, CompositeNorm::PComposite { p: 2.0 }, CoreNorm::Lp { p: 2.0 })?;
            Ok(Observation::new((inner_product(&x, &x)? - nx * nx).abs(), json!({ "x": x })))
        });

        ctx.sweep("cauchy-schwarz", 1e-12, n, |rng| {
            let dim = rng.gen_range(1..=3);
            let (x, y) = (sample::half(rng, dim), sample::half(rng, dim));
            let xy = inner_product(&x, &y)?;
            let bound = inner_product(&x, &x)? * inner_product(&y, &y)?;
            Ok(Observation::new(((xy * xy - bound) / bound.max(1.0)).max(0.0), json!({ "x": x, "y": y })))
        });

        ctx.sweep("parseval-gap-nonincreasing", 1e-12, n.min(10), |rng| {
            let x = scalar_on(rng, 8.0)?;
            let mut prev = f64::INFINITY;
            let mut err: f64 = 0.0;
            for depth in 0..=12 {
                let p = HaarBasis::new(8.0, depth)?.parseval_check(&x)?;
                err = err.max(p.gap - prev).max(-p.gap);
                prev = p.gap;
            }
            Ok(Observation::new(err, json!({ "x": x })))
        });

        ctx.sweep("parseval-relative-gap-at-depth-12", 1e-3, n.min(20), |rng| {
            let x = hat(rng)?;
            let p = HaarBasis::new(8.0, 12)?.parseval_check(&x)?;
            let rel = p.gap / p.lhs;
            Ok(Observation::new(rel, json!({ "x": x, "parseval": p })).with_value(rel))
        });

        // on a dyadic cell where the core has slope m the wavelet coefficient
        // is -m L^{3/2} / 4
        ctx.sweep("hat-coefficients-closed-form", 1e-12, n.min(50), |rng| {
            let depth = 6;
            let cells = 1usize << depth;
            let width = 8.0 / cells as f64;
            let (i, k) = {
                let i = rng.gen_range(1..cells / 2);
                (i, i + rng.gen_range(1..cells / 2))
            };
            let (l, r) = (i as f64 * width, k as f64 * width);
            let m = 0.5 * (l + r);
            let h = rng.gen_range(0.5..3.0);
            let x = LimFunctionHalf::new(GridFunction::from_points(&[(0.0, 0.0), (l, 0.0), (m, h), (r, 0.0)])?, vec![0.0])?;
            let c = HaarBasis::new(8.0, depth)?.project(&x)?;
            let mut err: f64 = 0.0;
            for j in 0..depth {
                let span = 8.0 / f64::from(1u32 << j);
                for cell in 0..1usize << j {
                    let (a, b) = (cell as f64 * span, (cell + 1) as f64 * span);
                    let slope = if a >= l && b <= m {
                        h / (m - l)
                    } else if a >= m && b <= r {
                        -h / (r - m)
                    } else if b <= l || a >= r {
                        0.0
                    } else {
                        continue;
                    };
                    err = err.max((c.core[(1 << j) + cell] + slope * span.powf(1.5) / 4.0).abs());
                }
            }
            Ok(Observation::new(err, json!({ "x": x })))
        });

        ctx.sweep("line-expansion-symmetric", 0.0, n.min(50), |rng| {
            let x = scalar_on(rng, 4.0)?;
            let sym = LimFunctionLine::from_halves(x.core().clone(), x.core().clone(), x.limit().to_vec(), x.limit().to_vec())?;
            let e = HaarBasis::new(4.0, 6)?.expand_line(&sym)?;
            Ok(Observation::new(if e.neg == e.pos { 0.0 } else { 1.0 }, json!({ "x": sym })))
        });
    }
}
