//! Adaptive quadrature built on the 15-point Gauss-Kronrod pair.

use crate::error::{Error, Result};

// 15-point Kronrod abscissae (positive half), 7-point Gauss weights and
// 15-point Kronrod weights, as tabulated in QUADPACK's qk15.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
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

/// One G7/K15 application on `[a, b]`: returns (kronrod value, |K15 - G7|).
fn gk15<F>(f: &mut F, a: f64, b: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);

    let f_center = f(center);
    let mut kronrod = WGK[7] * f_center;
    let mut gauss = WG[3] * f_center;

    for j in 0..7 {
        let dx = half * XGK[j];
        let fsum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * fsum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * fsum;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integrate `f` over `[a, b]` (a <= b or reversed) to absolute tolerance
/// `tol`, splitting the worst subinterval first.
pub fn integrate_adaptive<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };

    struct Panel {
        a: f64,
        b: f64,
        value: f64,
        err: f64,
    }

    let (v, e) = gk15(&mut f, lo, hi);
    let mut panels = vec![Panel {
        a: lo,
        b: hi,
        value: v,
        err: e,
    }];

    const MAX_PANELS: usize = 4096;
    loop {
        let total_err: f64 = panels.iter().map(|p| p.err).sum();
        if total_err <= tol {
            let total: f64 = panels.iter().map(|p| p.value).sum();
            if !total.is_finite() {
                return Err(Error::QuadratureTolerance {
                    tol,
                    err: f64::INFINITY,
                });
            }
            return Ok(sign * total);
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::QuadratureTolerance {
                tol,
                err: total_err,
            });
        }
        // Split the panel with the largest error estimate.
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .expect("non-empty panel list");
        let Panel { a: pa, b: pb, .. } = panels.swap_remove(idx);
        let mid = 0.5 * (pa + pb);
        if mid <= pa || mid >= pb {
            return Err(Error::QuadratureTolerance {
                tol,
                err: total_err,
            });
        }
        let (v1, e1) = gk15(&mut f, pa, mid);
        let (v2, e2) = gk15(&mut f, mid, pb);
        panels.push(Panel {
            a: pa,
            b: mid,
            value: v1,
            err: e1,
        });
        panels.push(Panel {
            a: mid,
            b: pb,
            value: v2,
            err: e2,
        });
    }
}
