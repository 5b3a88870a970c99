//! Constructed dependent singular points of case I.

use transurf::classify::Tag;
use transurf::curves::catalog::{helix_companion, twisted_companion, twisted_helix, unit_helix};
use transurf::surface::TranslationSurface;
use transurf::Result;

pub struct Instance {
    pub label: String,
    pub surface: TranslationSurface,
    pub u: f64,
    pub v: f64,
    pub expected: Tag,
}

/// Helix pairs with `u = 2·sign·atan v`, plus twisted-frame versions.
pub fn case_one() -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    let plain = [
        (0.6, -1.0, 0.0, Tag::CuspidalEdge),
        (0.6, -1.0, 1.0, Tag::Swallowtail),
        (0.6, 1.0, 1.0, Tag::CuspidalCrossCap),
        (0.6, 1.0, 0.5, Tag::CuspidalEdge),
        (0.8, -1.0, -0.6, Tag::CuspidalEdge),
        (0.8, -1.0, -1.0, Tag::Swallowtail),
        (0.8, 1.0, -1.0, Tag::CuspidalCrossCap),
    ];
    for (a, sign, v, expected) in plain {
        out.push(Instance {
            label: format!("helix({a}) sign {sign} v={v}"),
            surface: TranslationSurface::new(unit_helix(a)?, helix_companion(a, sign)?),
            u: 2.0 * sign * f64::atan(v),
            v,
            expected,
        });
    }
    for (a, sign, v, r1, r2, expected) in [
        (0.6, -1.0, 0.4, 0.7, -0.4, Tag::CuspidalEdge),
        (0.6, 1.0, -0.3, 0.3, 1.1, Tag::CuspidalEdge),
    ] {
        out.push(Instance {
            label: format!("twisted helix({a}) sign {sign} v={v}"),
            surface: TranslationSurface::new(twisted_helix(a, r1)?, twisted_companion(a, sign, r2)?),
            u: 2.0 * sign * f64::atan(v),
            v,
            expected,
        });
    }
    Ok(out)
}
