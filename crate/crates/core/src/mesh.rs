//! OBJ and CSV export of a sampled translation surface.

use crate::error::{Error, Result};
use crate::surface::TranslationSurface;

/// Nine significant digits, with `-0` printed as `0`.
fn fmt9(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.8e}")
}

fn check_grid(window: [f64; 4], n: usize) -> Result<()> {
    if !(window[0] < window[1] && window[2] < window[3]) {
        return Err(Error::Input(format!("empty window {window:?}")));
    }
    if n < 2 {
        return Err(Error::Input(format!("grid must have at least 2 nodes per side, got {n}")));
    }
    Ok(())
}

/// Row-major samples `(u_i, v_j, x(u_i, v_j))`, `u` outer.
pub fn sample_grid(s: &TranslationSurface, window: [f64; 4], n: usize) -> Result<Vec<(f64, f64, [f64; 3])>> {
    check_grid(window, n)?;
    let step = |a: f64, b: f64, k: usize| a + (b - a) * k as f64 / (n - 1) as f64;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let u = step(window[0], window[1], i);
        for j in 0..n {
            let v = step(window[2], window[3], j);
            out.push((u, v, s.point(u, v)?));
        }
    }
    Ok(out)
}

/// `v x y z` lines followed by two `f i j k` triangles per grid cell (1-based).
pub fn mesh_obj(s: &TranslationSurface, window: [f64; 4], n: usize) -> Result<String> {
    let grid = sample_grid(s, window, n)?;
    let mut out = String::new();
    for (_, _, p) in &grid {
        out.push_str(&format!("v {} {} {}\n", fmt9(p[0]), fmt9(p[1]), fmt9(p[2])));
    }
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            let k = i * n + j + 1;
            out.push_str(&format!("f {} {} {}\n", k, k + n, k + n + 1));
            out.push_str(&format!("f {} {} {}\n", k, k + n + 1, k + 1));
        }
    }
    Ok(out)
}

/// `u,v,x,y,z` for every grid node.
pub fn mesh_csv(s: &TranslationSurface, window: [f64; 4], n: usize) -> Result<String> {
    let mut out = String::from("u,v,x,y,z\n");
    for (u, v, p) in sample_grid(s, window, n)? {
        out.push_str(&format!("{},{},{},{},{}\n", fmt9(u), fmt9(v), fmt9(p[0]), fmt9(p[1]), fmt9(p[2])));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::catalog::catalog_pair;

    #[test]
    fn counts_and_origin_vertex() {
        let (a, b) = catalog_pair("s1p").unwrap();
        let s = TranslationSurface::new(a, b);
        let obj = mesh_obj(&s, [-2.0, 2.0, -2.0, 2.0], 33).unwrap();
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 1089);
        assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 2048);
        assert!(obj.contains("v 0.00000000e0 0.00000000e0 0.00000000e0\n"));
        assert!(mesh_obj(&s, [1.0, 1.0, 0.0, 1.0], 33).is_err());
    }
}
