//! Plain-text SDPA-like dump for offline debugging.
//!
//! Layout follows the sparse SDPA format (`min c'x` s.t. `sum x_k F_k - F_0`
//! PSD). Linear rows go into a leading diagonal block, equalities as two
//! opposite rows. Quadratic terms and the objective offset, which SDPA cannot
//! express, are written as `*` comment lines.

use std::io::Write;

use super::{Affine, ConicProblem};
use crate::error::Result;

pub fn write_sdpa<W: Write>(w: &mut W, p: &ConicProblem) -> Result<()> {
    writeln!(w, "* gidl conic problem")?;
    writeln!(w, "* offset {:e}", p.offset)?;
    for &(i, j, v) in p.quadratic() {
        writeln!(w, "* quadratic {} {} {:e}", i + 1, j + 1, v)?;
    }

    let mut lp: Vec<Affine> = Vec::new();
    for a in p.equalities() {
        lp.push(a.clone());
        lp.push(a.scaled(-1.0));
    }
    lp.extend(p.nonneg().iter().cloned());

    let mut sizes: Vec<i64> = Vec::new();
    if !lp.is_empty() {
        sizes.push(-(lp.len() as i64));
    }
    sizes.extend(p.psd_blocks().iter().map(|b| b.dim() as i64));

    writeln!(w, "{}", p.n_vars())?;
    writeln!(w, "{}", sizes.len())?;
    let joined: Vec<String> = sizes.iter().map(|s| s.to_string()).collect();
    writeln!(w, "{}", joined.join(" "))?;
    let c: Vec<String> = p.objective().iter().map(|v| format!("{v:e}")).collect();
    writeln!(w, "{}", c.join(" "))?;

    let mut entry = |block: usize, i: usize, j: usize, a: &Affine| -> std::io::Result<()> {
        if a.constant != 0.0 {
            writeln!(w, "0 {} {} {} {:e}", block, i + 1, j + 1, -a.constant)?;
        }
        for &(k, v) in &a.compact().terms {
            writeln!(w, "{} {} {} {} {:e}", k + 1, block, i + 1, j + 1, v)?;
        }
        Ok(())
    };
    let mut block = 1;
    if !lp.is_empty() {
        for (r, a) in lp.iter().enumerate() {
            entry(block, r, r, a)?;
        }
        block += 1;
    }
    for b in p.psd_blocks() {
        for j in 0..b.dim() {
            for i in 0..=j {
                entry(block, i, j, b.get(i, j))?;
            }
        }
        block += 1;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conic::PsdBlock;

    #[test]
    fn small_dump() {
        let mut p = ConicProblem::new();
        let v = p.add_vars(2);
        p.add_objective(v[0], 1.0);
        p.add_eq(Affine::var(v[0]).plus_constant(-1.0));
        let mut b = PsdBlock::new(2);
        b.set(0, 0, Affine::var(v[0]));
        b.set(0, 1, Affine::var(v[1]));
        b.set(1, 1, Affine::constant(1.0));
        p.add_psd(b);
        let mut out = Vec::new();
        write_sdpa(&mut out, &p).unwrap();
        let s = String::from_utf8(out).unwrap();
        let body: Vec<&str> = s.lines().filter(|l| !l.starts_with('*')).collect();
        assert_eq!(body[0], "2");
        assert_eq!(body[1], "2");
        assert_eq!(body[2], "-2 2");
        assert!(body.contains(&"0 2 2 2 -1e0"));
        assert!(body.contains(&"2 2 1 2 1e0"));
    }
}
