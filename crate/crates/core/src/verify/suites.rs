use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::report::{pass_if, Outcome, Recorder, Status, VerificationReport};
use crate::error::Result;
use crate::flows::{
    conservation_error, cross_validate, discreteness_probe, gz_flow_closed, minor_flow_closed, numeric_flow,
    NumericOptions, PASS_TOL,
};
use crate::gz::{
    center_generators, center_triangularity, gz_system, jacobian_rank, verify_poisson_map, Direction, SubmatrixMap,
};
use crate::par::Exec;
use crate::poisson::{
    bivector_rank, bracket_polys, generic_minor_bracket, is_casimir, minor, minor_bracket, numerically_commute,
    sign_form_bracket, subsets, MinorSpec,
};
use crate::polyalg::{CompiledFunc, Func, MatrixPoint, Poly, Shape};
use crate::sample::{generic_point, random_poly};
use crate::weyl::{all_reduced_words, kz_hamiltonians, longest_element};

/// Verification suites selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Algebra,
    Kz,
    Gz,
    Flows,
    All,
}

impl std::str::FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "algebra" => Suite::Algebra,
            "kz" => Suite::Kz,
            "gz" => Suite::Gz,
            "flows" => Suite::Flows,
            "all" => Suite::All,
            _ => return Err(format!("unknown suite {s:?}; expected algebra, kz, gz, flows or all")),
        })
    }
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Kz => "kz",
            Suite::Gz => "gz",
            Suite::Flows => "flows",
            Suite::All => "all",
        }
    }
}

const RANDOM_CASES: usize = 20;
const NUMERIC_POINTS: usize = 20;

pub fn run_suite(suite: Suite, sizes: &[usize], seed: u64) -> VerificationReport {
    let mut rec = Recorder::new();
    let parts: &[Suite] = match suite {
        Suite::All => &[Suite::Algebra, Suite::Kz, Suite::Gz, Suite::Flows],
        _ => std::slice::from_ref(&suite),
    };
    for &part in parts {
        for &n in sizes {
            match part {
                Suite::Algebra => algebra(&mut rec, n, seed),
                Suite::Kz => kz(&mut rec, n, seed),
                Suite::Gz => gz(&mut rec, n, seed),
                Suite::Flows => flows(&mut rec, n, seed),
                Suite::All => unreachable!(),
            }
        }
    }
    rec.finish(suite.name(), sizes, seed)
}

fn exact_zero_count(name: &str, bad: usize, total: usize) -> Result<Outcome> {
    Ok((pass_if(bad == 0), json!({"cases": total, "nonzero": bad}), Some(0.0), format!("{name}: exact")))
}

fn algebra(rec: &mut Recorder, n: usize, seed: u64) {
    let s = Shape::square(n);
    let exec = Exec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64) << 8);
    let triples: Vec<(Poly, Poly, Poly)> = (0..RANDOM_CASES)
        .map(|_| (random_poly(s, &mut rng, 4, 3), random_poly(s, &mut rng, 4, 2), random_poly(s, &mut rng, 3, 2)))
        .collect();
    rec.check(format!("algebra/antisymmetry n={n}"), || {
        let bad = exec.map(&triples, |(f, g, _)| !(&bracket_polys(f, g) + &bracket_polys(g, f)).is_zero());
        exact_zero_count("{f,g}+{g,f}", bad.iter().filter(|b| **b).count(), triples.len())
    });
    rec.check(format!("algebra/leibniz n={n}"), || {
        let bad = exec.map(&triples, |(f, g, h)| {
            let lhs = bracket_polys(f, &(g * h));
            let rhs = &(&bracket_polys(f, g) * h) + &(g * &bracket_polys(f, h));
            lhs != rhs
        });
        exact_zero_count("{f,gh}-{f,g}h-g{f,h}", bad.iter().filter(|b| **b).count(), triples.len())
    });
    rec.check(format!("algebra/jacobi-generators n={n}"), || {
        if n > 4 {
            return Ok((Status::Skip, json!(null), None, "generator triples only up to n = 4".into()));
        }
        let vars: Vec<Poly> = (0..s.len()).map(|v| Poly::var_idx(s, v)).collect();
        let triples: Vec<(usize, usize, usize)> =
            (0..s.len()).flat_map(|a| (a..s.len()).flat_map(move |b| (b..s.len()).map(move |c| (a, b, c)))).collect();
        let bad = exec.map(&triples, |&(a, b, c)| {
            let (x, y, z) = (&vars[a], &vars[b], &vars[c]);
            let j = &(&bracket_polys(x, &bracket_polys(y, z)) + &bracket_polys(y, &bracket_polys(z, x)))
                + &bracket_polys(z, &bracket_polys(x, y));
            !j.is_zero()
        });
        exact_zero_count("jacobiator", bad.iter().filter(|b| **b).count(), triples.len())
    });
    rec.check(format!("algebra/minor-bracket-formula n={n}"), || {
        let max_r = if n <= 3 { n } else { 2 };
        let specs = MinorSpec::all(s, 1..=max_r);
        let coords: Vec<(usize, usize)> = s.coords().collect();
        let bad = exec.try_map(&specs, |spec| {
            let mut bad = 0;
            for &c in &coords {
                let f = minor_bracket(s, c, spec)?;
                if f != generic_minor_bracket(s, c, spec)? {
                    bad += 1;
                }
                if let Some(l) = sign_form_bracket(s, c, spec)? {
                    if l != f {
                        bad += 1;
                    }
                }
            }
            Ok(bad)
        })?;
        exact_zero_count("closed form vs generic", bad.iter().sum(), specs.len() * coords.len())
    });
    rec.check(format!("algebra/bivector-rank n={n}"), || {
        let x = generic_point(s, &mut rng.clone(), None);
        let r = bivector_rank(&x);
        let want = n * (n - 1);
        Ok((pass_if(r == want), json!(r), None, format!("measured rank, expected n(n-1) = {want}")))
    });
    rec.check(format!("algebra/determinant-casimir n={n}"), || {
        if n > 4 {
            return Ok((Status::Skip, json!(null), None, "exact check only up to n = 4".into()));
        }
        let d = minor(&MinorSpec::block(1, 1, n), s)?;
        let c = is_casimir(&Func::Poly(d))?;
        Ok((pass_if(c.is_casimir()), json!(c.is_casimir()), None, "exact".into()))
    });
}

fn kz(rec: &mut Recorder, n: usize, seed: u64) {
    let exec = Exec::default();
    rec.check(format!("kz/commutativity n={n}"), || {
        if !(2..=5).contains(&n) {
            return Ok((Status::Skip, json!(null), None, "words enumerated for 2 ≤ n ≤ 5".into()));
        }
        let words = all_reduced_words(&longest_element(n))?;
        let res = exec.map(&words, |w| kz_hamiltonians(w).err().map(|e| format!("{w}: {e}")));
        let errs: Vec<String> = res.into_iter().flatten().collect();
        let mode = if n <= 4 { "exact" } else { "numeric 1e-10" };
        Ok((pass_if(errs.is_empty()), json!({"words": words.len(), "failures": errs}), None, mode.into()))
    });
    rec.check(format!("kz/independence n={n}"), || {
        if !(2..=5).contains(&n) {
            return Ok((Status::Skip, json!(null), None, "words enumerated for 2 ≤ n ≤ 5".into()));
        }
        let words = all_reduced_words(&longest_element(n))?;
        let x = generic_point(Shape::square(n), &mut ChaCha8Rng::seed_from_u64(seed), None);
        let want = n * (n - 1) / 2;
        let sample: Vec<_> = words.iter().step_by(words.len().div_ceil(16)).cloned().collect();
        let ranks =
            exec.try_map(&sample, |w| jacobian_rank(&crate::weyl::kz_hamiltonians_unchecked(w)?.funcs(), &x))?;
        let ok = ranks.iter().all(|&r| r == want);
        Ok((pass_if(ok), json!(ranks), None, format!("Jacobian rank, family size {want}")))
    });
}

fn gz(rec: &mut Recorder, n: usize, seed: u64) {
    let exec = Exec::default();
    let s = Shape::square(n);
    rec.check(format!("gz/poisson-maps n={n}"), || {
        if n > 4 {
            return Ok((Status::Skip, json!(null), None, "ambient shapes up to 4×4".into()));
        }
        let mut maps = Vec::new();
        for r in 1..=n {
            for c in 1..=n {
                for rows in subsets(n, r) {
                    for cols in subsets(n, c) {
                        for d in [Direction::Project, Direction::Embed] {
                            maps.push(SubmatrixMap::new(s, rows.clone(), cols.clone(), d)?);
                        }
                    }
                }
            }
        }
        let bad = exec.map(&maps, |m| verify_poisson_map(m).is_some()).into_iter().filter(|b| *b).count();
        exact_zero_count("pullback intertwines brackets", bad, maps.len())
    });
    rec.check(format!("gz/center-casimirs n={n}"), || {
        let gens = center_generators(n);
        if n <= 3 {
            let bad = exec.try_map(&gens, |g| is_casimir(g).map(|c| !c.is_casimir()))?;
            return exact_zero_count("{x_ij, c} = 0", bad.iter().filter(|b| **b).count(), gens.len());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<MatrixPoint> = (0..NUMERIC_POINTS).map(|_| generic_point(s, &mut rng, None)).collect();
        let coords: Vec<CompiledFunc> =
            (0..s.len()).map(|v| CompiledFunc::new(&Func::Poly(Poly::var_idx(s, v)))).collect();
        let bad = exec.try_map(&gens, |g| {
            let cg = CompiledFunc::new(g);
            let mut bad = 0;
            for x in &pts {
                for cx in &coords {
                    if !numerically_commute(cx, &cg, s, x.entries())? {
                        bad += 1;
                    }
                }
            }
            Ok(bad)
        })?;
        let total = gens.len() * pts.len() * coords.len();
        Ok((
            pass_if(bad.iter().sum::<usize>() == 0),
            json!({"cases": total, "nonzero": bad.iter().sum::<usize>()}),
            Some(1e-10),
            "relative".into(),
        ))
    });
    rec.check(format!("gz/center-triangularity n={n}"), || {
        let ok = center_triangularity(n, seed)?;
        Ok((pass_if(ok), json!(ok), None, "first-row pattern with nonzero pivots".into()))
    });
    rec.check(format!("gz/family-commutativity n={n}"), || {
        let sys = gz_system(n, None)?;
        sys.check_commutativity(exec, NUMERIC_POINTS, seed)?;
        let mode = if n <= 3 { "exact" } else { "numeric 1e-10" };
        Ok((Status::Pass, json!(sys.hams.len()), None, mode.into()))
    });
    rec.check(format!("gz/jacobian-rank n={n}"), || {
        let sys = gz_system(n, None)?;
        let x = generic_point(s, &mut ChaCha8Rng::seed_from_u64(seed), Some(&sys.singular_locus()));
        let r = jacobian_rank(&sys.hams, &x)?;
        let dups = (0..sys.hams.len()).filter(|&i| sys.hams[..i].contains(&sys.hams[i])).count();
        let want = sys.hams.len() - dups;
        Ok((
            pass_if(r == want),
            json!({"rank": r, "family": sys.hams.len(), "duplicates": dups}),
            None,
            "numeric rank".into(),
        ))
    });
}

fn flows(rec: &mut Recorder, n: usize, seed: u64) {
    let exec = Exec::default();
    let s = Shape::square(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x0 = generic_point(s, &mut rng, None);
    let specs: Vec<MinorSpec> =
        MinorSpec::all(s, 1..=n.min(2)).into_iter().chain([MinorSpec::block(1, 1, n)]).collect();
    rec.check(format!("flows/minor-closed-vs-numeric n={n}"), || {
        let devs = exec.try_map(&specs, |spec| {
            let closed = minor_flow_closed(spec, &x0)?;
            let tr = numeric_flow(&closed.h, &x0, &NumericOptions::new(0.3, 1.0))?;
            Ok(cross_validate(&closed, &tr).max_deviation)
        })?;
        let worst = devs.iter().cloned().fold(0.0, f64::max);
        Ok((pass_if(worst < PASS_TOL), json!(worst), Some(PASS_TOL), format!("{} minors, |t| ≤ 1", specs.len())))
    });
    rec.check(format!("flows/minor-degree-bounds n={n}"), || {
        let bad = exec.try_map(&specs, |spec| {
            let (p, e) = minor_flow_closed(spec, &x0)?.degrees();
            let r = spec.size();
            Ok(p.unwrap_or(0) > 2 * r - 1 || e.unwrap_or(0) > 2 * r - 2)
        })?;
        exact_zero_count("deg p ≤ 2r-1, deg p_a ≤ 2r-2", bad.iter().filter(|b| **b).count(), specs.len())
    });
    rec.check(format!("flows/minor-conservation n={n}"), || {
        let times = [Complex64::new(1.5, 0.0), Complex64::new(0.0, -2.0), Complex64::new(-1.0, 1.0)];
        let errs = exec.try_map(&specs, |spec| {
            let f = minor_flow_closed(spec, &x0)?;
            let pts: Vec<MatrixPoint> = times.iter().map(|&t| f.eval(t)).collect();
            conservation_error(std::slice::from_ref(&f.h), &x0, &pts)
        })?;
        let worst = errs.iter().cloned().fold(0.0, f64::max);
        Ok((pass_if(worst < 1e-8), json!(worst), Some(1e-8), "relative".into()))
    });
    let Ok(sys) = gz_system(n, None) else { return };
    let locus = sys.singular_locus();
    let gx = generic_point(s, &mut rng, Some(&locus));
    let idx: Vec<usize> = (0..sys.hams.len()).collect();
    rec.check(format!("flows/gz-closed-vs-numeric n={n}"), || {
        let devs = exec.try_map(&idx, |&i| {
            let closed = gz_flow_closed(&sys, i, &gx)?;
            let tr = numeric_flow(&sys.hams[i], &gx, &NumericOptions::new(0.2, 0.5).with_locus(locus.clone()))?;
            Ok(cross_validate(&closed, &tr).max_deviation)
        })?;
        let worst = devs.iter().cloned().fold(0.0, f64::max);
        Ok((pass_if(worst < PASS_TOL), json!(worst), Some(PASS_TOL), "|t| ≤ 0.5".into()))
    });
    rec.check(format!("flows/gz-entry-shape n={n}"), || {
        let bad = exec.try_map(&idx, |&i| {
            let (p, e) = gz_flow_closed(&sys, i, &gx)?.degrees();
            Ok(p.unwrap_or(0) > 2 || e.unwrap_or(0) > 1)
        })?;
        exact_zero_count(
            "tail degree ≤ 2, exponential coefficients affine",
            bad.iter().filter(|b| **b).count(),
            idx.len(),
        )
    });
    rec.check(format!("flows/gz-family-conservation n={n}"), || {
        let times = [Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.7), Complex64::new(-0.4, -0.3)];
        let errs = exec.try_map(&idx, |&i| {
            let f = gz_flow_closed(&sys, i, &gx)?;
            let pts: Vec<MatrixPoint> = times.iter().map(|&t| f.eval(t)).collect();
            conservation_error(&sys.hams, &gx, &pts)
        })?;
        let worst = errs.iter().cloned().fold(0.0, f64::max);
        Ok((pass_if(worst < 1e-8), json!(worst), Some(1e-8), "every family member along every flow".into()))
    });
    rec.check(format!("flows/discreteness n={n}"), || {
        let reps = exec.try_map(&idx, |&i| Ok(discreteness_probe(&gz_flow_closed(&sys, i, &gx)?, &locus, 5.0, 60)))?;
        let zeros: usize = reps.iter().flat_map(|r| &r.denominators).map(|d| d.zeros.len()).sum();
        let ok = reps.iter().all(|r| r.pass());
        Ok((pass_if(ok), json!({"zeros_found": zeros}), Some(1e-3), "isolated zeros in |t| ≤ 5".into()))
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass_and_are_reproducible() {
        let a = run_suite(Suite::All, &[2, 3], 42);
        assert!(a.all_pass(), "{}", a.table());
        let b = run_suite(Suite::All, &[2, 3], 42);
        assert_eq!(a.reproducible_json().to_string(), b.reproducible_json().to_string());
        assert!(a.to_json().get("stamp").is_some());
    }

    #[test]
    fn suite_names() {
        assert_eq!("gz".parse::<Suite>().unwrap(), Suite::Gz);
        assert!("bogus".parse::<Suite>().is_err());
    }
}
