use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use matpoisson::poisson::{bracket_polys, is_casimir_with};
use matpoisson::polyalg::{Func, Poly, Shape};
use matpoisson::weyl::{all_reduced_words_with, check_commutativity, kz_hamiltonians_unchecked, longest_element};
use matpoisson::Exec;

const STRATEGIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn word_enumeration(c: &mut Criterion) {
    let mut g = c.benchmark_group("reduced-words-S5");
    g.sample_size(10);
    let w = longest_element(5);
    for (name, exec) in STRATEGIES {
        g.bench_function(name, |b| b.iter(|| all_reduced_words_with(exec, &w).unwrap().len()));
    }
    g.finish();
}

fn kz_commutativity(c: &mut Criterion) {
    let mut g = c.benchmark_group("kz-commutativity-n4");
    g.sample_size(10);
    let words = all_reduced_words_with(Exec::Parallel, &longest_element(4)).unwrap();
    let systems: Vec<_> = words.iter().map(|w| kz_hamiltonians_unchecked(w).unwrap()).collect();
    for (name, exec) in STRATEGIES {
        g.bench_function(name, |b| b.iter(|| systems.iter().all(|s| check_commutativity(exec, s).is_ok())));
    }
    g.finish();
}

fn bracket_table(c: &mut Criterion) {
    let mut g = c.benchmark_group("generator-bracket-table");
    for n in [3usize, 4] {
        let s = Shape::square(n);
        let vars: Vec<Poly> = s.coords().map(|(i, j)| Poly::var(s, i, j).unwrap()).collect();
        let pairs: Vec<(usize, usize)> = (0..vars.len()).flat_map(|a| (0..vars.len()).map(move |b| (a, b))).collect();
        for (name, exec) in STRATEGIES {
            g.bench_with_input(BenchmarkId::new(name, n), &pairs, |b, pairs| {
                b.iter(|| exec.map(pairs, |&(a, c)| bracket_polys(&vars[a], &vars[c]).num_terms()))
            });
        }
    }
    g.finish();
}

fn casimir_check(c: &mut Criterion) {
    let mut g = c.benchmark_group("determinant-casimir-n4");
    g.sample_size(10);
    let s = Shape::square(4);
    let det = matpoisson::poisson::minor(&matpoisson::poisson::MinorSpec::block(1, 1, 4), s).unwrap();
    let f = Func::Poly(det);
    for (name, exec) in STRATEGIES {
        g.bench_function(name, |b| b.iter(|| is_casimir_with(exec, &f).unwrap().is_casimir()));
    }
    g.finish();
}

criterion_group!(benches, word_enumeration, kz_commutativity, bracket_table, casimir_check);
criterion_main!(benches);
