//! Smart constructors. Each returns a normalized tree given normalized inputs.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Expr, Rational};

/// Largest positive integer power of a sum that is expanded.
const MAX_EXPAND: i64 = 8;
/// Integers up to this bound are split into primes under `ln`.
const LN_FACTOR_LIMIT: u64 = 1_000_000;

fn split_term(term: Expr) -> (Rational, Option<Expr>) {
    match term {
        Expr::Num(q) => (q, None),
        Expr::Mul(mut fs) => {
            if let Some(Expr::Num(_)) = fs.first() {
                let Expr::Num(q) = fs.remove(0) else {
                    unreachable!()
                };
                let rest = if fs.len() == 1 {
                    fs.pop().unwrap()
                } else {
                    Expr::Mul(fs)
                };
                (q, Some(rest))
            } else {
                (Rational::one(), Some(Expr::Mul(fs)))
            }
        }
        other => (Rational::one(), Some(other)),
    }
}

fn scale_term(c: Rational, rest: Expr) -> Expr {
    if c.is_one() {
        return rest;
    }
    let mut fs = vec![Expr::Num(c)];
    match rest {
        Expr::Mul(inner) => fs.extend(inner),
        other => fs.push(other),
    }
    Expr::Mul(fs)
}

fn base_exponent(e: Expr) -> (Expr, Expr) {
    match e {
        Expr::Pow(b, x) => (*b, *x),
        other => (other, Expr::one()),
    }
}

fn reciprocal_count(e: &Expr) -> usize {
    e.terms()
        .iter()
        .flat_map(|t| t.factors())
        .filter(|f| matches!(f, Expr::Pow(_, x) if x.coefficient().is_negative()))
        .count()
}

fn is_positive_integer(e: &Expr) -> Option<i64> {
    match e {
        Expr::Num(q) if q.is_integer() && q.is_positive() => q.to_integer().to_i64(),
        _ => None,
    }
}

/// Exact `q`-th root of a nonnegative integer if it exists.
fn exact_root(n: &BigInt, q: u32) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.nth_root(q);
    (num_traits::pow(r.clone(), q as usize) == *n).then_some(r)
}

fn small_factorization(n: &BigInt) -> Option<Vec<(u64, u32)>> {
    let mut m = n.to_u64().filter(|&m| (2..=LN_FACTOR_LIMIT).contains(&m))?;
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= m {
        let mut k = 0;
        while m % p == 0 {
            m /= p;
            k += 1;
        }
        if k > 0 {
            out.push((p, k));
        }
        p += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    Some(out)
}

/// Positive rational content of a sum: gcd of numerators over lcm of denominators.
fn content(terms: &[Expr]) -> Rational {
    let mut g = BigInt::zero();
    let mut l = BigInt::one();
    for t in terms {
        let c = t.coefficient();
        g = g.gcd(c.numer());
        l = l.lcm(c.denom());
    }
    if g.is_zero() {
        Rational::one()
    } else {
        Rational::new(g, l)
    }
}

impl Expr {
    pub fn add(terms: Vec<Expr>) -> Expr {
        let mut constant = Rational::zero();
        let mut acc: BTreeMap<Expr, Rational> = BTreeMap::new();
        let mut stack = terms;
        while let Some(t) = stack.pop() {
            match t {
                Expr::Add(inner) => stack.extend(inner),
                t => match split_term(t) {
                    (c, None) => constant += c,
                    (c, Some(rest)) => *acc.entry(rest).or_insert_with(Rational::zero) += c,
                },
            }
        }
        let mut out = Vec::with_capacity(acc.len() + 1);
        if !constant.is_zero() {
            out.push(Expr::Num(constant));
        }
        for (rest, c) in acc {
            if !c.is_zero() {
                out.push(scale_term(c, rest));
            }
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::Add(out),
        }
    }

    pub fn mul(factors: Vec<Expr>) -> Expr {
        let mut coeff = Rational::one();
        let mut bases: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
        let mut exp_args: Vec<Expr> = Vec::new();
        let mut stack = factors;
        while let Some(f) = stack.pop() {
            match f {
                Expr::Num(q) => {
                    if q.is_zero() {
                        return Expr::zero();
                    }
                    coeff *= q;
                }
                Expr::Mul(inner) => stack.extend(inner),
                Expr::Exp(a) => exp_args.push(*a),
                f => {
                    let (b, e) = base_exponent(f);
                    bases.entry(b).or_default().push(e);
                }
            }
        }

        let mut rebuilt: Vec<Expr> = Vec::new();
        let mut needs_pass = false;
        if !exp_args.is_empty() {
            let e = Expr::exp(Expr::add(exp_args));
            needs_pass |= !matches!(e, Expr::Exp(_));
            rebuilt.push(e);
        }
        for (b, es) in bases {
            let single = es.len() == 1;
            let exponent = if single {
                es.into_iter().next().unwrap()
            } else {
                Expr::add(es)
            };
            let p = if single && exponent.is_one() {
                b
            } else {
                Expr::pow(b, exponent)
            };
            match &p {
                Expr::Num(_) | Expr::Mul(_) | Expr::Exp(_) => needs_pass = true,
                Expr::Pow(..) | Expr::Add(_) => {}
                _ => {}
            }
            rebuilt.push(p);
        }
        if needs_pass {
            rebuilt.push(Expr::Num(coeff));
            return Expr::mul(rebuilt);
        }

        let (mut sums, mut plain): (Vec<Expr>, Vec<Expr>) =
            rebuilt.into_iter().partition(|f| matches!(f, Expr::Add(_)));
        // Distribute the sum carrying the most reciprocal factors first so that
        // those reciprocals meet the remaining factors before expansion.
        let pick = (0..sums.len()).max_by_key(|&i| reciprocal_count(&sums[i]));
        if let Some(Expr::Add(ts)) = pick.map(|i| sums.remove(i)) {
            plain.extend(sums);
            plain.push(Expr::Num(coeff));
            return Expr::add(
                ts.into_iter()
                    .map(|t| {
                        let mut fs = plain.clone();
                        fs.push(t);
                        Expr::mul(fs)
                    })
                    .collect(),
            );
        }

        plain.sort();
        if plain.is_empty() {
            return Expr::Num(coeff);
        }
        if coeff.is_one() && plain.len() == 1 {
            return plain.pop().unwrap();
        }
        if !coeff.is_one() {
            plain.insert(0, Expr::Num(coeff));
        }
        Expr::Mul(plain)
    }

    pub fn pow(base: Expr, exponent: Expr) -> Expr {
        if exponent.is_zero() || base.is_one() {
            return Expr::one();
        }
        if exponent.is_one() {
            return base;
        }
        match (base, exponent) {
            (Expr::Num(b), Expr::Num(e)) => num_pow(b, e),
            (Expr::Num(b), e) if b.is_zero() => Expr::Pow(Box::new(Expr::Num(b)), Box::new(e)),
            (Expr::Pow(b, e1), e2) => Expr::pow(*b, Expr::mul(vec![*e1, e2])),
            (Expr::Mul(fs), e) => {
                Expr::mul(fs.into_iter().map(|f| Expr::pow(f, e.clone())).collect())
            }
            (Expr::Exp(a), e) => Expr::exp(Expr::mul(vec![*a, e])),
            (Expr::Add(ts), e) => {
                if let Some(n) = is_positive_integer(&e).filter(|&n| n <= MAX_EXPAND) {
                    let mut acc = ts.clone();
                    for _ in 1..n {
                        acc = acc
                            .iter()
                            .flat_map(|a| {
                                ts.iter()
                                    .map(move |t| Expr::mul(vec![a.clone(), t.clone()]))
                            })
                            .collect();
                        acc = Expr::add(acc).terms();
                    }
                    return Expr::add(acc);
                }
                let mut c = content(&ts);
                let integral = matches!(&e, Expr::Num(q) if q.is_integer());
                if integral && ts[0].coefficient().is_negative() {
                    c = -c;
                }
                if c.is_one() {
                    return Expr::Pow(Box::new(Expr::Add(ts)), Box::new(e));
                }
                let inv = Expr::Num(c.recip());
                let inner = Expr::add(
                    ts.into_iter()
                        .map(|t| Expr::mul(vec![t, inv.clone()]))
                        .collect(),
                );
                Expr::mul(vec![
                    Expr::pow(Expr::Num(c), e.clone()),
                    Expr::Pow(Box::new(inner), Box::new(e)),
                ])
            }
            (b, e) => Expr::Pow(Box::new(b), Box::new(e)),
        }
    }

    pub fn exp(arg: Expr) -> Expr {
        if arg.is_zero() {
            return Expr::one();
        }
        let mut kept = Vec::new();
        let mut powers = Vec::new();
        for t in arg.terms() {
            let (c, rest) = split_term(t.clone());
            let fs = rest.map(|r| r.factors()).unwrap_or_default();
            let logs: Vec<usize> = (0..fs.len())
                .filter(|&i| matches!(fs[i], Expr::Ln(_)))
                .collect();
            if logs.len() == 1 {
                let mut fs = fs;
                let Expr::Ln(b) = fs.remove(logs[0]) else {
                    unreachable!()
                };
                fs.push(Expr::Num(c));
                powers.push(Expr::pow(*b, Expr::mul(fs)));
            } else {
                kept.push(t);
            }
        }
        if powers.is_empty() {
            return Expr::Exp(Box::new(arg));
        }
        let rest = Expr::add(kept);
        if !rest.is_zero() {
            powers.push(Expr::Exp(Box::new(rest)));
        }
        Expr::mul(powers)
    }

    pub fn ln(arg: Expr) -> Expr {
        match arg {
            Expr::Num(q) if q.is_one() => Expr::zero(),
            Expr::Num(q) if q.is_positive() => {
                let mut parts = Vec::new();
                for (n, sign) in [(q.numer().clone(), 1i64), (q.denom().clone(), -1i64)] {
                    if n.is_one() {
                        continue;
                    }
                    match small_factorization(&n) {
                        Some(fs) => {
                            for (p, k) in fs {
                                parts.push(Expr::mul(vec![
                                    Expr::int(sign * k as i64),
                                    Expr::Ln(Box::new(Expr::Num(Rational::from_integer(
                                        BigInt::from(p),
                                    )))),
                                ]));
                            }
                        }
                        None => parts.push(Expr::mul(vec![
                            Expr::int(sign),
                            Expr::Ln(Box::new(Expr::Num(Rational::from_integer(n)))),
                        ])),
                    }
                }
                Expr::add(parts)
            }
            Expr::Exp(a) => *a,
            Expr::Pow(b, e) => Expr::mul(vec![*e, Expr::ln(*b)]),
            Expr::Mul(fs)
                if fs
                    .first()
                    .map(|f| f.coefficient().is_positive())
                    .unwrap_or(false) =>
            {
                Expr::add(fs.into_iter().map(Expr::ln).collect())
            }
            other => Expr::Ln(Box::new(other)),
        }
    }
}

fn num_pow(b: Rational, e: Rational) -> Expr {
    if e.is_integer() {
        let n = e.to_integer();
        if b.is_zero() {
            return if n.is_positive() {
                Expr::zero()
            } else {
                Expr::Pow(Box::new(Expr::Num(b)), Box::new(Expr::Num(e)))
            };
        }
        let k = n.abs().to_u32().expect("exponent too large");
        let p = num_traits::pow(b, k as usize);
        return Expr::Num(if n.is_negative() { p.recip() } else { p });
    }
    if b.is_negative() || b.is_zero() {
        return Expr::Pow(Box::new(Expr::Num(b)), Box::new(Expr::Num(e)));
    }
    // b^(n + r/q) with 0 < r/q < 1
    let whole = e.floor();
    let frac = &e - &whole;
    let lead = num_pow(b.clone(), whole);
    let q = frac.denom().to_u32();
    let root = q.and_then(|q| Some((exact_root(b.numer(), q)?, exact_root(b.denom(), q)?)));
    let tail = match root {
        Some((rn, rd)) => num_pow(
            Rational::new(rn, rd),
            Rational::from_integer(frac.numer().clone()),
        ),
        None => Expr::Pow(Box::new(Expr::Num(b)), Box::new(Expr::Num(frac))),
    };
    // Built directly: going through `mul` would re-enter this function.
    match (lead, tail) {
        (Expr::Num(l), Expr::Num(t)) => Expr::Num(l * t),
        (Expr::Num(l), t) if l.is_one() => t,
        (l, t) => Expr::Mul(vec![l, t]),
    }
}
