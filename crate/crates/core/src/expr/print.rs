use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::{Expr, FuncApp, Rational};

const P_ADD: u8 = 1;
const P_MUL: u8 = 2;
const P_NEG: u8 = 3;
const P_POW: u8 = 4;
const P_ATOM: u8 = 5;

/// Pretty printer for the ASCII grammar. Output parses back to the same tree.
#[derive(Debug, Clone, Default)]
pub struct Printer {
    latex: bool,
}

struct Split {
    negative: bool,
    num: Vec<Expr>,
    den: Vec<Expr>,
    cnum: BigInt,
    cden: BigInt,
}

fn split(e: &Expr) -> Split {
    let (coeff, factors): (Rational, Vec<Expr>) = match e {
        Expr::Num(q) => (q.clone(), Vec::new()),
        Expr::Mul(fs) => match fs.first() {
            Some(Expr::Num(q)) => (q.clone(), fs[1..].to_vec()),
            _ => (Rational::one(), fs.clone()),
        },
        other => (Rational::one(), vec![other.clone()]),
    };
    let mut num = Vec::new();
    let mut den = Vec::new();
    for f in factors {
        match &f {
            Expr::Pow(b, x)
                if matches!(&**x, Expr::Num(q) if q.is_negative()
                    && (!matches!(&**b, Expr::Add(_)) || *q == -Rational::one())) =>
            {
                let k = -(**x).clone();
                den.push(if k.is_one() {
                    (**b).clone()
                } else {
                    Expr::Pow(b.clone(), Box::new(k))
                });
            }
            _ => num.push(f),
        }
    }
    Split {
        negative: coeff.is_negative(),
        num,
        den,
        cnum: coeff.numer().abs(),
        cden: coeff.denom().clone(),
    }
}

impl Printer {
    pub fn latex() -> Self {
        Printer { latex: true }
    }

    pub fn print(&self, e: &Expr) -> String {
        self.go(e, 0)
    }

    fn wrap(&self, s: String, inner: u8, outer: u8) -> String {
        if inner < outer {
            if self.latex {
                format!("\\left({s}\\right)")
            } else {
                format!("({s})")
            }
        } else {
            s
        }
    }

    fn go(&self, e: &Expr, outer: u8) -> String {
        let (s, prec) = self.render(e);
        self.wrap(s, prec, outer)
    }

    fn render(&self, e: &Expr) -> (String, u8) {
        match e {
            Expr::Num(q) => {
                if q.is_integer() {
                    let s = q.numer().to_string();
                    let p = if q.is_negative() { P_NEG } else { P_ATOM };
                    (s, p)
                } else if self.latex {
                    let sign = if q.is_negative() { "-" } else { "" };
                    (
                        format!("{sign}\\frac{{{}}}{{{}}}", q.numer().abs(), q.denom()),
                        P_NEG,
                    )
                } else {
                    (
                        format!("{}/{}", q.numer(), q.denom()),
                        if q.is_negative() { P_NEG } else { P_MUL },
                    )
                }
            }
            Expr::Sym(s) => (self.symbol(s), P_ATOM),
            Expr::Func(fa) => (self.func(fa), P_ATOM),
            Expr::Add(ts) => {
                let mut out = String::new();
                for (i, t) in ts.iter().enumerate() {
                    let neg = t.coefficient().is_negative();
                    let body = if neg { -t.clone() } else { t.clone() };
                    let s = self.go(&body, P_ADD + 1);
                    if i == 0 {
                        if neg {
                            out.push('-');
                        }
                        out.push_str(&s);
                    } else {
                        out.push_str(if neg { " - " } else { " + " });
                        out.push_str(&s);
                    }
                }
                (out, P_ADD)
            }
            Expr::Mul(_) | Expr::Pow(..) => self.product(e),
            Expr::Exp(a) => {
                if self.latex {
                    (format!("e^{{{}}}", self.go(a, 0)), P_POW)
                } else {
                    (format!("exp({})", self.go(a, 0)), P_ATOM)
                }
            }
            Expr::Ln(a) => {
                if self.latex {
                    (format!("\\ln{}", self.wrap(self.go(a, 0), 0, 1)), P_ATOM)
                } else {
                    (format!("ln({})", self.go(a, 0)), P_ATOM)
                }
            }
        }
    }

    fn power(&self, b: &Expr, x: &Expr) -> String {
        let base = self.go(b, P_POW + 1);
        if self.latex {
            format!("{base}^{{{}}}", self.go(x, 0))
        } else {
            let exp = match x {
                Expr::Num(q) if q.is_integer() && !q.is_negative() => q.numer().to_string(),
                Expr::Sym(_) | Expr::Func(_) | Expr::Exp(_) | Expr::Ln(_) => self.go(x, P_ATOM),
                _ => format!("({})", self.go(x, 0)),
            };
            format!("{base}^{exp}")
        }
    }

    fn factor(&self, f: &Expr) -> String {
        match f {
            Expr::Pow(b, x) => {
                let s = self.power(b, x);
                if self.latex {
                    s
                } else {
                    self.wrap(s, P_POW, P_MUL)
                }
            }
            other => self.go(other, P_MUL + 1),
        }
    }

    fn join(&self, coeff: &BigInt, fs: &[Expr]) -> (String, usize) {
        let mut parts = Vec::new();
        if !coeff.is_one() {
            parts.push(coeff.to_string());
        }
        parts.extend(fs.iter().map(|f| self.factor(f)));
        let n = parts.len();
        let sep = if self.latex { " " } else { "*" };
        (
            if parts.is_empty() {
                "1".into()
            } else {
                parts.join(sep)
            },
            n,
        )
    }

    fn product(&self, e: &Expr) -> (String, u8) {
        let sp = split(e);
        let (num, _) = self.join(&sp.cnum, &sp.num);
        let body = if sp.den.is_empty() && sp.cden.is_one() {
            num
        } else {
            let (den, nden) = self.join(&sp.cden, &sp.den);
            if self.latex {
                format!("\\frac{{{num}}}{{{den}}}")
            } else if nden > 1 {
                format!("{num}/({den})")
            } else {
                format!("{num}/{den}")
            }
        };
        if sp.negative {
            (format!("-{body}"), P_NEG)
        } else {
            let single_pow = matches!(e, Expr::Pow(..)) && sp.den.is_empty();
            (body, if single_pow { P_POW } else { P_MUL })
        }
    }

    fn symbol(&self, s: &str) -> String {
        if !self.latex {
            return s.to_string();
        }
        let greek = [
            "alpha", "beta", "gamma", "delta", "epsilon", "eta", "theta", "lambda", "mu", "xi",
            "pi", "sigma", "tau", "phi", "psi", "omega", "zeta",
        ];
        let (head, tail) = match s.split_once('_') {
            Some((h, t)) => (h, Some(t)),
            None => (s, None),
        };
        let mut head = if greek.contains(&head) {
            format!("\\{head}")
        } else {
            head.to_string()
        };
        if let Some(stripped) = head
            .strip_suffix("t")
            .filter(|h| !h.is_empty() && tail.is_none() && s.len() == 2)
        {
            if stripped == "f" || stripped == "g" {
                head = format!("\\tilde{{{stripped}}}");
            }
        }
        if tail.is_none() {
            if let Some(pos) = head.find(|c: char| c.is_ascii_digit()) {
                if !head.starts_with('\\') {
                    return format!("{}_{{{}}}", &head[..pos], &head[pos..]);
                }
            }
        }
        match tail {
            Some(t) => format!("{head}_{{{t}}}"),
            None => head,
        }
    }

    fn func(&self, fa: &FuncApp) -> String {
        let args: Vec<String> = fa.args.iter().map(|a| self.go(a, 0)).collect();
        if self.latex {
            let mut s = self.symbol(&fa.name);
            if !fa.wrt.is_empty() {
                let vars: String = fa.wrt_names().iter().map(|v| v.to_string()).collect();
                s = format!("{s}_{{{vars}}}");
            }
            if !fa.is_standard() {
                s = format!("{s}\\left({}\\right)", args.join(", "));
            }
            return s;
        }
        let head = if fa.wrt.is_empty() {
            fa.name.to_string()
        } else {
            let vars: Vec<String> = fa.wrt_names().iter().map(|v| v.to_string()).collect();
            format!("Diff({},{})", fa.name, vars.join(","))
        };
        if fa.is_standard() {
            head
        } else {
            format!("{head}({})", args.join(","))
        }
    }
}

pub fn to_latex(e: &Expr) -> String {
    Printer::latex().print(e)
}
