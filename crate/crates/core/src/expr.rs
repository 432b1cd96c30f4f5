//! Scalar expressions in one variable `t`, used for the fractional-part
//! sequences. Integer literals are read as floats so `t/2` and `1/3` divide
//! exactly as written.

use evalexpr::{
    build_operator_tree, ContextWithMutableFunctions, ContextWithMutableVariables,
    DefaultNumericTypes, EvalexprError, Function, HashMapContext, Node, Value,
};

use crate::error::{Error, Result};

type Ctx = HashMapContext<DefaultNumericTypes>;
type Builtin = (&'static str, fn(f64) -> f64);

#[derive(Debug, Clone)]
pub struct Expr {
    source: String,
    tree: Node<DefaultNumericTypes>,
}

fn float_literals(src: &str) -> String {
    let chars: Vec<char> = src.chars().collect();
    let mut out = String::with_capacity(src.len() + 8);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let prev_ident = i > 0 && (chars[i - 1].is_alphanumeric() || chars[i - 1] == '_' || chars[i - 1] == '.');
        if c.is_ascii_digit() && !prev_ident {
            let start = i;
            let digits = |i: &mut usize| {
                while *i < chars.len() && chars[*i].is_ascii_digit() {
                    *i += 1;
                }
            };
            digits(&mut i);
            let mut is_float = false;
            if chars.get(i) == Some(&'.') {
                is_float = true;
                i += 1;
                digits(&mut i);
            }
            if matches!(chars.get(i), Some('e') | Some('E')) {
                let mut j = i + 1;
                if matches!(chars.get(j), Some('+') | Some('-')) {
                    j += 1;
                }
                if chars.get(j).is_some_and(|c| c.is_ascii_digit()) {
                    is_float = true;
                    i = j;
                    digits(&mut i);
                }
            }
            out.extend(&chars[start..i]);
            if !is_float {
                out.push_str(".0");
            }
            continue;
        }
        out.push(c);
        i += 1;
    }
    out
}

fn unary(f: fn(f64) -> f64) -> Function<DefaultNumericTypes> {
    Function::new(move |v: &Value<DefaultNumericTypes>| Ok(Value::Float(f(v.as_number()?))))
}

fn context() -> Ctx {
    let mut ctx = Ctx::new();
    let fns: [Builtin; 8] = [
        ("sin", f64::sin),
        ("cos", f64::cos),
        ("tan", f64::tan),
        ("exp", f64::exp),
        ("ln", f64::ln),
        ("sqrt", f64::sqrt),
        ("abs", f64::abs),
        ("frac", |x| x - x.floor()),
    ];
    for (name, f) in fns {
        ctx.set_function(name.into(), unary(f)).expect("fresh context accepts functions");
    }
    ctx.set_value("pi".into(), Value::Float(std::f64::consts::PI))
        .expect("fresh context accepts values");
    ctx
}

fn describe(e: EvalexprError<DefaultNumericTypes>) -> String {
    e.to_string()
}

impl Expr {
    /// Parses and probes the expression at `t = 0.5`.
    pub fn parse(source: &str) -> Result<Self> {
        let tree = build_operator_tree::<DefaultNumericTypes>(&float_literals(source))
            .map_err(|e| Error::Input(format!("cannot parse expression '{source}': {}", describe(e))))?;
        let expr = Expr {
            source: source.to_string(),
            tree,
        };
        let mut ctx = context();
        expr.eval_in(&mut ctx, 0.5)?;
        Ok(expr)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    fn eval_in(&self, ctx: &mut Ctx, t: f64) -> Result<f64> {
        ctx.set_value("t".into(), Value::Float(t))
            .map_err(|e| Error::Input(describe(e)))?;
        self.tree
            .eval_number_with_context(ctx)
            .map_err(|e| Error::Input(format!("cannot evaluate '{}' at t = {t}: {}", self.source, describe(e))))
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        self.eval_in(&mut context(), t)
    }

    /// Evaluator reusing one context; evaluation failures map to NaN.
    pub fn evaluator(&self) -> impl FnMut(f64) -> f64 + '_ {
        let mut ctx = context();
        move |t| self.eval_in(&mut ctx, t).unwrap_or(f64::NAN)
    }
}
