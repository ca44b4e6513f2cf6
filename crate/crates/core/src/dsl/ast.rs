use crate::prob::Rational;

/// Abstract syntax of predicates and programs.
///
/// `If` and `While` are surface sugar removed by [`Program::desugar`];
/// `BoundedStar` only appears after the approximant transformation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Program {
    Drop,
    Skip,
    Test(String, u64),
    Neg(Box<Program>),
    Mod(String, u64),
    Dup,
    Par(Box<Program>, Box<Program>),
    Seq(Box<Program>, Box<Program>),
    Choice(Rational, Box<Program>, Box<Program>),
    Star(Box<Program>),
    BoundedStar(u32, Box<Program>),
    If(Box<Program>, Box<Program>, Box<Program>),
    While(Box<Program>, Box<Program>),
}

impl Program {
    pub fn test(field: &str, value: u64) -> Program {
        Program::Test(field.to_string(), value)
    }

    pub fn modify(field: &str, value: u64) -> Program {
        Program::Mod(field.to_string(), value)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(p: Program) -> Program {
        Program::Neg(Box::new(p))
    }

    pub fn par(p: Program, q: Program) -> Program {
        Program::Par(Box::new(p), Box::new(q))
    }

    pub fn seq(p: Program, q: Program) -> Program {
        Program::Seq(Box::new(p), Box::new(q))
    }

    pub fn choice(r: Rational, p: Program, q: Program) -> Program {
        Program::Choice(r, Box::new(p), Box::new(q))
    }

    pub fn star(p: Program) -> Program {
        Program::Star(Box::new(p))
    }

    pub fn bounded_star(n: u32, p: Program) -> Program {
        Program::BoundedStar(n, Box::new(p))
    }

    pub fn ite(cond: Program, then: Program, otherwise: Program) -> Program {
        Program::If(Box::new(cond), Box::new(then), Box::new(otherwise))
    }

    pub fn while_do(cond: Program, body: Program) -> Program {
        Program::While(Box::new(cond), Box::new(body))
    }

    /// Left-nested sequence of `ps`; `skip` when empty.
    pub fn seq_all(ps: impl IntoIterator<Item = Program>) -> Program {
        ps.into_iter().reduce(Program::seq).unwrap_or(Program::Skip)
    }

    /// Left-nested parallel composition of `ps`; `drop` when empty.
    pub fn par_all(ps: impl IntoIterator<Item = Program>) -> Program {
        ps.into_iter().reduce(Program::par).unwrap_or(Program::Drop)
    }

    /// Replaces conditionals and loops by their core encodings:
    /// `if a then p else q ↦ a;p & ¬a;q` and `while a do p ↦ (a;p)*;¬a`.
    pub fn desugar(&self) -> Program {
        use Program::*;
        match self {
            Drop | Skip | Dup | Test(..) | Mod(..) => self.clone(),
            Neg(p) => Program::neg(p.desugar()),
            Par(p, q) => Program::par(p.desugar(), q.desugar()),
            Seq(p, q) => Program::seq(p.desugar(), q.desugar()),
            Choice(r, p, q) => Program::choice(r.clone(), p.desugar(), q.desugar()),
            Star(p) => Program::star(p.desugar()),
            BoundedStar(n, p) => Program::bounded_star(*n, p.desugar()),
            If(a, p, q) => {
                let a = a.desugar();
                Program::par(
                    Program::seq(a.clone(), p.desugar()),
                    Program::seq(Program::neg(a), q.desugar()),
                )
            }
            While(a, p) => {
                let a = a.desugar();
                Program::seq(
                    Program::star(Program::seq(a.clone(), p.desugar())),
                    Program::neg(a),
                )
            }
        }
    }

    /// Whether the term contains any node satisfying `pred`.
    pub fn any_node(&self, pred: &impl Fn(&Program) -> bool) -> bool {
        use Program::*;
        if pred(self) {
            return true;
        }
        match self {
            Drop | Skip | Dup | Test(..) | Mod(..) => false,
            Neg(p) | Star(p) | BoundedStar(_, p) => p.any_node(pred),
            Par(p, q) | Seq(p, q) | Choice(_, p, q) | While(p, q) => p.any_node(pred) || q.any_node(pred),
            If(a, p, q) => a.any_node(pred) || p.any_node(pred) || q.any_node(pred),
        }
    }

    pub fn is_star_free(&self) -> bool {
        !self.any_node(&|p| matches!(p, Program::Star(_) | Program::While(..)))
    }

    pub fn is_choice_free(&self) -> bool {
        !self.any_node(&|p| matches!(p, Program::Choice(..)))
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        use Program::*;
        1 + match self {
            Drop | Skip | Dup | Test(..) | Mod(..) => 0,
            Neg(p) | Star(p) | BoundedStar(_, p) => p.size(),
            Par(p, q) | Seq(p, q) | Choice(_, p, q) | While(p, q) => p.size() + q.size(),
            If(a, p, q) => a.size() + p.size() + q.size(),
        }
    }
}
