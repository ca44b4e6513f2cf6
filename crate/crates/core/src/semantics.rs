//! The denotational interpreter: programs as Markov kernels from history
//! sets to finite distributions over history sets.
//!
//! Programs are compiled against a [`FieldSchema`] into a flat node arena.
//! Choice-free subterms are deterministic and run as plain set functions;
//! everything else runs in the probability monad. Bounded iteration
//! `p^(k)` is unrolled as `skip & p;p^(k-1)` with a memo table keyed on
//! `(node, k, input set)`, shared by all worker threads of one evaluation.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::Mutex;

use rayon::prelude::*;

use crate::dsl::{pretty, typecheck, Kind, Program};
use crate::error::{Error, KindError, Result};
use crate::model::{FieldSchema, HistSet, History};
use crate::prob::{Dist, Rational, Weight};

/// The `n`-th approximant: every `q*` becomes `([q]_n)^(n)`; all other
/// constructors are mapped structurally.
pub fn approximant(p: &Program, n: u32) -> Program {
    use Program::*;
    match p {
        Drop | Skip | Dup | Test(..) | Mod(..) => p.clone(),
        Neg(q) => Program::neg(approximant(q, n)),
        Par(a, b) => Program::par(approximant(a, n), approximant(b, n)),
        Seq(a, b) => Program::seq(approximant(a, n), approximant(b, n)),
        Choice(r, a, b) => Program::choice(r.clone(), approximant(a, n), approximant(b, n)),
        Star(q) => Program::bounded_star(n, approximant(q, n)),
        BoundedStar(k, q) => Program::bounded_star(*k, approximant(q, n)),
        If(a, b, c) => Program::ite(approximant(a, n), approximant(b, n), approximant(c, n)),
        While(..) => approximant(&p.desugar(), n),
    }
}

/// `⟦p⟧(a)` in exact arithmetic.
pub fn eval(schema: &FieldSchema, p: &Program, a: &HistSet) -> Result<Dist> {
    Ok(Compiled::new(schema, p)?.eval(a))
}

/// `μ >>= ⟦p⟧`.
pub fn eval_dist<W: Weight>(schema: &FieldSchema, p: &Program, mu: &Dist<W>) -> Result<Dist<W>> {
    Ok(Compiled::new(schema, p)?.eval_dist(mu))
}

#[derive(Debug, Clone)]
enum Node {
    Drop,
    Skip,
    Test(usize, u32),
    Neg(usize),
    Mod(usize, u32),
    Dup,
    Par(usize, usize),
    Seq(usize, usize),
    Choice(Rational, usize, usize),
    Iter(u32, usize),
}

/// A program resolved against a schema, ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Compiled {
    nodes: Vec<Node>,
    deterministic: Vec<bool>,
    root: usize,
}

impl Compiled {
    /// Desugars, typechecks and resolves field names. Fails on unbounded
    /// iteration, unknown fields and out-of-range values.
    pub fn new(schema: &FieldSchema, p: &Program) -> Result<Self> {
        typecheck(p)?;
        let p = p.desugar();
        let mut c = Compiled {
            nodes: Vec::with_capacity(p.size()),
            deterministic: Vec::with_capacity(p.size()),
            root: 0,
        };
        c.root = c.compile(schema, &p)?;
        Ok(c)
    }

    fn push(&mut self, node: Node) -> usize {
        let det = match &node {
            Node::Choice(..) => false,
            Node::Neg(a) | Node::Iter(_, a) => self.deterministic[*a],
            Node::Par(a, b) | Node::Seq(a, b) => self.deterministic[*a] && self.deterministic[*b],
            _ => true,
        };
        self.nodes.push(node);
        self.deterministic.push(det);
        self.nodes.len() - 1
    }

    fn compile(&mut self, schema: &FieldSchema, p: &Program) -> Result<usize> {
        use Program::*;
        let node = match p {
            Drop => Node::Drop,
            Skip => Node::Skip,
            Dup => Node::Dup,
            Test(f, n) => {
                let (i, v) = schema.resolve(f, *n)?;
                Node::Test(i, v)
            }
            Mod(f, n) => {
                let (i, v) = schema.resolve(f, *n)?;
                Node::Mod(i, v)
            }
            Neg(q) => Node::Neg(self.compile(schema, q)?),
            Par(a, b) => {
                let a = self.compile(schema, a)?;
                Node::Par(a, self.compile(schema, b)?)
            }
            Seq(a, b) => {
                let a = self.compile(schema, a)?;
                Node::Seq(a, self.compile(schema, b)?)
            }
            Choice(r, a, b) => {
                let a = self.compile(schema, a)?;
                Node::Choice(r.clone(), a, self.compile(schema, b)?)
            }
            BoundedStar(k, q) => Node::Iter(*k, self.compile(schema, q)?),
            Star(_) => return Err(Error::ApproximationRequired(pretty(p))),
            If(..) | While(..) => return self.compile(schema, &p.desugar()),
        };
        Ok(self.push(node))
    }

    /// Whether the whole program is choice-free, so that every input is
    /// mapped to a point mass.
    pub fn is_deterministic(&self) -> bool {
        self.deterministic[self.root]
    }

    /// The output set of a choice-free program.
    pub fn apply_deterministic(&self, a: &HistSet) -> Option<HistSet> {
        self.is_deterministic().then(|| self.det(self.root, a))
    }

    /// `⟦p⟧(a)`.
    pub fn eval<W: Weight>(&self, a: &HistSet) -> Dist<W> {
        Interp::new(self).eval(self.root, a)
    }

    /// `μ >>= ⟦p⟧`. Support points are evaluated in parallel and combined
    /// in canonical order, so the result does not depend on scheduling.
    pub fn eval_dist<W: Weight>(&self, mu: &Dist<W>) -> Dist<W> {
        let interp = Interp::new(self);
        let inputs: Vec<(&HistSet, &W)> = mu.iter().collect();
        let outputs: Vec<Dist<W>> = inputs
            .par_iter()
            .map(|(a, _)| interp.eval(self.root, a))
            .collect();
        let mut it = outputs.into_iter();
        mu.bind(|_| it.next().expect("one output per support point"))
    }

    fn det(&self, id: usize, a: &HistSet) -> HistSet {
        if a.is_empty() {
            return HistSet::empty();
        }
        match &self.nodes[id] {
            Node::Drop => HistSet::empty(),
            Node::Skip => a.clone(),
            Node::Test(i, v) => a.filter(|h| h.head()[*i] == *v),
            Node::Neg(t) => a.difference(&self.det(*t, a)),
            Node::Mod(i, v) => a.map_partial(|h| Some(h.with_head_field(*i, *v))),
            Node::Dup => a.map_partial(|h| Some(h.dup())),
            Node::Par(p, q) => self.det(*p, a).union(&self.det(*q, a)),
            Node::Seq(p, q) => self.det(*q, &self.det(*p, a)),
            Node::Iter(k, p) => {
                // Choice-free programs act history by history, so p^(k)(a)
                // is the union of p^i(a) for i ≤ k.
                let mut acc = a.clone();
                let mut frontier = a.clone();
                for _ in 0..*k {
                    frontier = self.det(*p, &frontier);
                    if frontier.is_subset(&acc) {
                        break;
                    }
                    acc = acc.union(&frontier);
                }
                acc
            }
            Node::Choice(..) => unreachable!("choice nodes are never deterministic"),
        }
    }
}

const SHARDS: usize = 32;

type MemoKey = (usize, u32, HistSet);

struct Interp<'c, W: Weight> {
    prog: &'c Compiled,
    memo: Vec<Mutex<HashMap<MemoKey, Dist<W>>>>,
}

impl<'c, W: Weight> Interp<'c, W> {
    fn new(prog: &'c Compiled) -> Self {
        Interp {
            prog,
            memo: (0..SHARDS).map(|_| Mutex::new(HashMap::new())).collect(),
        }
    }

    fn shard(&self, key: &MemoKey) -> &Mutex<HashMap<MemoKey, Dist<W>>> {
        let mut h = DefaultHasher::new();
        key.hash(&mut h);
        &self.memo[h.finish() as usize % SHARDS]
    }

    fn eval(&self, id: usize, a: &HistSet) -> Dist<W> {
        if a.is_empty() {
            return Dist::dirac(HistSet::empty());
        }
        if self.prog.deterministic[id] {
            return Dist::dirac(self.prog.det(id, a));
        }
        match &self.prog.nodes[id] {
            Node::Par(p, q) => self.eval(*p, a).par(&self.eval(*q, a)),
            Node::Seq(p, q) => self.eval(*p, a).bind(|b| self.eval(*q, b)),
            Node::Choice(r, p, q) => {
                let rw = W::from_rational(r);
                if rw == W::one() {
                    self.eval(*p, a)
                } else if rw.is_zero() {
                    self.eval(*q, a)
                } else {
                    Dist::convex_weight(&rw, &self.eval(*p, a), &self.eval(*q, a))
                }
            }
            Node::Iter(k, p) => self.iterate(id, *k, *p, a),
            _ => unreachable!("primitive nodes are deterministic"),
        }
    }

    /// `p^(k)(a) = a ∪ (p ; p^(k-1))(a)` sample-wise.
    fn iterate(&self, id: usize, k: u32, body: usize, a: &HistSet) -> Dist<W> {
        if k == 0 || a.is_empty() {
            return Dist::dirac(a.clone());
        }
        let key = (id, k, a.clone());
        if let Some(d) = self.shard(&key).lock().expect("memo lock").get(&key) {
            return d.clone();
        }
        let d = self
            .eval(body, a)
            .bind(|b| self.iterate(id, k - 1, body, b))
            .map(|c| a.union(c));
        self.shard(&key).lock().expect("memo lock").insert(key, d.clone());
        d
    }
}

/// `b_t = ⟦t⟧(universe)` for a predicate `t`.
pub fn deterministic_filter(schema: &FieldSchema, t: &Program, universe: &HistSet) -> Result<HistSet> {
    if typecheck(t)? != Kind::Predicate {
        return Err(KindError {
            subterm: pretty(t),
            reason: "expected a predicate".into(),
        }
        .into());
    }
    let c = Compiled::new(schema, t)?;
    Ok(c.apply_deterministic(universe).expect("predicates are choice-free"))
}

/// The partial function on histories realized by an atomic program.
#[derive(Debug, Clone)]
pub struct AtomicFn {
    kind: AtomicKind,
}

#[derive(Debug, Clone)]
enum AtomicKind {
    Filter(Compiled),
    Dup,
    Mod(usize, u32),
}

impl AtomicFn {
    pub fn apply(&self, h: &History) -> Option<History> {
        match &self.kind {
            AtomicKind::Filter(c) => {
                let one = HistSet::singleton(h.clone());
                let out = c.det(c.root, &one);
                (!out.is_empty()).then(|| h.clone())
            }
            AtomicKind::Dup => Some(h.dup()),
            AtomicKind::Mod(i, v) => Some(h.with_head_field(*i, *v)),
        }
    }

    /// `{f(h) : h ∈ a, f(h) defined}`.
    pub fn apply_set(&self, a: &HistSet) -> HistSet {
        a.map_partial(|h| self.apply(h))
    }
}

/// Views a predicate, `dup` or a modification as a partial function
/// `H ⇀ H` with `⟦p⟧(a) = δ{f(h) | h ∈ a}`.
pub fn atomic_as_function(schema: &FieldSchema, p: &Program) -> Result<AtomicFn> {
    let kind = match p {
        Program::Dup => AtomicKind::Dup,
        Program::Mod(f, n) => {
            let (i, v) = schema.resolve(f, *n)?;
            AtomicKind::Mod(i, v)
        }
        _ => match typecheck(p) {
            Ok(Kind::Predicate) => AtomicKind::Filter(Compiled::new(schema, p)?),
            _ => return Err(Error::NotAtomic(pretty(p))),
        },
    };
    Ok(AtomicFn { kind })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;
    use crate::model::Packet;
    use crate::prob::ratio;

    fn schema() -> FieldSchema {
        FieldSchema::from_ranges(&[("sw", 0, 3), ("pt", 0, 4), ("dst", 0, 4)]).unwrap()
    }

    fn at(s: &FieldSchema, sw: u32, pt: u32, dst: u32) -> History {
        History::singleton(&Packet::from_pairs(s, &[("sw", sw), ("pt", pt), ("dst", dst)]).unwrap())
    }

    fn run(s: &FieldSchema, text: &str, a: &HistSet) -> Dist {
        eval(s, &parse(text).unwrap(), a).unwrap()
    }

    #[test]
    fn primitives() {
        let s = schema();
        let a: HistSet = [at(&s, 1, 1, 3), at(&s, 1, 2, 3)].into_iter().collect();
        assert_eq!(run(&s, "drop", &a), Dist::dirac(HistSet::empty()));
        assert_eq!(run(&s, "skip", &a), Dist::dirac(a.clone()));
        assert_eq!(run(&s, "pt=1", &a), Dist::dirac(HistSet::singleton(at(&s, 1, 1, 3))));
        assert_eq!(run(&s, "~pt=1", &a), Dist::dirac(HistSet::singleton(at(&s, 1, 2, 3))));
        assert_eq!(run(&s, "pt:=4", &a), Dist::dirac(HistSet::singleton(at(&s, 1, 4, 3))));
        let dup = run(&s, "dup", &HistSet::singleton(at(&s, 1, 1, 3)));
        assert_eq!(dup, Dist::dirac(HistSet::singleton(at(&s, 1, 1, 3).dup())));
    }

    #[test]
    fn ingress_rule_splits_evenly() {
        let s = schema();
        let a = HistSet::singleton(at(&s, 1, 1, 3));
        let d = run(&s, "sw=1; (dst=3; (pt:=2 ⊕ pt:=4))", &a);
        assert_eq!(d.weight(&HistSet::singleton(at(&s, 1, 2, 3))), ratio(1, 2));
        assert_eq!(d.weight(&HistSet::singleton(at(&s, 1, 4, 3))), ratio(1, 2));
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn parallel_uses_whole_input_on_both_sides() {
        let s = schema();
        let a = HistSet::singleton(at(&s, 0, 0, 0));
        let d = run(&s, "(pt:=1 ⊕ pt:=2) & (pt:=2 ⊕ pt:=1)", &a);
        let one = HistSet::singleton(at(&s, 0, 1, 0));
        let two = HistSet::singleton(at(&s, 0, 2, 0));
        assert_eq!(d.weight(&one), ratio(1, 4));
        assert_eq!(d.weight(&two), ratio(1, 4));
        assert_eq!(d.weight(&one.union(&two)), ratio(1, 2));
    }

    #[test]
    fn bounded_star_zero_is_skip() {
        let s = schema();
        let a = HistSet::singleton(at(&s, 2, 1, 1));
        assert_eq!(run(&s, "(pt:=3 ⊕ dup)^(0)", &a), Dist::dirac(a));
    }

    #[test]
    fn deterministic_iteration_matches_unrolling() {
        let s = schema();
        let a = HistSet::singleton(at(&s, 0, 0, 0));
        let body = "(sw=0; sw:=1 & sw=1; sw:=2 & sw=2; sw:=0); dup";
        for k in 0..5 {
            let star = run(&s, &format!("({body})^({k})"), &a);
            let mut unrolled = "skip".to_string();
            for _ in 0..k {
                unrolled = format!("skip & ({body}); ({unrolled})");
            }
            assert_eq!(star, run(&s, &unrolled, &a), "k = {k}");
        }
    }

    #[test]
    fn probabilistic_iteration_matches_unrolling() {
        let s = schema();
        let a = HistSet::singleton(at(&s, 0, 0, 0));
        let body = "(sw:=1 +[1/3] sw:=2); dup; (pt:=1 ⊕ drop)";
        for k in 0..4 {
            let star = run(&s, &format!("({body})^({k})"), &a);
            let mut unrolled = "skip".to_string();
            for _ in 0..k {
                unrolled = format!("skip & ({body}); ({unrolled})");
            }
            assert_eq!(star, run(&s, &unrolled, &a), "k = {k}");
        }
    }

    #[test]
    fn unbounded_star_requires_approximation() {
        let s = schema();
        let err = eval(&s, &parse("dup*").unwrap(), &HistSet::empty()).unwrap_err();
        assert!(matches!(err, Error::ApproximationRequired(_)));
        assert!(matches!(
            eval(&s, &parse("while pt=0 do pt:=1").unwrap(), &HistSet::empty()),
            Err(Error::ApproximationRequired(_))
        ));
    }

    #[test]
    fn approximant_shapes() {
        let q = parse("pt:=1 ⊕ dup").unwrap();
        assert_eq!(approximant(&Program::star(q.clone()), 2), Program::bounded_star(2, q.clone()));
        assert_eq!(
            approximant(&Program::star(Program::star(q.clone())), 1),
            Program::bounded_star(1, Program::bounded_star(1, q.clone()))
        );
        assert_eq!(approximant(&q, 7), q);
    }

    #[test]
    fn atomic_functions() {
        let s = schema();
        let h = at(&s, 1, 1, 3);
        let skip = atomic_as_function(&s, &Program::Skip).unwrap();
        assert_eq!(skip.apply(&h), Some(h.clone()));
        let t = atomic_as_function(&s, &Program::test("pt", 2)).unwrap();
        assert_eq!(t.apply(&h), None);
        let t = atomic_as_function(&s, &Program::test("pt", 1)).unwrap();
        assert_eq!(t.apply(&h), Some(h.clone()));
        let d = atomic_as_function(&s, &Program::Dup).unwrap();
        assert_eq!(d.apply(&h), Some(h.dup()));
        assert!(matches!(
            atomic_as_function(&s, &parse("pt:=1 ⊕ pt:=2").unwrap()),
            Err(Error::NotAtomic(_))
        ));
    }

    #[test]
    fn out_of_schema_names_fail_at_compile_time() {
        let s = schema();
        assert!(matches!(
            Compiled::new(&s, &parse("vlan:=1").unwrap()),
            Err(Error::Schema(_))
        ));
        assert!(Compiled::new(&s, &parse("pt=9").unwrap()).is_err());
    }
}
