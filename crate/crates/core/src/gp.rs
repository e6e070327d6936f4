//! Expression-tree programs that synthesize one instance each.
//!
//! Terminals are references into the minority pool (whole feature vectors)
//! or scalar constants in `[-1, 1]`; a constant broadcasts to every feature
//! position. Functions are `+ - * /` applied elementwise, with division
//! protected per component: a zero denominator yields 1 at that position.
//!
//! Depth counts the root as 1. Programs print as parenthesized prefix text,
//! e.g. `(mul (add min:1 min:7) (sub min:2 min:4))`, and parse back from it.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::data::Instance;
use crate::error::{Error, Result};
use crate::fitness::FitnessValue;

/// Crossover and transfer-crossover give up after this many point draws
/// that would exceed the depth limit, and return the parent(s) unchanged.
pub const MAX_POINT_RETRIES: usize = 8;

/// Upper bound on the depth of subtrees grown by mutation.
pub const MUTATION_SUBTREE_DEPTH: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    Add,
    Sub,
    Mul,
    /// Protected division.
    Div,
}

impl Op {
    pub const ALL: [Op; 4] = [Op::Add, Op::Sub, Op::Mul, Op::Div];

    pub fn name(self) -> &'static str {
        match self {
            Op::Add => "add",
            Op::Sub => "sub",
            Op::Mul => "mul",
            Op::Div => "div",
        }
    }

    #[inline]
    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            Op::Add => a + b,
            Op::Sub => a - b,
            Op::Mul => a * b,
            Op::Div => {
                if b == 0.0 {
                    1.0
                } else {
                    a / b
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Function(Op, Box<Node>, Box<Node>),
    /// Index into the minority pool.
    MinRef(usize),
    Constant(f64),
}

impl Node {
    pub fn func(op: Op, left: Node, right: Node) -> Node {
        Node::Function(op, Box::new(left), Box::new(right))
    }

    pub fn is_terminal(&self) -> bool {
        !matches!(self, Node::Function(..))
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Function(_, l, r) => 1 + l.depth().max(r.depth()),
            _ => 1,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Node::Function(_, l, r) => 1 + l.size() + r.size(),
            _ => 1,
        }
    }

    /// Preorder traversal yielding `(node, depth)` with the receiver at depth 1.
    pub fn preorder(&self) -> impl Iterator<Item = (&Node, usize)> {
        let mut stack = vec![(self, 1usize)];
        std::iter::from_fn(move || {
            let (node, depth) = stack.pop()?;
            if let Node::Function(_, l, r) = node {
                stack.push((r, depth + 1));
                stack.push((l, depth + 1));
            }
            Some((node, depth))
        })
    }

    fn replaced(&self, target: usize, counter: &mut usize, with: &Node) -> Node {
        if *counter == target {
            *counter += self.size();
            return with.clone();
        }
        *counter += 1;
        match self {
            Node::Function(op, l, r) => {
                let nl = l.replaced(target, counter, with);
                let nr = r.replaced(target, counter, with);
                Node::Function(*op, Box::new(nl), Box::new(nr))
            }
            leaf => leaf.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub root: Node,
}

impl Program {
    pub fn new(root: Node) -> Self {
        Program { root }
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn size(&self) -> usize {
        self.root.size()
    }

    /// The node at a preorder position together with its depth.
    pub fn node_at(&self, index: usize) -> (&Node, usize) {
        self.root
            .preorder()
            .nth(index)
            .unwrap_or_else(|| panic!("node index {index} out of range for size {}", self.size()))
    }

    /// A copy with the subtree at a preorder position replaced.
    pub fn with_subtree(&self, index: usize, subtree: &Node) -> Program {
        let mut counter = 0;
        Program::new(self.root.replaced(index, &mut counter, subtree))
    }

    /// Depth bound, pool-index validity and constant range.
    pub fn is_valid(&self, max_depth: usize, pool_size: usize) -> bool {
        self.depth() <= max_depth
            && self.root.preorder().all(|(n, _)| match n {
                Node::MinRef(i) => *i < pool_size,
                Node::Constant(c) => (-1.0..=1.0).contains(c),
                Node::Function(..) => true,
            })
    }

    /// Phenotype: the instance this program synthesizes from the pool.
    pub fn evaluate(&self, pool: &[Instance]) -> Result<Instance> {
        evaluate(self, pool)
    }
}

/// Evaluates a program elementwise over the minority pool.
///
/// Fails with [`Error::NonFinite`] when any intermediate result overflows.
pub fn evaluate(program: &Program, pool: &[Instance]) -> Result<Instance> {
    let dim = pool
        .first()
        .ok_or_else(|| Error::Contract("empty minority pool".into()))?
        .len();
    eval_node(&program.root, pool, dim).map(Instance::new)
}

fn eval_node(node: &Node, pool: &[Instance], dim: usize) -> Result<Vec<f64>> {
    match node {
        Node::Constant(c) => Ok(vec![*c; dim]),
        Node::MinRef(i) => pool.get(*i).map(|x| x.to_vec()).ok_or_else(|| {
            Error::Contract(format!("terminal min:{i} outside pool of {}", pool.len()))
        }),
        Node::Function(op, l, r) => {
            let mut a = eval_node(l, pool, dim)?;
            let b = eval_node(r, pool, dim)?;
            for (x, y) in a.iter_mut().zip(&b) {
                *x = op.apply(*x, *y);
                if !x.is_finite() {
                    return Err(Error::NonFinite);
                }
            }
            Ok(a)
        }
    }
}

/// Random tree construction over a fixed minority pool.
#[derive(Debug, Clone, Copy)]
pub struct TreeBuilder {
    pool_size: usize,
}

impl TreeBuilder {
    pub fn new(pool_size: usize) -> Self {
        TreeBuilder { pool_size }
    }

    /// Uniform over the terminal set: each pool instance, plus one
    /// ephemeral constant drawn from `[-1, 1]`.
    pub fn terminal<R: Rng + ?Sized>(&self, rng: &mut R) -> Node {
        let pick = rng.gen_range(0..=self.pool_size);
        if pick == self.pool_size {
            Node::Constant(rng.gen_range(-1.0..=1.0))
        } else {
            Node::MinRef(pick)
        }
    }

    fn op<R: Rng + ?Sized>(rng: &mut R) -> Op {
        Op::ALL[rng.gen_range(0..Op::ALL.len())]
    }

    /// Every branch reaches exactly `depth`.
    pub fn full<R: Rng + ?Sized>(&self, depth: usize, rng: &mut R) -> Node {
        if depth <= 1 {
            return self.terminal(rng);
        }
        let op = Self::op(rng);
        let l = self.full(depth - 1, rng);
        let r = self.full(depth - 1, rng);
        Node::func(op, l, r)
    }

    /// Branches stop early at random. Below the root, a terminal is chosen
    /// with probability `terminals / (terminals + functions)`.
    pub fn grow<R: Rng + ?Sized>(&self, max_depth: usize, function_root: bool, rng: &mut R) -> Node {
        if max_depth <= 1 {
            return self.terminal(rng);
        }
        if !function_root {
            let n_terminals = (self.pool_size + 1) as f64;
            let p_terminal = n_terminals / (n_terminals + Op::ALL.len() as f64);
            if rng.gen_bool(p_terminal) {
                return self.terminal(rng);
            }
        }
        let op = Self::op(rng);
        let l = self.grow(max_depth - 1, false, rng);
        let r = self.grow(max_depth - 1, false, rng);
        Node::func(op, l, r)
    }
}

/// Programs of one task plus their fitness once evaluated.
#[derive(Debug, Clone, Default)]
pub struct Population {
    pub programs: Vec<Program>,
    /// Parallel to `programs`; empty until evaluated.
    pub fitnesses: Vec<FitnessValue>,
}

impl Population {
    pub fn new(programs: Vec<Program>) -> Self {
        Population {
            programs,
            fitnesses: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.programs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.programs.is_empty()
    }

    pub fn is_evaluated(&self) -> bool {
        !self.programs.is_empty() && self.fitnesses.len() == self.programs.len()
    }
}

/// Ramped half-and-half: program `i` gets depth `2 + (i / 2) mod (max_depth - 1)`
/// and is built with `full` when `i` is even, `grow` when odd. Grown trees
/// always have a function at the root, so every depth lies in `[2, max_depth]`.
pub fn init_ramped_half_and_half<R: Rng + ?Sized>(
    pop_size: usize,
    max_depth: usize,
    pool_size: usize,
    rng: &mut R,
) -> Result<Population> {
    if pop_size < 2 || max_depth < 2 || pool_size < 1 {
        return Err(Error::Contract(format!(
            "ramped half-and-half needs pop_size >= 2, max_depth >= 2, pool >= 1 \
             (got {pop_size}, {max_depth}, {pool_size})"
        )));
    }
    let builder = TreeBuilder::new(pool_size);
    let levels = max_depth - 1;
    let programs = (0..pop_size)
        .map(|i| {
            let depth = 2 + (i / 2) % levels;
            let root = if i % 2 == 0 {
                builder.full(depth, rng)
            } else {
                builder.grow(depth, true, rng)
            };
            Program::new(root)
        })
        .collect();
    Ok(Population::new(programs))
}

fn fits(host_depth_at_point: usize, subtree: &Node, max_depth: usize) -> bool {
    host_depth_at_point - 1 + subtree.depth() <= max_depth
}

/// Standard subtree crossover: one uniformly chosen point per parent, the
/// subtrees are swapped. Draws that would break the depth limit are retried;
/// after [`MAX_POINT_RETRIES`] failures the parents are returned unchanged.
pub fn crossover_standard<R: Rng + ?Sized>(
    p1: &Program,
    p2: &Program,
    max_depth: usize,
    rng: &mut R,
) -> (Program, Program) {
    let (n1, n2) = (p1.size(), p2.size());
    for _ in 0..MAX_POINT_RETRIES {
        let i = rng.gen_range(0..n1);
        let j = rng.gen_range(0..n2);
        let (s1, d1) = p1.node_at(i);
        let (s2, d2) = p2.node_at(j);
        if fits(d1, s2, max_depth) && fits(d2, s1, max_depth) {
            return (p1.with_subtree(i, s2), p2.with_subtree(j, s1));
        }
    }
    (p1.clone(), p2.clone())
}

/// Transfer crossover: a non-root subtree of the target parent is replaced by
/// a random subtree of an elite from the auxiliary population. Only the
/// target-rooted child is produced; a single-node target comes back unchanged.
pub fn crossover_transfer<R: Rng + ?Sized>(
    target: &Program,
    aux_elite: &Program,
    max_depth: usize,
    rng: &mut R,
) -> Program {
    let n_target = target.size();
    if n_target < 2 {
        return target.clone();
    }
    let n_aux = aux_elite.size();
    for _ in 0..MAX_POINT_RETRIES {
        let i = rng.gen_range(1..n_target);
        let j = rng.gen_range(0..n_aux);
        let (_, depth_at) = target.node_at(i);
        let (donor, _) = aux_elite.node_at(j);
        if fits(depth_at, donor, max_depth) {
            return target.with_subtree(i, donor);
        }
    }
    target.clone()
}

/// Subtree mutation: a uniformly chosen node is replaced by a freshly grown
/// subtree no deeper than the remaining depth budget (and at most
/// [`MUTATION_SUBTREE_DEPTH`]).
pub fn mutate<R: Rng + ?Sized>(
    program: &Program,
    max_depth: usize,
    pool_size: usize,
    rng: &mut R,
) -> Program {
    let i = rng.gen_range(0..program.size());
    let (_, depth_at) = program.node_at(i);
    let budget = (max_depth + 1).saturating_sub(depth_at).clamp(1, MUTATION_SUBTREE_DEPTH);
    let fresh = TreeBuilder::new(pool_size).grow(budget, false, rng);
    program.with_subtree(i, &fresh)
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Function(op, l, r) => write!(f, "({} {} {})", op.name(), l, r),
            Node::MinRef(i) => write!(f, "min:{i}"),
            // `{:?}` keeps a decimal point so constants never look like indices.
            Node::Constant(c) => write!(f, "{c:?}"),
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

impl FromStr for Program {
    type Err = Error;

    fn from_str(s: &str) -> Result<Program> {
        let spaced = s.replace('(', " ( ").replace(')', " ) ");
        let tokens: Vec<&str> = spaced.split_whitespace().collect();
        let mut pos = 0;
        let root = parse_node(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::ProgramSyntax(format!(
                "trailing input after position {pos}"
            )));
        }
        Ok(Program::new(root))
    }
}

fn parse_node(tokens: &[&str], pos: &mut usize) -> Result<Node> {
    let tok = *tokens
        .get(*pos)
        .ok_or_else(|| Error::ProgramSyntax("unexpected end of input".into()))?;
    *pos += 1;
    if tok == "(" {
        let name = *tokens
            .get(*pos)
            .ok_or_else(|| Error::ProgramSyntax("missing operator".into()))?;
        *pos += 1;
        let op = Op::ALL
            .into_iter()
            .find(|o| o.name() == name)
            .ok_or_else(|| Error::ProgramSyntax(format!("unknown operator '{name}'")))?;
        let l = parse_node(tokens, pos)?;
        let r = parse_node(tokens, pos)?;
        if tokens.get(*pos) != Some(&")") {
            return Err(Error::ProgramSyntax(format!("expected ')' after ({name} ...")));
        }
        *pos += 1;
        return Ok(Node::func(op, l, r));
    }
    if let Some(idx) = tok.strip_prefix("min:") {
        return idx
            .parse()
            .map(Node::MinRef)
            .map_err(|_| Error::ProgramSyntax(format!("bad terminal '{tok}'")));
    }
    tok.parse::<f64>()
        .map(Node::Constant)
        .map_err(|_| Error::ProgramSyntax(format!("unexpected token '{tok}'")))
}
