use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops;
use std::sync::Arc;

/// Node kinds of the scalar expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    /// Index into the chart's coordinate list.
    Coord(usize),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Neg(Expr),
    Div(Expr, Expr),
    IntPow(Expr, i32),
    Sqrt(Expr),
    Exp(Expr),
    Sin(Expr),
    Cos(Expr),
}

/// Immutable, cheaply clonable expression handle.
///
/// Subtrees are shared through `Arc`, so differentiation and tensor assembly
/// build DAGs rather than copying whole trees.
#[derive(Clone, PartialEq)]
pub struct Expr(pub(super) Arc<Node>);

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&*self.0, f)
    }
}

impl Expr {
    /// Wraps a node without any absorption. Used by the parser so that the
    /// returned tree mirrors the source text.
    pub fn from_node(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn zero() -> Expr {
        Expr::constant(0.0)
    }

    pub fn one() -> Expr {
        Expr::constant(1.0)
    }

    pub fn constant(c: f64) -> Expr {
        Expr::from_node(Node::Const(c))
    }

    pub fn coord(i: usize) -> Expr {
        Expr::from_node(Node::Coord(i))
    }

    pub fn as_const(&self) -> Option<f64> {
        match *self.0 {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn is_one(&self) -> bool {
        self.as_const() == Some(1.0)
    }

    /// Sum with zero absorption, flattening and constant folding.
    pub fn add(terms: Vec<Expr>) -> Expr {
        let mut out = Vec::with_capacity(terms.len());
        let mut acc = 0.0;
        for t in terms {
            match &*t.0 {
                Node::Const(c) => acc += c,
                Node::Add(inner) => {
                    for s in inner {
                        match s.as_const() {
                            Some(c) => acc += c,
                            None => out.push(s.clone()),
                        }
                    }
                }
                _ => out.push(t),
            }
        }
        if acc != 0.0 {
            out.push(Expr::constant(acc));
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::from_node(Node::Add(out)),
        }
    }

    /// Product with zero/one absorption, flattening and constant folding.
    pub fn mul(factors: Vec<Expr>) -> Expr {
        let mut out = Vec::with_capacity(factors.len());
        let mut acc = 1.0;
        for f in factors {
            match &*f.0 {
                Node::Const(c) => acc *= c,
                Node::Mul(inner) => {
                    for s in inner {
                        match s.as_const() {
                            Some(c) => acc *= c,
                            None => out.push(s.clone()),
                        }
                    }
                }
                Node::Neg(inner) => {
                    acc = -acc;
                    match inner.as_const() {
                        Some(c) => acc *= c,
                        None => out.push(inner.clone()),
                    }
                }
                _ => out.push(f),
            }
            if acc == 0.0 {
                return Expr::zero();
            }
        }
        let body = match out.len() {
            0 => return Expr::constant(acc),
            1 => out.pop().unwrap(),
            _ => Expr::from_node(Node::Mul(out)),
        };
        if acc == 1.0 {
            body
        } else if acc == -1.0 {
            Expr::neg(body)
        } else {
            match &*body.0 {
                Node::Mul(fs) => {
                    let mut v = Vec::with_capacity(fs.len() + 1);
                    v.push(Expr::constant(acc));
                    v.extend(fs.iter().cloned());
                    Expr::from_node(Node::Mul(v))
                }
                _ => Expr::from_node(Node::Mul(vec![Expr::constant(acc), body])),
            }
        }
    }

    pub fn neg(e: Expr) -> Expr {
        match &*e.0 {
            Node::Const(c) => Expr::constant(-c),
            Node::Neg(inner) => inner.clone(),
            _ => Expr::from_node(Node::Neg(e)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::add(vec![a, Expr::neg(b)])
    }

    pub fn div(num: Expr, den: Expr) -> Expr {
        if num.is_zero() {
            return Expr::zero();
        }
        if den.is_one() {
            return num;
        }
        match (num.as_const(), den.as_const()) {
            (Some(a), Some(b)) if b != 0.0 => Expr::constant(a / b),
            (_, Some(b)) if b == -1.0 => Expr::neg(num),
            _ => Expr::from_node(Node::Div(num, den)),
        }
    }

    pub fn powi(base: Expr, k: i32) -> Expr {
        if k == 0 {
            return Expr::one();
        }
        if k == 1 {
            return base;
        }
        if let Some(c) = base.as_const() {
            if c != 0.0 || k > 0 {
                return Expr::constant(c.powi(k));
            }
        }
        Expr::from_node(Node::IntPow(base, k))
    }

    pub fn sqrt(e: Expr) -> Expr {
        match e.as_const() {
            Some(c) if c >= 0.0 => Expr::constant(c.sqrt()),
            _ => Expr::from_node(Node::Sqrt(e)),
        }
    }

    pub fn exp(e: Expr) -> Expr {
        match e.as_const() {
            Some(c) => Expr::constant(c.exp()),
            None => Expr::from_node(Node::Exp(e)),
        }
    }

    pub fn sin(e: Expr) -> Expr {
        match e.as_const() {
            Some(c) => Expr::constant(c.sin()),
            None => Expr::from_node(Node::Sin(e)),
        }
    }

    pub fn cos(e: Expr) -> Expr {
        match e.as_const() {
            Some(c) => Expr::constant(c.cos()),
            None => Expr::from_node(Node::Cos(e)),
        }
    }

    pub fn scale(&self, c: f64) -> Expr {
        Expr::mul(vec![Expr::constant(c), self.clone()])
    }

    /// Coordinates that occur anywhere in the tree.
    pub fn coords(&self) -> BTreeSet<usize> {
        let mut set = BTreeSet::new();
        self.collect_coords(&mut set);
        set
    }

    fn collect_coords(&self, set: &mut BTreeSet<usize>) {
        match &*self.0 {
            Node::Const(_) => {}
            Node::Coord(i) => {
                set.insert(*i);
            }
            Node::Add(v) | Node::Mul(v) => v.iter().for_each(|e| e.collect_coords(set)),
            Node::Div(a, b) => {
                a.collect_coords(set);
                b.collect_coords(set);
            }
            Node::Neg(a)
            | Node::IntPow(a, _)
            | Node::Sqrt(a)
            | Node::Exp(a)
            | Node::Sin(a)
            | Node::Cos(a) => a.collect_coords(set),
        }
    }

    pub fn depends_on(&self, i: usize) -> bool {
        match &*self.0 {
            Node::Const(_) => false,
            Node::Coord(j) => *j == i,
            Node::Add(v) | Node::Mul(v) => v.iter().any(|e| e.depends_on(i)),
            Node::Div(a, b) => a.depends_on(i) || b.depends_on(i),
            Node::Neg(a)
            | Node::IntPow(a, _)
            | Node::Sqrt(a)
            | Node::Exp(a)
            | Node::Sin(a)
            | Node::Cos(a) => a.depends_on(i),
        }
    }

    /// Rewrites every coordinate index through `f`. Used to embed factor
    /// expressions into a product chart.
    pub fn map_coords(&self, f: &dyn Fn(usize) -> usize) -> Expr {
        self.map_coords_memo(f, &mut Memo::default())
    }

    fn map_coords_memo(&self, f: &dyn Fn(usize) -> usize, memo: &mut Memo) -> Expr {
        if let Some(e) = memo.get(self) {
            return e;
        }
        let mut m = |e: &Expr| e.map_coords_memo(f, memo);
        let node = match &*self.0 {
            Node::Const(_) => return self.clone(),
            Node::Coord(i) => Node::Coord(f(*i)),
            Node::Add(v) => Node::Add(v.iter().map(&mut m).collect()),
            Node::Mul(v) => Node::Mul(v.iter().map(&mut m).collect()),
            Node::Neg(a) => Node::Neg(m(a)),
            Node::Div(a, b) => Node::Div(m(a), m(b)),
            Node::IntPow(a, k) => Node::IntPow(m(a), *k),
            Node::Sqrt(a) => Node::Sqrt(m(a)),
            Node::Exp(a) => Node::Exp(m(a)),
            Node::Sin(a) => Node::Sin(m(a)),
            Node::Cos(a) => Node::Cos(m(a)),
        };
        let out = Expr::from_node(node);
        memo.put(self, &out);
        out
    }

    /// Substitutes expressions for coordinates.
    pub fn substitute(&self, f: &dyn Fn(usize) -> Option<Expr>) -> Expr {
        self.substitute_memo(f, &mut Memo::default())
    }

    fn substitute_memo(&self, f: &dyn Fn(usize) -> Option<Expr>, memo: &mut Memo) -> Expr {
        if let Some(e) = memo.get(self) {
            return e;
        }
        let mut s = |e: &Expr| e.substitute_memo(f, memo);
        let out = match &*self.0 {
            Node::Const(_) => return self.clone(),
            Node::Coord(i) => return f(*i).unwrap_or_else(|| self.clone()),
            Node::Add(v) => Expr::add(v.iter().map(&mut s).collect()),
            Node::Mul(v) => Expr::mul(v.iter().map(&mut s).collect()),
            Node::Neg(a) => Expr::neg(s(a)),
            Node::Div(a, b) => {
                let a = s(a);
                Expr::div(a, s(b))
            }
            Node::IntPow(a, k) => Expr::powi(s(a), *k),
            Node::Sqrt(a) => Expr::sqrt(s(a)),
            Node::Exp(a) => Expr::exp(s(a)),
            Node::Sin(a) => Expr::sin(s(a)),
            Node::Cos(a) => Expr::cos(s(a)),
        };
        memo.put(self, &out);
        out
    }

    /// Number of nodes counted as a tree (shared subtrees counted repeatedly).
    pub fn tree_size(&self) -> usize {
        1 + match &*self.0 {
            Node::Const(_) | Node::Coord(_) => 0,
            Node::Add(v) | Node::Mul(v) => v.iter().map(Expr::tree_size).sum(),
            Node::Div(a, b) => a.tree_size() + b.tree_size(),
            Node::Neg(a)
            | Node::IntPow(a, _)
            | Node::Sqrt(a)
            | Node::Exp(a)
            | Node::Sin(a)
            | Node::Cos(a) => a.tree_size(),
        }
    }
}

/// Results of a rewrite for shared (non-leaf, multiply referenced) nodes,
/// so that DAG inputs give DAG outputs instead of expanded trees.
#[derive(Default)]
pub(super) struct Memo {
    cache: HashMap<*const Node, Expr>,
    /// Keeps keyed nodes alive so their addresses stay unique.
    keep: Vec<Expr>,
}

impl Memo {
    fn shared(e: &Expr) -> bool {
        Arc::strong_count(&e.0) > 1 && !matches!(*e.0, Node::Const(_) | Node::Coord(_))
    }

    pub(super) fn get(&self, e: &Expr) -> Option<Expr> {
        if Memo::shared(e) {
            self.cache.get(&Arc::as_ptr(&e.0)).cloned()
        } else {
            None
        }
    }

    pub(super) fn put(&mut self, e: &Expr, v: &Expr) {
        if Memo::shared(e) {
            self.cache.insert(Arc::as_ptr(&e.0), v.clone());
            self.keep.push(e.clone());
        }
    }
}

impl From<f64> for Expr {
    fn from(c: f64) -> Expr {
        Expr::constant(c)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $build:expr) => {
        impl ops::$trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $build(self, rhs)
            }
        }
        impl ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                $build(self.clone(), rhs.clone())
            }
        }
        impl ops::$trait<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                $build(self, Expr::constant(rhs))
            }
        }
        impl ops::$trait<Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $build(Expr::constant(self), rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::add(vec![a, b]));
binop!(Sub, sub, Expr::sub);
binop!(Mul, mul, |a, b| Expr::mul(vec![a, b]));
binop!(Div, div, Expr::div);

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self.clone())
    }
}
