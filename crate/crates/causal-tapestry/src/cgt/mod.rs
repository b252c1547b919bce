//! Short combinatorial games `{L | R}`: sums, negation, outcome classes,
//! numbers, canonical forms and the census of values born by a given day.
//!
//! Games live in a [`GameStore`] that hash-conses them, so a [`Game`] handle
//! is equal to another exactly when the two games are structurally equal.

mod board;
mod notation;

pub use board::{board_sum, board_sum_with, BoardGame, BoardMove, BoardNode, Component, Player, SumMode, SumPosition};

use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CgtError {
    #[error("census of day {0} is not supported (days 0 to 2 only)")]
    DayUnsupported(u32),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("exclusive sums need a shared board ({0} cells vs {1} cells)")]
    BoardMismatch(usize, usize),
    #[error("move targets cell {site} on a board of {cells} cells")]
    SiteOutOfRange { site: usize, cells: usize },
}

/// Handle to a game in a [`GameStore`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Game(u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    /// Left wins whoever starts.
    Positive,
    /// Right wins whoever starts.
    Negative,
    /// The second player wins.
    Zero,
    /// The first player wins.
    Fuzzy,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Census {
    pub day: u32,
    /// Option-set pairs drawn from the previous day's values.
    pub forms: usize,
    /// Those pairs in which no option dominates another on the same side.
    pub undominated_forms: usize,
    /// Distinct values, as canonical forms.
    pub values: Vec<Game>,
}

#[derive(Clone, Debug)]
struct Node {
    left: Vec<Game>,
    right: Vec<Game>,
}

/// Interning table plus memo tables for the recursive operations.
///
/// Single-threaded; give each thread its own store.
#[derive(Clone, Debug)]
pub struct GameStore {
    nodes: Vec<Node>,
    index: HashMap<(Vec<Game>, Vec<Game>), Game>,
    neg_memo: HashMap<Game, Game>,
    add_memo: HashMap<(Game, Game), Game>,
    le_memo: HashMap<(Game, Game), bool>,
    canon_memo: HashMap<Game, Game>,
    outcome_memo: HashMap<Game, (bool, bool)>,
    number_memo: HashMap<Game, bool>,
}

impl Default for GameStore {
    fn default() -> Self {
        Self::new()
    }
}

fn set(mut v: Vec<Game>) -> Vec<Game> {
    v.sort_unstable();
    v.dedup();
    v
}

impl GameStore {
    pub fn new() -> Self {
        let mut s = GameStore {
            nodes: Vec::new(),
            index: HashMap::new(),
            neg_memo: HashMap::new(),
            add_memo: HashMap::new(),
            le_memo: HashMap::new(),
            canon_memo: HashMap::new(),
            outcome_memo: HashMap::new(),
            number_memo: HashMap::new(),
        };
        s.make(vec![], vec![]);
        s
    }

    /// `{left | right}`; option lists are treated as sets.
    pub fn make(&mut self, left: Vec<Game>, right: Vec<Game>) -> Game {
        let key = (set(left), set(right));
        if let Some(&g) = self.index.get(&key) {
            return g;
        }
        let g = Game(self.nodes.len() as u32);
        self.nodes.push(Node { left: key.0.clone(), right: key.1.clone() });
        self.index.insert(key, g);
        g
    }

    pub fn zero(&self) -> Game {
        Game(0)
    }

    pub fn star(&mut self) -> Game {
        let z = self.zero();
        self.make(vec![z], vec![z])
    }

    /// `n = {n−1 |}` and `−n = {| −(n−1)}`.
    pub fn integer(&mut self, n: i64) -> Game {
        let mut g = self.zero();
        for _ in 0..n.unsigned_abs() {
            g = if n > 0 { self.make(vec![g], vec![]) } else { self.make(vec![], vec![g]) };
        }
        g
    }

    pub fn left(&self, g: Game) -> &[Game] {
        &self.nodes[g.0 as usize].left
    }

    pub fn right(&self, g: Game) -> &[Game] {
        &self.nodes[g.0 as usize].right
    }

    /// Number of distinct games interned so far.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Day on which the game tree is first built.
    pub fn birthday(&self, g: Game) -> u32 {
        self.left(g).iter().chain(self.right(g)).map(|&o| self.birthday(o) + 1).max().unwrap_or(0)
    }

    /// `−G = {−G_R | −G_L}`.
    pub fn neg(&mut self, g: Game) -> Game {
        if let Some(&n) = self.neg_memo.get(&g) {
            return n;
        }
        let (l, r) = (self.left(g).to_vec(), self.right(g).to_vec());
        let nl = r.into_iter().map(|x| self.neg(x)).collect();
        let nr = l.into_iter().map(|x| self.neg(x)).collect();
        let n = self.make(nl, nr);
        self.neg_memo.insert(g, n);
        n
    }

    /// `G + H = {G_L + H, G + H_L | G_R + H, G + H_R}`.
    pub fn add(&mut self, g: Game, h: Game) -> Game {
        let key = if g <= h { (g, h) } else { (h, g) };
        if let Some(&s) = self.add_memo.get(&key) {
            return s;
        }
        let (gl, gr) = (self.left(g).to_vec(), self.right(g).to_vec());
        let (hl, hr) = (self.left(h).to_vec(), self.right(h).to_vec());
        let mut l = Vec::with_capacity(gl.len() + hl.len());
        let mut r = Vec::with_capacity(gr.len() + hr.len());
        for x in gl {
            l.push(self.add(x, h));
        }
        for x in hl {
            l.push(self.add(g, x));
        }
        for x in gr {
            r.push(self.add(x, h));
        }
        for x in hr {
            r.push(self.add(g, x));
        }
        let s = self.make(l, r);
        self.add_memo.insert(key, s);
        s
    }

    /// `G ≤ H` iff no `G_L ≥ H` and no `H_R ≤ G`.
    pub fn le(&mut self, g: Game, h: Game) -> bool {
        if g == h {
            return true;
        }
        if let Some(&b) = self.le_memo.get(&(g, h)) {
            return b;
        }
        let gl = self.left(g).to_vec();
        let hr = self.right(h).to_vec();
        let b = !gl.into_iter().any(|x| self.le(h, x)) && !hr.into_iter().any(|x| self.le(x, g));
        self.le_memo.insert((g, h), b);
        b
    }

    pub fn geq(&mut self, g: Game, h: Game) -> bool {
        self.le(h, g)
    }

    /// Equality of values.
    pub fn eq(&mut self, g: Game, h: Game) -> bool {
        self.le(g, h) && self.le(h, g)
    }

    pub fn lt(&mut self, g: Game, h: Game) -> bool {
        self.le(g, h) && !self.le(h, g)
    }

    /// Neither `G ≤ H` nor `H ≤ G`.
    pub fn incomparable(&mut self, g: Game, h: Game) -> bool {
        !self.le(g, h) && !self.le(h, g)
    }

    /// (Left wins moving first, Right wins moving first), by playing it out.
    fn first_mover_wins(&mut self, g: Game) -> (bool, bool) {
        if let Some(&w) = self.outcome_memo.get(&g) {
            return w;
        }
        let (l, r) = (self.left(g).to_vec(), self.right(g).to_vec());
        // Left moving first wins iff some move leaves Right (now first) losing.
        let left_first = l.into_iter().any(|x| !self.first_mover_wins(x).1);
        let right_first = r.into_iter().any(|x| !self.first_mover_wins(x).0);
        self.outcome_memo.insert(g, (left_first, right_first));
        (left_first, right_first)
    }

    /// Outcome under perfect play where the player unable to move loses.
    pub fn outcome(&mut self, g: Game) -> Outcome {
        match self.first_mover_wins(g) {
            (true, false) => Outcome::Positive,
            (false, true) => Outcome::Negative,
            (false, false) => Outcome::Zero,
            (true, true) => Outcome::Fuzzy,
        }
    }

    /// All options are numbers and `g_L < G < g_R` for every option.
    pub fn is_number(&mut self, g: Game) -> bool {
        if let Some(&b) = self.number_memo.get(&g) {
            return b;
        }
        let (l, r) = (self.left(g).to_vec(), self.right(g).to_vec());
        let b = l.iter().chain(&r).all(|&x| self.is_number(x))
            && l.iter().all(|&x| self.lt(x, g))
            && r.iter().all(|&x| self.lt(g, x));
        self.number_memo.insert(g, b);
        b
    }

    /// Simplest form of the value: dominated options are dropped and
    /// reversible options bypassed until neither applies.
    pub fn canonical(&mut self, g: Game) -> Game {
        if let Some(&c) = self.canon_memo.get(&g) {
            return c;
        }
        let (l0, r0) = (self.left(g).to_vec(), self.right(g).to_vec());
        let mut l: Vec<Game> = set(l0.into_iter().map(|x| self.canonical(x)).collect());
        let mut r: Vec<Game> = set(r0.into_iter().map(|x| self.canonical(x)).collect());
        loop {
            l = self.undominated(l, true);
            r = self.undominated(r, false);
            let mut changed = false;
            let mut nl = Vec::new();
            for x in l {
                let xr = self.right(x).to_vec();
                match xr.into_iter().find(|&y| self.le(y, g)) {
                    Some(y) => {
                        nl.extend_from_slice(self.left(y));
                        changed = true;
                    }
                    None => nl.push(x),
                }
            }
            let mut nr = Vec::new();
            for x in r {
                let xl = self.left(x).to_vec();
                match xl.into_iter().find(|&y| self.le(g, y)) {
                    Some(y) => {
                        nr.extend_from_slice(self.right(y));
                        changed = true;
                    }
                    None => nr.push(x),
                }
            }
            l = set(nl);
            r = set(nr);
            if !changed {
                break;
            }
        }
        let c = self.make(l, r);
        self.canon_memo.insert(g, c);
        self.canon_memo.insert(c, c);
        c
    }

    /// Drops options beaten by another option on the same side; of several
    /// equal options the first is kept.
    fn undominated(&mut self, opts: Vec<Game>, for_left: bool) -> Vec<Game> {
        let mut keep = Vec::new();
        for (i, &x) in opts.iter().enumerate() {
            let beaten = opts.iter().enumerate().any(|(j, &y)| {
                if i == j {
                    return false;
                }
                let (worse, better) = if for_left { (x, y) } else { (y, x) };
                let le = self.le(worse, better);
                le && (!self.le(better, worse) || j < i)
            });
            if !beaten {
                keep.push(x);
            }
        }
        keep
    }

    /// Values born by `day`, as canonical forms in order of first appearance.
    pub fn born_by(&mut self, day: u32) -> Result<Vec<Game>, CgtError> {
        Ok(self.census(day)?.values)
    }

    pub fn census(&mut self, day: u32) -> Result<Census, CgtError> {
        if day > 2 {
            return Err(CgtError::DayUnsupported(day));
        }
        let mut values = vec![self.zero()];
        let mut forms = 1;
        let mut undominated_forms = 1;
        for _ in 0..day {
            let subsets: Vec<Vec<Game>> = (0u32..1 << values.len())
                .map(|mask| values.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect())
                .collect();
            let antichains = subsets.iter().filter(|s| self.is_antichain(s)).count();
            forms = subsets.len() * subsets.len();
            undominated_forms = antichains * antichains;
            let mut next: Vec<Game> = Vec::new();
            for l in &subsets {
                for r in &subsets {
                    let g = self.make(l.clone(), r.clone());
                    let c = self.canonical(g);
                    if !next.contains(&c) {
                        next.push(c);
                    }
                }
            }
            values = next;
        }
        Ok(Census { day, forms, undominated_forms, values })
    }

    fn is_antichain(&mut self, s: &[Game]) -> bool {
        for (i, &a) in s.iter().enumerate() {
            for &b in &s[i + 1..] {
                if !self.incomparable(a, b) {
                    return false;
                }
            }
        }
        true
    }

    /// Bracket notation with the names `0`, `n`, `-n`, `±n` and `*`.
    pub fn format(&self, g: Game) -> String {
        notation::format(self, g)
    }

    pub fn parse(&mut self, text: &str) -> Result<Game, CgtError> {
        notation::parse(self, text)
    }

    /// Structural integer value, if `g` is literally `{n−1|}` or `{|−(n−1)}`.
    pub fn as_integer(&self, g: Game) -> Option<i64> {
        let (l, r) = (self.left(g), self.right(g));
        match (l, r) {
            ([], []) => Some(0),
            ([x], []) => self.as_integer(*x).filter(|&n| n >= 0).map(|n| n + 1),
            ([], [x]) => self.as_integer(*x).filter(|&n| n <= 0).map(|n| n - 1),
            _ => None,
        }
    }
}
