//! Games played by placing pieces on the cells of a finite board, and their
//! sums. In an exclusive sum neither component may move onto a cell already
//! holding a piece of the other.

use super::{CgtError, Game, GameStore};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Player {
    Left,
    Right,
}

/// A move places `player`'s piece on `site`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BoardMove {
    pub player: Player,
    pub site: usize,
}

/// A position with its moves; the tree below is the whole game.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BoardNode {
    pub moves: Vec<(BoardMove, BoardNode)>,
}

impl BoardNode {
    pub fn terminal() -> Self {
        BoardNode::default()
    }

    pub fn with(mut self, player: Player, site: usize, next: BoardNode) -> Self {
        self.moves.push((BoardMove { player, site }, next));
        self
    }

    pub fn leaves(&self) -> usize {
        if self.moves.is_empty() {
            1
        } else {
            self.moves.iter().map(|(_, n)| n.leaves()).sum()
        }
    }

    pub fn positions(&self) -> usize {
        1 + self.moves.iter().map(|(_, n)| n.positions()).sum::<usize>()
    }

    fn max_site(&self) -> Option<usize> {
        self.moves.iter().flat_map(|(m, n)| std::iter::once(m.site).chain(n.max_site())).max()
    }

    fn value(&self, store: &mut GameStore) -> Game {
        let mut l = Vec::new();
        let mut r = Vec::new();
        for (m, n) in &self.moves {
            let v = n.value(store);
            match m.player {
                Player::Left => l.push(v),
                Player::Right => r.push(v),
            }
        }
        store.make(l, r)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoardGame {
    pub cells: usize,
    pub root: BoardNode,
}

impl BoardGame {
    pub fn new(cells: usize, root: BoardNode) -> Result<Self, CgtError> {
        match root.max_site() {
            Some(site) if site >= cells => Err(CgtError::SiteOutOfRange { site, cells }),
            _ => Ok(BoardGame { cells, root }),
        }
    }

    /// The abstract game `{left moves | right moves}`.
    pub fn value(&self, store: &mut GameStore) -> Game {
        self.root.value(store)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumMode {
    /// Separate boards; the second game's cells are renumbered after the first's.
    Disjoint,
    /// One shared board.
    Exclusive,
}

/// Where a sum stands: the cells each component has occupied so far.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumPosition {
    pub first: Vec<bool>,
    pub second: Vec<bool>,
}

/// Component index (0 or 1) making a move.
pub type Component = usize;

pub fn board_sum(g: &BoardGame, h: &BoardGame, mode: SumMode) -> Result<BoardGame, CgtError> {
    match mode {
        SumMode::Disjoint => {
            let shifted = shift(&h.root, g.cells);
            let cells = g.cells + h.cells;
            let g2 = BoardGame { cells, root: g.root.clone() };
            let h2 = BoardGame { cells, root: shifted };
            board_sum_with(&g2, &h2, |_, _, _| true)
        }
        SumMode::Exclusive => board_sum_with(g, h, |pos, who, m| {
            let other = if who == 0 { &pos.second } else { &pos.first };
            !other[m.site]
        }),
    }
}

/// Sum on a shared board where `allow(position, component, move)` decides
/// whether a component's move is legal in the combined game.
pub fn board_sum_with(
    g: &BoardGame,
    h: &BoardGame,
    allow: impl Fn(&SumPosition, Component, &BoardMove) -> bool,
) -> Result<BoardGame, CgtError> {
    if g.cells != h.cells {
        return Err(CgtError::BoardMismatch(g.cells, h.cells));
    }
    let pos = SumPosition { first: vec![false; g.cells], second: vec![false; g.cells] };
    Ok(BoardGame { cells: g.cells, root: expand(&g.root, &h.root, pos, &allow) })
}

fn expand(
    a: &BoardNode,
    b: &BoardNode,
    pos: SumPosition,
    allow: &impl Fn(&SumPosition, Component, &BoardMove) -> bool,
) -> BoardNode {
    let mut node = BoardNode::terminal();
    for (m, next) in &a.moves {
        if allow(&pos, 0, m) {
            let mut p = pos.clone();
            p.first[m.site] = true;
            node.moves.push((*m, expand(next, b, p, allow)));
        }
    }
    for (m, next) in &b.moves {
        if allow(&pos, 1, m) {
            let mut p = pos.clone();
            p.second[m.site] = true;
            node.moves.push((*m, expand(a, next, p, allow)));
        }
    }
    node
}

fn shift(n: &BoardNode, by: usize) -> BoardNode {
    BoardNode {
        moves: n.moves.iter().map(|(m, c)| (BoardMove { player: m.player, site: m.site + by }, shift(c, by))).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_move(player: Player, site: usize) -> BoardNode {
        BoardNode::terminal().with(player, site, BoardNode::terminal())
    }

    #[test]
    fn disjoint_sum_matches_formula() {
        // * on one board, 1 on another.
        let star = BoardGame::new(1, one_move(Player::Left, 0).with(Player::Right, 0, BoardNode::terminal())).unwrap();
        let one = BoardGame::new(1, one_move(Player::Left, 0)).unwrap();
        let sum = board_sum(&star, &one, SumMode::Disjoint).unwrap();
        assert_eq!(sum.cells, 2);
        assert_eq!(sum.root.leaves(), 4);
        let mut s = GameStore::new();
        let (a, b) = (star.value(&mut s), one.value(&mut s));
        let formula = s.add(a, b);
        assert_eq!(sum.value(&mut s), formula);
    }

    #[test]
    fn exclusive_sum_blocks_shared_cell() {
        let g = BoardGame::new(1, one_move(Player::Left, 0)).unwrap();
        let h = BoardGame::new(1, one_move(Player::Right, 0)).unwrap();
        let sum = board_sum(&g, &h, SumMode::Exclusive).unwrap();
        assert_eq!(sum.root.leaves(), 2);
        assert!(sum.root.moves.iter().all(|(_, n)| n.moves.is_empty()));
        let disjoint = board_sum(&g, &h, SumMode::Disjoint).unwrap();
        assert_eq!(disjoint.root.positions(), 5);
        assert_eq!(sum.root.positions(), 3);
    }

    #[test]
    fn exclusive_without_collisions_is_disjoint() {
        let g = BoardGame::new(2, one_move(Player::Left, 0)).unwrap();
        let h = BoardGame::new(2, one_move(Player::Right, 1)).unwrap();
        let ex = board_sum(&g, &h, SumMode::Exclusive).unwrap();
        let free = board_sum_with(&g, &h, |_, _, _| true).unwrap();
        assert_eq!(ex, free);
        let mut s = GameStore::new();
        let (a, b) = (g.value(&mut s), h.value(&mut s));
        let formula = s.add(a, b);
        assert_eq!(ex.value(&mut s), formula);
    }

    #[test]
    fn errors() {
        assert!(matches!(BoardGame::new(1, one_move(Player::Left, 3)), Err(CgtError::SiteOutOfRange { site: 3, cells: 1 })));
        let g = BoardGame::new(1, one_move(Player::Left, 0)).unwrap();
        let h = BoardGame::new(2, one_move(Player::Left, 1)).unwrap();
        assert_eq!(board_sum(&g, &h, SumMode::Exclusive), Err(CgtError::BoardMismatch(1, 2)));
    }
}
