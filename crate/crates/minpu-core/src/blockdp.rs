//! Exact block solver.
//!
//! Within one block, the densest-selection subproblem ("pick as many squares
//! as possible whose union covers exactly k points") is solved by a
//! maximum-weight source-sink path search over sweep-line configurations.
//!
//! Every grid point of the block owns the squares containing it. Two
//! synchronized vertical lines per grid point, one unit apart, sweep left to
//! right. A configuration holds one 5-tuple of square tokens per grid point:
//! the highest/lowest squares cut by the left line, the highest/lowest cut
//! by the right line, and the next square the left line will enter. Virtual
//! `Begin`/`End` tokens flank the real squares of each grid point. A counter
//! tracks how many points the tokens seen so far have covered, and a sweep
//! position orders everything.
//!
//! Positions are symbolic: "just before the right boundary of square s".
//! Square fractional x-parts are pairwise distinct (the genericity
//! contract), so events are totally ordered and every geometric comparison
//! in the search reduces to an integer rank comparison precomputed here.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use crate::error::Error;
use crate::geom::{BlockBox, GridPoint, Instance};

/// A square token of one grid point's tuple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Token {
    /// A real square, by instance index.
    Square(usize),
    /// Virtual square left of all real squares of the grid point.
    Begin(GridPoint),
    /// Virtual square right of all real squares of the grid point.
    End(GridPoint),
}

/// The five tracked tokens of one grid point.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FiveTuple {
    pub s_hl: Token,
    pub s_ll: Token,
    pub s_hr: Token,
    pub s_lr: Token,
    pub s_next: Token,
}

/// Where the synchronized sweep lines stand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SweepPosition {
    /// Right lines on their grid points; nothing stridden yet.
    Start,
    /// Just before the right boundary of this square (by instance index).
    JustBefore(usize),
    /// Right lines one unit past their grid points; all events done.
    Finish,
}

/// A search state: one tuple per active grid point, the covered-point
/// counter, and the sweep position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    pub tuples: BTreeMap<GridPoint, FiveTuple>,
    pub k_tilde: u32,
    pub pos: SweepPosition,
}

/// Test hook: deliberately corrupts the search so harnesses can prove they
/// would catch a wrong implementation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Adds one to every arc weight.
    InflateArcWeight,
}

/// Knobs for the block search.
#[derive(Clone, Copy, Debug)]
pub struct DpConfig {
    /// Hard cap on distinct states; exceeding it is an error, never a
    /// silent approximation.
    pub max_states: usize,
    pub fault: Fault,
}

pub const DEFAULT_MAX_STATES: usize = 2_000_000;

impl Default for DpConfig {
    fn default() -> Self {
        DpConfig {
            max_states: DEFAULT_MAX_STATES,
            fault: Fault::None,
        }
    }
}

const BEGIN: u32 = u32::MAX - 1;
const END: u32 = u32::MAX;

fn is_real(t: u32) -> bool {
    t < BEGIN
}

/// Internal tuple layout: hl, ll, hr, lr, next.
type Tuple = [u32; 5];

const ALL_END: Tuple = [BEGIN, BEGIN, END, END, END];

/// Coverage bitmask over the context's candidate points.
type Mask = Vec<u64>;

fn mask_or(dst: &mut Mask, src: &Mask) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d |= s;
    }
}

fn mask_new_count(new: &Mask, old: &Mask) -> u32 {
    new.iter()
        .zip(old)
        .map(|(n, o)| (n & !o).count_ones())
        .sum()
}

fn mask_count(m: &Mask) -> u32 {
    m.iter().map(|w| w.count_ones()).sum()
}

struct SquareInfo {
    instance_id: usize,
    /// Rank of this square's sweep event (order of fract(lx) block-wide).
    event: u32,
    /// Rank of the square's top boundary among the block squares.
    y_rank: u32,
    cover: Mask,
}

/// Everything the block search needs, precomputed: square lists per grid
/// point (sorted by event), integer ranks replacing all exact-coordinate
/// comparisons, and per-square coverage bitmasks over the candidate points.
pub struct BlockContext {
    pub block: BlockBox,
    squares: Vec<SquareInfo>,
    grid_points: Vec<GridPoint>,
    per_gp: Vec<Vec<u32>>,
    /// Instance point indices covered by at least one block square. The
    /// counter tracks coverage of these, including points outside the block.
    pub candidate_points: Vec<usize>,
    num_events: u32,
    mask_words: usize,
}

impl BlockContext {
    pub fn new(
        instance: &Instance,
        block: BlockBox,
        square_ids: &BTreeSet<usize>,
    ) -> Result<Self, Error> {
        let mut locals: Vec<(usize, GridPoint)> = Vec::with_capacity(square_ids.len());
        for &id in square_ids {
            let s = instance.squares.get(id).ok_or(Error::IndexOutOfRange {
                index: id,
                len: instance.squares.len(),
            })?;
            let g = s.grid_point()?;
            debug_assert!(
                block.contains_grid_point(g),
                "square {} maps outside the block lattice",
                id
            );
            locals.push((id, g));
        }

        let candidate_points: Vec<usize> = {
            let ids: Vec<usize> = square_ids.iter().copied().collect();
            instance.covered_points(ids.iter())?.into_iter().collect()
        };
        let mask_words = candidate_points.len().div_ceil(64).max(1);

        // Event ranks order the right boundaries relative to each square's
        // own grid point, i.e. fract(lx); y ranks order top boundaries.
        let mut by_event: Vec<usize> = (0..locals.len()).collect();
        by_event.sort_by(|&a, &b| {
            let fa = instance.squares[locals[a].0].lx.fract();
            let fb = instance.squares[locals[b].0].lx.fract();
            fa.cmp(&fb).then(locals[a].0.cmp(&locals[b].0))
        });
        let mut event_rank = vec![0u32; locals.len()];
        for (rank, &li) in by_event.iter().enumerate() {
            event_rank[li] = rank as u32;
        }
        let mut by_y: Vec<usize> = (0..locals.len()).collect();
        by_y.sort_by(|&a, &b| {
            let ya = &instance.squares[locals[a].0].ly;
            let yb = &instance.squares[locals[b].0].ly;
            ya.cmp(yb).then(locals[a].0.cmp(&locals[b].0))
        });
        let mut y_rank = vec![0u32; locals.len()];
        for (rank, &li) in by_y.iter().enumerate() {
            y_rank[li] = rank as u32;
        }

        let squares: Vec<SquareInfo> = locals
            .iter()
            .enumerate()
            .map(|(li, &(id, _))| {
                let mut cover = vec![0u64; mask_words];
                let square = &instance.squares[id];
                for (pi, &point_id) in candidate_points.iter().enumerate() {
                    if square.contains(&instance.points[point_id]) {
                        cover[pi / 64] |= 1 << (pi % 64);
                    }
                }
                SquareInfo {
                    instance_id: id,
                    event: event_rank[li],
                    y_rank: y_rank[li],
                    cover,
                }
            })
            .collect();

        let mut grid_points: Vec<GridPoint> = locals.iter().map(|&(_, g)| g).collect();
        grid_points.sort();
        grid_points.dedup();
        let mut per_gp: Vec<Vec<u32>> = vec![Vec::new(); grid_points.len()];
        for (li, &(_, g)) in locals.iter().enumerate() {
            let gi = grid_points.binary_search(&g).unwrap();
            per_gp[gi].push(li as u32);
        }
        for list in &mut per_gp {
            list.sort_by_key(|&li| squares[li as usize].event);
        }

        let num_events = squares.len() as u32;
        Ok(BlockContext {
            block,
            squares,
            grid_points,
            per_gp,
            candidate_points,
            num_events,
            mask_words,
        })
    }

    pub fn grid_points(&self) -> &[GridPoint] {
        &self.grid_points
    }

    pub fn num_candidate_points(&self) -> usize {
        self.candidate_points.len()
    }

    fn finish_code(&self) -> u32 {
        self.num_events + 1
    }

    /// Whether the sweep has moved strictly past the right boundary of
    /// token `s` (positions carry an implicit "just before" offset).
    fn passed(&self, pos_code: u32, s: u32) -> bool {
        match s {
            BEGIN => true,
            END => false,
            _ => {
                if pos_code == 0 {
                    false
                } else if pos_code == self.finish_code() {
                    true
                } else {
                    self.squares[s as usize].event < pos_code - 1
                }
            }
        }
    }

    fn event_of(&self, s: u32) -> Option<u32> {
        is_real(s).then(|| self.squares[s as usize].event)
    }

    /// y(a) <= y(b); virtual tokens satisfy every y-inequality.
    fn y_le(&self, a: u32, b: u32) -> bool {
        if !is_real(a) || !is_real(b) {
            return true;
        }
        self.squares[a as usize].y_rank <= self.squares[b as usize].y_rank
    }

    fn tuple_mask(&self, t: &Tuple) -> Mask {
        let mut m = vec![0u64; self.mask_words];
        for &tok in t {
            if is_real(tok) {
                mask_or(&mut m, &self.squares[tok as usize].cover);
            }
        }
        m
    }

    fn state_mask(&self, tuples: &[Tuple]) -> Mask {
        let mut m = vec![0u64; self.mask_words];
        for t in tuples {
            mask_or(&mut m, &self.tuple_mask(t));
        }
        m
    }

    fn real_set(&self, t: &Tuple) -> BTreeSet<u32> {
        t.iter().copied().filter(|&x| is_real(x)).collect()
    }

    fn token_to_public(&self, g: GridPoint, t: u32) -> Token {
        match t {
            BEGIN => Token::Begin(g),
            END => Token::End(g),
            _ => Token::Square(self.squares[t as usize].instance_id),
        }
    }

    fn token_from_public(&self, gi: usize, tok: &Token) -> Option<u32> {
        let g = self.grid_points[gi];
        match *tok {
            Token::Begin(b) => (b == g).then_some(BEGIN),
            Token::End(e) => (e == g).then_some(END),
            Token::Square(id) => self.per_gp[gi]
                .iter()
                .copied()
                .find(|&li| self.squares[li as usize].instance_id == id),
        }
    }

    fn config_to_public(&self, key: &StateKey) -> Configuration {
        let tuples = self
            .grid_points
            .iter()
            .zip(&key.tuples)
            .map(|(&g, t)| {
                (
                    g,
                    FiveTuple {
                        s_hl: self.token_to_public(g, t[0]),
                        s_ll: self.token_to_public(g, t[1]),
                        s_hr: self.token_to_public(g, t[2]),
                        s_lr: self.token_to_public(g, t[3]),
                        s_next: self.token_to_public(g, t[4]),
                    },
                )
            })
            .collect();
        let pos = if key.pos == 0 {
            SweepPosition::Start
        } else if key.pos == self.finish_code() {
            SweepPosition::Finish
        } else {
            let li = (0..self.squares.len())
                .find(|&li| self.squares[li].event == key.pos - 1)
                .expect("position code maps to an event");
            SweepPosition::JustBefore(self.squares[li].instance_id)
        };
        Configuration {
            tuples,
            k_tilde: key.k,
            pos,
        }
    }

    fn config_from_public(&self, c: &Configuration) -> Option<StateKey> {
        if c.tuples.len() != self.grid_points.len() {
            return None;
        }
        let mut tuples = Vec::with_capacity(self.grid_points.len());
        for (gi, g) in self.grid_points.iter().enumerate() {
            let t = c.tuples.get(g)?;
            tuples.push([
                self.token_from_public(gi, &t.s_hl)?,
                self.token_from_public(gi, &t.s_ll)?,
                self.token_from_public(gi, &t.s_hr)?,
                self.token_from_public(gi, &t.s_lr)?,
                self.token_from_public(gi, &t.s_next)?,
            ]);
        }
        let pos = match c.pos {
            SweepPosition::Start => 0,
            SweepPosition::Finish => self.finish_code(),
            SweepPosition::JustBefore(id) => {
                let li = (0..self.squares.len()).find(|&li| self.squares[li].instance_id == id)?;
                1 + self.squares[li].event
            }
        };
        Some(StateKey {
            pos,
            tuples,
            k: c.k_tilde,
        })
    }

    /// Per-grid-point tuples a search can start from: either nothing is
    /// selected here, or a highest/lowest/next guess over the squares this
    /// grid point owns (all of them are cut by its right line at the start).
    fn initial_tuples_for_gp(&self, gi: usize) -> Vec<Tuple> {
        let mut out = vec![ALL_END];
        let squares = &self.per_gp[gi];
        for &h in squares {
            for &l in squares {
                if !self.y_le(l, h) {
                    continue;
                }
                for &n in squares {
                    if self.y_le(l, n) && self.y_le(n, h) {
                        out.push([BEGIN, BEGIN, h, l, n]);
                    }
                }
            }
        }
        out
    }

    /// All admissible transitions out of a state, with arc weights. Exactly
    /// one grid point's tuple changes: the one whose next event comes first.
    fn enumerate_successors(&self, key: &StateKey) -> Vec<(StateKey, u32)> {
        let tuples = &key.tuples;
        let mut nexts: Vec<(u32, usize)> = tuples
            .iter()
            .enumerate()
            .filter_map(|(gi, t)| self.event_of(t[4]).map(|e| (e, gi)))
            .collect();
        if nexts.is_empty() {
            return Vec::new();
        }
        nexts.sort_unstable();
        let (e_u, gp_star) = nexts[0];
        let second_min = nexts.get(1).map(|&(e, _)| e);

        let tu = tuples[gp_star];
        let here = &self.per_gp[gp_star];
        let mask_u = self.state_mask(tuples);
        let mut mask_others = vec![0u64; self.mask_words];
        for (gi, t) in tuples.iter().enumerate() {
            if gi != gp_star {
                mask_or(&mut mask_others, &self.tuple_mask(t));
            }
        }
        let old_reals = self.real_set(&tu);
        let n_b = self.candidate_points.len() as u32;

        let mut out = Vec::new();
        let next_candidates = here
            .iter()
            .copied()
            .filter(|&s| self.squares[s as usize].event > e_u)
            .chain(core::iter::once(END));
        for nx in next_candidates {
            let pos_event = match (self.event_of(nx), second_min) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (Some(a), None) => Some(a),
                (None, b) => b,
            };
            let pos = match pos_event {
                Some(e) => 1 + e,
                None => self.finish_code(),
            };

            // The whole state must stay admissible at the new position: a
            // right-line token of another grid point may not be overrun.
            let overrun = tuples.iter().enumerate().any(|(gi, t)| {
                gi != gp_star
                    && ((is_real(t[2]) && self.passed(pos, t[2]))
                        || (is_real(t[3]) && self.passed(pos, t[3])))
            });
            if overrun {
                continue;
            }

            // Right-line tokens are kept until the line passes their right
            // boundary, then must be replaced by something still ahead.
            let hr_candidates: Vec<u32> = if !self.passed(pos, tu[2]) {
                vec![tu[2]]
            } else {
                here.iter()
                    .copied()
                    .filter(|&s| !self.passed(pos, s) && self.y_le(s, tu[2]))
                    .chain(core::iter::once(END))
                    .collect()
            };
            let lr_candidates: Vec<u32> = if !self.passed(pos, tu[3]) {
                vec![tu[3]]
            } else {
                here.iter()
                    .copied()
                    .filter(|&s| !self.passed(pos, s) && self.y_le(tu[3], s))
                    .chain(core::iter::once(END))
                    .collect()
            };

            // Left-line tokens move monotonically outward in y and rightward
            // in x, and must sandwich the square just stridden over as well
            // as any right token the line has now passed. They are real from
            // the first stride on: the stridden square is cut by the left
            // line, so a highest and a lowest cut square exist. Keeping a
            // virtual token here would void the y-chains that guarantee a
            // square never re-enters the tuple.
            let hr_u_passed = is_real(tu[2]) && self.passed(pos, tu[2]);
            let lr_u_passed = is_real(tu[3]) && self.passed(pos, tu[3]);
            let mut hl_candidates: Vec<u32> = Vec::new();
            for &s in here {
                if !self.passed(pos, s) {
                    continue;
                }
                if is_real(tu[0])
                    && (self.squares[s as usize].event < self.squares[tu[0] as usize].event
                        || !self.y_le(tu[0], s))
                {
                    continue;
                }
                if !self.y_le(tu[4], s) {
                    continue;
                }
                if hr_u_passed && !self.y_le(tu[2], s) {
                    continue;
                }
                if lr_u_passed && !self.y_le(tu[3], s) {
                    continue;
                }
                hl_candidates.push(s);
            }
            let mut ll_candidates: Vec<u32> = Vec::new();
            for &s in here {
                if !self.passed(pos, s) {
                    continue;
                }
                if is_real(tu[1])
                    && (self.squares[s as usize].event < self.squares[tu[1] as usize].event
                        || !self.y_le(s, tu[1]))
                {
                    continue;
                }
                if !self.y_le(s, tu[4]) {
                    continue;
                }
                if hr_u_passed && !self.y_le(s, tu[2]) {
                    continue;
                }
                if lr_u_passed && !self.y_le(s, tu[3]) {
                    continue;
                }
                ll_candidates.push(s);
            }

            for &hr in &hr_candidates {
                for &lr in &lr_candidates {
                    if !self.y_le(lr, hr) || !self.y_le(lr, nx) || !self.y_le(nx, hr) {
                        continue;
                    }
                    // A grid point with no next event never changes its
                    // tuple again; real right tokens would be stuck forever.
                    if nx == END && (is_real(hr) || is_real(lr)) {
                        continue;
                    }
                    for &hl in &hl_candidates {
                        for &ll in &ll_candidates {
                            if !self.y_le(ll, hl) {
                                continue;
                            }
                            let tv: Tuple = [hl, ll, hr, lr, nx];
                            let new_reals = self.real_set(&tv);
                            let weight = new_reals.difference(&old_reals).count() as u32;
                            let mut mask_v = mask_others.clone();
                            for &tok in &new_reals {
                                mask_or(&mut mask_v, &self.squares[tok as usize].cover);
                            }
                            let k_v = key.k + mask_new_count(&mask_v, &mask_u);
                            if k_v > n_b {
                                continue;
                            }
                            let mut new_tuples = tuples.clone();
                            new_tuples[gp_star] = tv;
                            out.push((
                                StateKey {
                                    pos,
                                    tuples: new_tuples,
                                    k: k_v,
                                },
                                weight,
                            ));
                        }
                    }
                }
            }
        }
        out
    }

    fn is_sink_state(&self, key: &StateKey) -> bool {
        key.pos == self.finish_code()
            && key
                .tuples
                .iter()
                .all(|t| t[2] == END && t[3] == END && t[4] == END)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct StateKey {
    /// 0 = start, 1+e = just before event e, num_events+1 = finish.
    /// First field so that map order is a valid exploration order: every
    /// arc strictly increases the position.
    pos: u32,
    tuples: Vec<Tuple>,
    k: u32,
}

/// Starting configurations with their source-arc weights (the number of
/// distinct real squares guessed). The covered-point counter starts at the
/// exact coverage of those squares.
pub fn initial_configurations(
    ctx: &BlockContext,
    cfg: &DpConfig,
) -> Result<Vec<(Configuration, u32)>, Error> {
    let keys = initial_state_keys(ctx, cfg)?;
    Ok(keys
        .into_iter()
        .map(|(key, w)| (ctx.config_to_public(&key), w))
        .collect())
}

fn initial_state_keys(ctx: &BlockContext, cfg: &DpConfig) -> Result<Vec<(StateKey, u32)>, Error> {
    let per_gp: Vec<Vec<Tuple>> = (0..ctx.grid_points.len())
        .map(|gi| ctx.initial_tuples_for_gp(gi))
        .collect();
    let mut combos: Vec<Vec<Tuple>> = vec![Vec::new()];
    for options in &per_gp {
        let mut grown = Vec::with_capacity(combos.len().saturating_mul(options.len()));
        for prefix in &combos {
            for option in options {
                if grown.len() >= cfg.max_states {
                    return Err(Error::StateBudgetExceeded {
                        states: grown.len() + 1,
                        cap: cfg.max_states,
                    });
                }
                let mut next = prefix.clone();
                next.push(*option);
                grown.push(next);
            }
        }
        combos = grown;
    }
    Ok(combos
        .into_iter()
        .map(|tuples| {
            let weight: u32 = tuples.iter().map(|t| ctx.real_set(t).len() as u32).sum();
            let k = mask_count(&ctx.state_mask(&tuples));
            let all_done = tuples
                .iter()
                .all(|t| t[2] == END && t[3] == END && t[4] == END);
            let pos = if all_done { ctx.finish_code() } else { 0 };
            (StateKey { pos, tuples, k }, weight)
        })
        .collect())
}

/// Admissible transitions out of `u`, with arc weights. Empty when `u` is
/// final, malformed, or has no admissible move.
pub fn successors(ctx: &BlockContext, u: &Configuration) -> Vec<(Configuration, u32)> {
    let Some(key) = ctx.config_from_public(u) else {
        return Vec::new();
    };
    ctx.enumerate_successors(&key)
        .into_iter()
        .map(|(k, w)| (ctx.config_to_public(&k), w))
        .collect()
}

/// Whether `u` can take the final hop for budget `k_b`: all right-line
/// tokens exhausted, sweep finished, and the counter exactly at budget.
pub fn sink_eligible(u: &Configuration, k_b: u32) -> bool {
    u.pos == SweepPosition::Finish
        && u.k_tilde == k_b
        && u.tuples.values().all(|t| {
            matches!(t.s_hr, Token::End(_))
                && matches!(t.s_lr, Token::End(_))
                && matches!(t.s_next, Token::End(_))
        })
}

/// One row of the block table: the best selection covering exactly the
/// entry's point count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockEntry {
    pub weight: u32,
    /// Selected squares, by instance index.
    pub squares: BTreeSet<usize>,
    pub path_len: u32,
    /// The winning configuration sequence, for tracing and validation.
    pub path: Vec<Configuration>,
}

/// Best selections per exact coverage count, plus search statistics.
#[derive(Clone, Debug, Default)]
pub struct BlockSolutionTable {
    pub entries: BTreeMap<u32, BlockEntry>,
    pub states_explored: usize,
}

/// Runs one lazy longest-path search over the configuration graph and
/// returns, for every attainable exact coverage count, the maximum number
/// of squares and a witness selection. Entries are absent where no
/// selection attains that exact count.
pub fn max_weight_paths(ctx: &BlockContext, cfg: &DpConfig) -> Result<BlockSolutionTable, Error> {
    struct Node {
        key: StateKey,
        weight: u32,
        parent: Option<usize>,
    }

    if ctx.grid_points.is_empty() {
        let empty = Configuration {
            tuples: BTreeMap::new(),
            k_tilde: 0,
            pos: SweepPosition::Finish,
        };
        let mut entries = BTreeMap::new();
        entries.insert(
            0,
            BlockEntry {
                weight: 0,
                squares: BTreeSet::new(),
                path_len: 1,
                path: vec![empty],
            },
        );
        return Ok(BlockSolutionTable {
            entries,
            states_explored: 1,
        });
    }

    let inflate = |w: u32| match cfg.fault {
        Fault::InflateArcWeight => w + 1,
        Fault::None => w,
    };

    let mut nodes: Vec<Node> = Vec::new();
    let mut index: BTreeMap<StateKey, usize> = BTreeMap::new();
    for (key, weight) in initial_state_keys(ctx, cfg)? {
        nodes.push(Node {
            key: key.clone(),
            weight: inflate(weight),
            parent: None,
        });
        index.insert(key, nodes.len() - 1);
    }

    // States are processed in key order; arcs strictly increase the
    // position (the leading key field), so a state's value is final when
    // the cursor reaches it.
    let mut cursor: Option<StateKey> = None;
    loop {
        let next_key = match &cursor {
            None => index.keys().next().cloned(),
            Some(k) => index
                .range((
                    core::ops::Bound::Excluded(k.clone()),
                    core::ops::Bound::Unbounded,
                ))
                .map(|(k, _)| k.clone())
                .next(),
        };
        let Some(key) = next_key else { break };
        let uid = index[&key];
        let base = nodes[uid].weight;
        for (succ, arc_w) in ctx.enumerate_successors(&key) {
            debug_assert!(succ.pos > key.pos, "arcs must advance the sweep");
            let cand = base + inflate(arc_w);
            match index.get(&succ) {
                None => {
                    if index.len() >= cfg.max_states {
                        return Err(Error::StateBudgetExceeded {
                            states: index.len() + 1,
                            cap: cfg.max_states,
                        });
                    }
                    nodes.push(Node {
                        key: succ.clone(),
                        weight: cand,
                        parent: Some(uid),
                    });
                    index.insert(succ, nodes.len() - 1);
                }
                Some(&vid) => {
                    if cand > nodes[vid].weight {
                        nodes[vid].weight = cand;
                        nodes[vid].parent = Some(uid);
                    }
                }
            }
        }
        cursor = Some(key);
    }

    let mut entries: BTreeMap<u32, BlockEntry> = BTreeMap::new();
    for (key, &nid) in &index {
        if !ctx.is_sink_state(key) {
            continue;
        }
        let weight = nodes[nid].weight;
        let replace = match entries.get(&key.k) {
            None => true,
            Some(e) => weight > e.weight,
        };
        if !replace {
            continue;
        }
        let mut squares = BTreeSet::new();
        let mut path = Vec::new();
        let mut walk = Some(nid);
        while let Some(id) = walk {
            let node = &nodes[id];
            for t in &node.key.tuples {
                for &tok in t {
                    if is_real(tok) {
                        squares.insert(ctx.squares[tok as usize].instance_id);
                    }
                }
            }
            path.push(ctx.config_to_public(&node.key));
            walk = node.parent;
        }
        path.reverse();
        entries.insert(
            key.k,
            BlockEntry {
                weight,
                squares,
                path_len: path.len() as u32,
                path,
            },
        );
    }
    Ok(BlockSolutionTable {
        entries,
        states_explored: nodes.len(),
    })
}

/// Path audit result: per-arc weights (source arc first, sink arc last),
/// the distinct squares seen, and whether the two counting identities hold:
/// total weight = number of distinct squares, and final counter = exact
/// number of distinct covered points.
#[derive(Clone, Debug)]
pub struct PathReport {
    pub arc_weights: Vec<u32>,
    pub total_weight: u32,
    pub squares: BTreeSet<usize>,
    pub k_tilde_final: u32,
    pub covered_points: u32,
    pub violation: Option<String>,
}

impl PathReport {
    pub fn ok(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks a configuration sequence: the first must be a legal starting
/// configuration, each consecutive pair an admissible transition, and the
/// last fit for the final hop. Then audits the counting identities.
pub fn validate_path(ctx: &BlockContext, path: &[Configuration]) -> Result<PathReport, Error> {
    if path.is_empty() {
        return Err(Error::NotAPath {
            step: 0,
            reason: String::from("empty path"),
        });
    }
    let keys: Vec<StateKey> = path
        .iter()
        .enumerate()
        .map(|(i, c)| {
            ctx.config_from_public(c).ok_or(Error::NotAPath {
                step: i,
                reason: String::from("configuration does not fit the block"),
            })
        })
        .collect::<Result<_, _>>()?;

    let initials = initial_state_keys(ctx, &DpConfig::default())?;
    let source_weight = initials
        .iter()
        .find(|(k, _)| *k == keys[0])
        .map(|&(_, w)| w)
        .ok_or(Error::NotAPath {
            step: 0,
            reason: String::from("not a starting configuration"),
        })?;

    let mut arc_weights = vec![source_weight];
    for i in 1..keys.len() {
        let succs = ctx.enumerate_successors(&keys[i - 1]);
        let arc = succs
            .iter()
            .find(|(k, _)| *k == keys[i])
            .map(|&(_, w)| w)
            .ok_or(Error::NotAPath {
                step: i,
                reason: String::from("inadmissible transition"),
            })?;
        arc_weights.push(arc);
    }
    let last = keys.last().expect("nonempty");
    if !ctx.is_sink_state(last) {
        return Err(Error::NotAPath {
            step: keys.len() - 1,
            reason: String::from("final configuration cannot reach the sink"),
        });
    }
    arc_weights.push(0); // sink arc

    let mut squares = BTreeSet::new();
    let mut union_mask = vec![0u64; ctx.mask_words];
    for key in &keys {
        for t in &key.tuples {
            for &tok in t {
                if is_real(tok) {
                    squares.insert(ctx.squares[tok as usize].instance_id);
                    mask_or(&mut union_mask, &ctx.squares[tok as usize].cover);
                }
            }
        }
    }
    let total_weight: u32 = arc_weights.iter().sum();
    let covered_points = mask_count(&union_mask);
    let k_tilde_final = last.k;

    let mut violation = None;
    if total_weight != squares.len() as u32 {
        violation = Some(format!(
            "weight {} != distinct squares {}",
            total_weight,
            squares.len()
        ));
    } else if k_tilde_final != covered_points {
        violation = Some(format!(
            "final counter {} != covered points {}",
            k_tilde_final, covered_points
        ));
    }
    Ok(PathReport {
        arc_weights,
        total_weight,
        squares,
        k_tilde_final,
        covered_points,
        violation,
    })
}

/// Renders a validated path as one line per transition with a stable field
/// order: event, changed grid point, new tuple, newly counted points, arc
/// weight.
pub fn trace_path(ctx: &BlockContext, path: &[Configuration]) -> Result<Vec<String>, Error> {
    let report = validate_path(ctx, path)?;
    let mut lines = Vec::new();
    for i in 1..path.len() {
        let (prev, cur) = (&path[i - 1], &path[i]);
        let changed = cur
            .tuples
            .iter()
            .find(|(g, t)| prev.tuples.get(g) != Some(t));
        let (gp, tuple) = match changed {
            Some((g, t)) => (format!("{},{}", g.gx, g.gy), render_tuple(t)),
            None => (String::from("-"), String::from("-")),
        };
        let event = match cur.pos {
            SweepPosition::Start => String::from("start"),
            SweepPosition::JustBefore(s) => format!("s{}", s),
            SweepPosition::Finish => String::from("finish"),
        };
        lines.push(format!(
            "event={} grid_point={} tuple={} delta_points={} arc_weight={}",
            event,
            gp,
            tuple,
            cur.k_tilde - prev.k_tilde,
            report.arc_weights[i],
        ));
    }
    Ok(lines)
}

fn render_token(t: &Token) -> String {
    match t {
        Token::Square(id) => format!("s{}", id),
        Token::Begin(_) => String::from("B"),
        Token::End(_) => String::from("E"),
    }
}

fn render_tuple(t: &FiveTuple) -> String {
    format!(
        "({},{},{},{};{})",
        render_token(&t.s_hl),
        render_token(&t.s_ll),
        render_token(&t.s_hr),
        render_token(&t.s_lr),
        render_token(&t.s_next)
    )
}
