//! Elementary cellular automata: Wolfram-numbered rule tables, cyclic
//! space-time evolution, Langton's lambda, wildcard rule simplification, and a
//! two-rule interaction generator.
//!
//! Simplification compresses the 8-entry local rule table into a minimal set
//! of wildcard icons. An icon is a pattern over {0, 1, *} plus an output bit;
//! it is admissible only if every neighborhood it matches already has that
//! output, so the icon set always defines exactly the original rule. The
//! search returns a minimum-cost exact cover per output color: fewest icons,
//! then fewest specified (non-wildcard) cells, then the lexicographically
//! smallest icon set under the per-cell order 0 < 1 < *.

use thiserror::Error;

use crate::bits::{BitGrid, BitString};

/// Wildcard marker in icon patterns; matches both symbols.
pub const WILD: u8 = 2;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EcaError {
    #[error("rule number {0} outside [0,255]")]
    OutOfRange(u32),
    #[error("initial configuration must be non-empty")]
    EmptyInitial,
    #[error("split {split} outside [0,{width}]")]
    SplitOutOfRange { split: usize, width: usize },
}

/// One of the 256 elementary rules. `table[4a+2b+c]` is the output for
/// neighborhood (a,b,c); neighborhood 111 is the most significant bit of the
/// rule number.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct EcaRule {
    number: u8,
    table: [u8; 8],
}

impl EcaRule {
    pub fn number(&self) -> u8 {
        self.number
    }

    pub fn output(&self, a: u8, b: u8, c: u8) -> u8 {
        self.table[(4 * a + 2 * b + c) as usize]
    }

    pub fn table(&self) -> &[u8; 8] {
        &self.table
    }
}

pub fn rule_from_number(n: u32) -> Result<EcaRule, EcaError> {
    if n > 255 {
        return Err(EcaError::OutOfRange(n));
    }
    let mut table = [0u8; 8];
    for (i, out) in table.iter_mut().enumerate() {
        *out = ((n >> i) & 1) as u8;
    }
    Ok(EcaRule { number: n as u8, table })
}

/// Left-right reflection: neighborhood (a,b,c) behaves like (c,b,a) did.
pub fn mirror_rule(rule: &EcaRule) -> EcaRule {
    let mut n = 0u32;
    for i in 0..8u32 {
        let reversed = ((i & 1) << 2) | (i & 2) | (i >> 2);
        n |= u32::from(rule.table[reversed as usize]) << i;
    }
    rule_from_number(n).expect("reflection stays in range")
}

/// Color complement: inputs and output all flipped.
pub fn complement_rule(rule: &EcaRule) -> EcaRule {
    let mut n = 0u32;
    for i in 0..8u32 {
        n |= u32::from(1 - rule.table[(7 - i) as usize]) << i;
    }
    rule_from_number(n).expect("complement stays in range")
}

/// Fraction of neighborhoods with output 1 (non-quiescent density).
pub fn lambda(rule: &EcaRule) -> f64 {
    f64::from(rule.number.count_ones()) / 8.0
}

/// Evolves `initial` for `steps` updates with cyclic boundaries, returning a
/// (steps+1) x width grid whose row 0 is the initial configuration.
pub fn evolve(rule: &EcaRule, initial: &BitString, steps: usize) -> Result<BitGrid, EcaError> {
    interact(rule, rule, initial, steps, 0)
}

/// Evolution where cells with index < split update under `rule_a` and the
/// rest under `rule_b`; neighborhoods read raw cell values across both the
/// split and the cyclic edges.
pub fn interact(
    rule_a: &EcaRule,
    rule_b: &EcaRule,
    initial: &BitString,
    steps: usize,
    split: usize,
) -> Result<BitGrid, EcaError> {
    let width = initial.len();
    if width == 0 {
        return Err(EcaError::EmptyInitial);
    }
    if split > width {
        return Err(EcaError::SplitOutOfRange { split, width });
    }
    let mut cells = Vec::with_capacity((steps + 1) * width);
    cells.extend_from_slice(initial.as_slice());
    for t in 0..steps {
        let prev = t * width;
        for i in 0..width {
            let a = cells[prev + (i + width - 1) % width];
            let b = cells[prev + i];
            let c = cells[prev + (i + 1) % width];
            let rule = if i < split { rule_a } else { rule_b };
            cells.push(rule.output(a, b, c));
        }
    }
    Ok(BitGrid::from_cells(steps + 1, width, cells).expect("dimensions are consistent"))
}

/// A wildcard pattern with its output bit.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Icon {
    pub pattern: [u8; 3],
    pub output: u8,
}

impl Icon {
    pub fn matches(&self, a: u8, b: u8, c: u8) -> bool {
        let n = [a, b, c];
        self.pattern.iter().zip(n).all(|(&p, x)| p == WILD || p == x)
    }

    pub fn specified_cells(&self) -> usize {
        self.pattern.iter().filter(|&&p| p != WILD).count()
    }
}

impl std::fmt::Display for Icon {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &p in &self.pattern {
            f.write_str(match p {
                0 => "0",
                1 => "1",
                _ => "*",
            })?;
        }
        write!(f, ">{}", self.output)
    }
}

/// A rule compressed to its minimal wildcard-icon cover. Icons for output 1
/// come first, then icons for output 0, each group sorted by pattern.
#[derive(Clone, PartialEq, Debug)]
pub struct SimplifiedRule {
    pub icons: Vec<Icon>,
    pub icon_count: usize,
    pub specified_cells: usize,
    pub bits_upper_bound: f64,
}

/// Description length of a simplified rule: each icon spends three symbols
/// from a 3-letter alphabet plus one output bit.
pub fn simplified_bits(s: &SimplifiedRule) -> f64 {
    icon_bits(s.icon_count)
}

fn icon_bits(icon_count: usize) -> f64 {
    icon_count as f64 * (3.0 * 3f64.log2() + 1.0)
}

pub fn simplify(rule: &EcaRule) -> SimplifiedRule {
    let mut icons = Vec::new();
    for output in [1u8, 0u8] {
        icons.extend(minimal_cover(rule, output));
    }
    let icon_count = icons.len();
    let specified_cells = icons.iter().map(Icon::specified_cells).sum();
    SimplifiedRule { icons, icon_count, specified_cells, bits_upper_bound: icon_bits(icon_count) }
}

/// Bitmask over the 8 neighborhoods matched by a pattern.
fn matched_mask(pattern: [u8; 3]) -> u8 {
    let mut mask = 0u8;
    for n in 0..8u8 {
        let cells = [n >> 2 & 1, n >> 1 & 1, n & 1];
        if pattern.iter().zip(cells).all(|(&p, x)| p == WILD || p == x) {
            mask |= 1 << n;
        }
    }
    mask
}

/// All 27 patterns in lexicographic order under 0 < 1 < WILD.
fn all_patterns() -> impl Iterator<Item = [u8; 3]> {
    (0..27u8).map(|k| [k / 9, k / 3 % 3, k % 3])
}

/// Minimum-cost exact cover of one output color by admissible icons, found by
/// breadth-first search over cover sizes. Candidates are pre-sorted, so
/// enumerating index combinations in order visits icon sets in lexicographic
/// order; among covers of the minimal size the one with fewest specified
/// cells (ties: lexicographically smallest set) wins.
fn minimal_cover(rule: &EcaRule, output: u8) -> Vec<Icon> {
    let mut target = 0u8;
    for n in 0..8u8 {
        if rule.table[n as usize] == output {
            target |= 1 << n;
        }
    }
    if target == 0 {
        return Vec::new();
    }
    let candidates: Vec<([u8; 3], u8)> = all_patterns()
        .map(|p| (p, matched_mask(p)))
        .filter(|&(_, m)| m & !target == 0)
        .collect();
    for size in 1..=target.count_ones() as usize {
        let mut best: Option<(usize, Vec<[u8; 3]>)> = None;
        let mut combo = vec![0usize; size];
        combinations(candidates.len(), &mut combo, 0, 0, &mut |combo| {
            let mut covered = 0u8;
            for &i in combo {
                covered |= candidates[i].1;
            }
            if covered != target {
                return;
            }
            let patterns: Vec<[u8; 3]> = combo.iter().map(|&i| candidates[i].0).collect();
            let specified: usize = patterns
                .iter()
                .map(|p| p.iter().filter(|&&c| c != WILD).count())
                .sum();
            let key = (specified, patterns);
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        });
        if let Some((_, patterns)) = best {
            return patterns.into_iter().map(|pattern| Icon { pattern, output }).collect();
        }
    }
    unreachable!("singleton icons always cover");
}

/// Visits every k-combination of 0..n in lexicographic order.
fn combinations(n: usize, combo: &mut Vec<usize>, depth: usize, start: usize, f: &mut impl FnMut(&[usize])) {
    if depth == combo.len() {
        f(combo);
        return;
    }
    for i in start..n {
        combo[depth] = i;
        combinations(n, combo, depth + 1, i + 1, f);
    }
}
