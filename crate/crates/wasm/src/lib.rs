//! Browser bindings: render evolutions to RGBA pixel buffers and expose rule
//! summaries and perturbation profiles as JSON for the demo page.
//!
//! The (3,2) CTM table ships embedded so BDM works without a network fetch;
//! a test pins it to a fresh enumeration. All `_impl` functions are plain
//! Rust and run on any target; the thin exported wrappers only adapt errors.

use std::sync::OnceLock;

use wasm_bindgen::prelude::*;

use aidlab_core::aid::{row_impact_profile, ProfileMode};
use aidlab_core::bench::WolframClassTable;
use aidlab_core::bits::{BitGrid, BitString};
use aidlab_core::complexity::{bdm_grid, BlockTable, CtmEstimator, FallbackPolicy};
use aidlab_core::eca::{interact, lambda, rule_from_number, simplify};
use aidlab_core::io::{fmt_sig6, load_ctm_table, LoadedTable};

const CELL_ON: [u8; 4] = [30, 41, 59, 255];
const CELL_OFF: [u8; 4] = [248, 250, 252, 255];

fn estimator() -> &'static CtmEstimator {
    static EST: OnceLock<CtmEstimator> = OnceLock::new();
    EST.get_or_init(|| {
        let table = match load_ctm_table(include_str!("../data/ctm32.ctm").as_bytes()) {
            Ok(LoadedTable::OneD(t)) => t,
            _ => unreachable!("embedded table is a valid 1D table"),
        };
        CtmEstimator::new(BlockTable::OneD(table), FallbackPolicy::MaxPlusOne)
            .expect("embedded table is non-empty")
    })
}

fn initial_row(width: usize, random_init: bool, seed: u64) -> Result<BitString, String> {
    if width == 0 || width > 4096 {
        return Err("width must be within 1..=4096".to_string());
    }
    if random_init {
        // the same stream the bench harness uses
        use aidlab_core::bench::{BenchConfig, InitialCondition};
        let cfg = BenchConfig {
            width,
            steps: 0,
            seed,
            initial: InitialCondition::SeededRandom,
            d: 1,
        };
        Ok(cfg.initial_row())
    } else {
        let mut bits = vec![0u8; width];
        bits[width / 2] = 1;
        Ok(BitString::from_bits(bits).expect("bits are 0/1"))
    }
}

fn grid_rgba(grid: &BitGrid) -> Vec<u8> {
    let mut out = Vec::with_capacity(grid.rows() * grid.cols() * 4);
    for r in 0..grid.rows() {
        for c in 0..grid.cols() {
            let px = if grid.get(r, c) == 1 { CELL_ON } else { CELL_OFF };
            out.extend_from_slice(&px);
        }
    }
    out
}

pub fn interact_rgba_impl(
    rule_a: u8,
    rule_b: u8,
    split: usize,
    width: usize,
    steps: usize,
    random_init: bool,
    seed: u64,
) -> Result<Vec<u8>, String> {
    if steps > 4096 {
        return Err("steps must be at most 4096".to_string());
    }
    if split > width {
        return Err("split must not exceed width".to_string());
    }
    let a = rule_from_number(u32::from(rule_a)).map_err(|e| e.to_string())?;
    let b = rule_from_number(u32::from(rule_b)).map_err(|e| e.to_string())?;
    let init = initial_row(width, random_init, seed)?;
    let grid = interact(&a, &b, &init, steps, split).map_err(|e| e.to_string())?;
    Ok(grid_rgba(&grid))
}

pub fn evolve_rgba_impl(
    rule: u8,
    width: usize,
    steps: usize,
    random_init: bool,
    seed: u64,
) -> Result<Vec<u8>, String> {
    interact_rgba_impl(rule, rule, 0, width, steps, random_init, seed)
}

pub fn rule_summary_json_impl(rule: u8) -> String {
    let r = rule_from_number(u32::from(rule)).expect("u8 is always in range");
    let s = simplify(&r);
    let icons: Vec<String> = s.icons.iter().map(|i| format!("\"{i}\"")).collect();
    format!(
        "{{\"rule\":{},\"class\":{},\"lambda\":{},\"icon_count\":{},\"specified_cells\":{},\
         \"bits_upper_bound\":{},\"icons\":[{}]}}",
        rule,
        WolframClassTable::builtin().class_of(rule),
        fmt_sig6(lambda(&r)),
        s.icon_count,
        s.specified_cells,
        fmt_sig6(s.bits_upper_bound),
        icons.join(",")
    )
}

/// BDM row-impact profile of a 32x32 evolution of `rule` from a centered 1,
/// with row replacements drawn from `seed`.
pub fn impact_profile_json_impl(rule: u8, seed: u64) -> Result<String, String> {
    let r = rule_from_number(u32::from(rule)).map_err(|e| e.to_string())?;
    let init = initial_row(32, false, 0)?;
    let grid = interact(&r, &r, &init, 31, 0).map_err(|e| e.to_string())?;
    let est = estimator();
    let bdm = bdm_grid(est, &grid, 4).map_err(|e| e.to_string())?;
    let impacts = row_impact_profile(est, &grid, 4, ProfileMode::ReplaceRandom { seed })
        .map_err(|e| e.to_string())?;
    let rendered: Vec<String> = impacts.iter().map(|&v| fmt_sig6(v)).collect();
    let threshold = (32.0f64 * 32.0).log2();
    Ok(format!(
        "{{\"rule\":{rule},\"bdm\":{},\"threshold\":{},\"impacts\":[{}]}}",
        fmt_sig6(bdm.value),
        fmt_sig6(threshold),
        rendered.join(",")
    ))
}

#[wasm_bindgen]
pub fn evolve_rgba(
    rule: u8,
    width: usize,
    steps: usize,
    random_init: bool,
    seed: u64,
) -> Result<Vec<u8>, JsError> {
    evolve_rgba_impl(rule, width, steps, random_init, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn interact_rgba(
    rule_a: u8,
    rule_b: u8,
    split: usize,
    width: usize,
    steps: usize,
    random_init: bool,
    seed: u64,
) -> Result<Vec<u8>, JsError> {
    interact_rgba_impl(rule_a, rule_b, split, width, steps, random_init, seed)
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn rule_summary_json(rule: u8) -> String {
    rule_summary_json_impl(rule)
}

#[wasm_bindgen]
pub fn impact_profile_json(rule: u8, seed: u64) -> Result<String, JsError> {
    impact_profile_json_impl(rule, seed).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use aidlab_core::turing::{build_ctm_table_parallel, TmSpace};

    // the shipped asset must stay in sync with the enumerator
    #[test]
    fn embedded_table_matches_a_fresh_build() {
        let fresh =
            build_ctm_table_parallel(&TmSpace::new(3, 22).unwrap(), None, 8).unwrap();
        let embedded = match load_ctm_table(include_str!("../data/ctm32.ctm").as_bytes()) {
            Ok(LoadedTable::OneD(t)) => t,
            other => panic!("embedded table failed to load: {other:?}"),
        };
        assert_eq!(embedded, fresh);
    }

    #[test]
    fn rgba_buffer_has_one_pixel_per_cell() {
        let px = evolve_rgba_impl(30, 64, 48, false, 0).unwrap();
        assert_eq!(px.len(), 64 * 49 * 4);
        let first_row_on: usize =
            (0..64).filter(|c| px[c * 4] == CELL_ON[0]).count();
        assert_eq!(first_row_on, 1, "single-1 initial row");
    }

    #[test]
    fn seeded_random_render_is_deterministic() {
        let a = evolve_rgba_impl(110, 80, 60, true, 9).unwrap();
        let b = evolve_rgba_impl(110, 80, 60, true, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn summary_json_carries_the_known_rule_110_facts() {
        let json = rule_summary_json_impl(110);
        assert!(json.contains("\"rule\":110"));
        assert!(json.contains("\"class\":4"));
        assert!(json.contains("\"icon_count\":5"));
        assert!(json.contains("\"lambda\":0.625000"));
    }

    #[test]
    fn impact_profile_has_one_entry_per_row() {
        let json = impact_profile_json_impl(30, 1).unwrap();
        assert!(json.contains("\"threshold\":10.0000"));
        assert!(json.matches(',').count() >= 32);
        let impacts = json.split("\"impacts\":[").nth(1).unwrap();
        assert_eq!(impacts.trim_end_matches("]}").split(',').count(), 32);
    }

    #[test]
    fn out_of_range_arguments_are_rejected() {
        assert!(evolve_rgba_impl(30, 0, 10, false, 0).is_err());
        assert!(evolve_rgba_impl(30, 10, 5000, false, 0).is_err());
        assert!(interact_rgba_impl(30, 90, 11, 10, 10, false, 0).is_err());
    }
}
