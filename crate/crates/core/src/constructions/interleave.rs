//! Stagewise construction of two bijections `π_0, π_1 : ω → dom(N_α)` with
//! `π_0⁻¹[Z_i] ∩ π_1⁻¹[Z_j]` infinite for all `i, j`.
//!
//! Stage `n` defines `π_0(n)` and `π_1(n)`. Every `COMPLETION_PERIOD`-th stage
//! assigns the least unused point of the canonical enumeration on each side;
//! the others follow a round-robin schedule whose round `R` visits every pair
//! `(i, j) ∈ [0, R]²` once, and send `n` to fresh points of `Z_i` and `Z_j`.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::zfamily::{z_family, ZFamily};
use super::ConstructionError;
use crate::domain::{enumerate, enumeration_index, Point};

pub const COMPLETION_PERIOD: u64 = 3;

#[derive(Debug, Clone)]
pub struct InterleavedPair {
    z: ZFamily,
    maps: [Vec<Point>; 2],
    inverse: [HashMap<Point, u64>; 2],
    next_in_line: [HashMap<u64, u64>; 2],
    cursor: [u64; 2],
    round: u64,
    position: u64,
}

impl InterleavedPair {
    pub fn new(alpha: usize) -> Result<Self, ConstructionError> {
        Ok(InterleavedPair {
            z: z_family(alpha)?,
            maps: [Vec::new(), Vec::new()],
            inverse: [HashMap::new(), HashMap::new()],
            next_in_line: [HashMap::new(), HashMap::new()],
            cursor: [0, 0],
            round: 0,
            position: 0,
        })
    }

    pub fn alpha(&self) -> usize {
        self.z.gamma()
    }

    pub fn zfamily(&self) -> &ZFamily {
        &self.z
    }

    /// Number of stages built so far.
    pub fn stages(&self) -> u64 {
        self.maps[0].len() as u64
    }

    fn assign(&mut self, side: usize, p: Point) {
        let n = self.maps[side].len() as u64;
        self.inverse[side].insert(p.clone(), n);
        self.maps[side].push(p);
    }

    fn least_unused(&mut self, side: usize) -> Result<Point, ConstructionError> {
        let d = self.z.domain();
        loop {
            let p = enumerate(&d, self.cursor[side])?;
            if !self.inverse[side].contains_key(&p) {
                return Ok(p);
            }
            self.cursor[side] += 1;
        }
    }

    fn next_unused_in(&mut self, side: usize, line: u64) -> Result<Point, ConstructionError> {
        let mut k = self.next_in_line[side].get(&line).copied().unwrap_or(0);
        loop {
            let p = self.z.point(line, k)?;
            k += 1;
            if !self.inverse[side].contains_key(&p) {
                self.next_in_line[side].insert(line, k);
                return Ok(p);
            }
        }
    }

    fn scheduled_pair(&mut self) -> (u64, u64) {
        let width = self.round + 1;
        let pair = (self.position / width, self.position % width);
        self.position += 1;
        if self.position == width * width {
            self.round += 1;
            self.position = 0;
        }
        pair
    }

    fn step(&mut self) -> Result<(), ConstructionError> {
        let n = self.stages();
        if (n + 1).is_multiple_of(COMPLETION_PERIOD) {
            for side in 0..2 {
                let p = self.least_unused(side)?;
                self.assign(side, p);
            }
        } else {
            let (i, j) = self.scheduled_pair();
            let p0 = self.next_unused_in(0, i)?;
            let p1 = self.next_unused_in(1, j)?;
            self.assign(0, p0);
            self.assign(1, p1);
        }
        Ok(())
    }

    /// Builds stages until `π_k(n)` is defined for every `n < stages`.
    pub fn ensure(&mut self, stages: u64) -> Result<(), ConstructionError> {
        while self.stages() < stages {
            self.step()?;
        }
        Ok(())
    }

    pub fn pi(&mut self, side: usize, n: u64) -> Result<Point, ConstructionError> {
        self.ensure(n + 1)?;
        Ok(self.maps[side][n as usize].clone())
    }

    /// `π_side⁻¹(p)`, growing the tables until a completion stage reaches `p`.
    pub fn preimage(&mut self, side: usize, p: &Point) -> Result<u64, ConstructionError> {
        let e = enumeration_index(&self.z.domain(), p)?;
        let limit = COMPLETION_PERIOD
            .checked_mul(e + 1)
            .ok_or(ConstructionError::Overflow("preimage search"))?;
        loop {
            if let Some(&n) = self.inverse[side].get(p) {
                return Ok(n);
            }
            if self.stages() >= limit {
                return Err(ConstructionError::Precondition(format!(
                    "{p} unassigned after {limit} stages"
                )));
            }
            self.step()?;
        }
    }

    /// The prefix `π_side(0..n)`.
    pub fn prefix(&mut self, side: usize, n: u64) -> Result<&[Point], ConstructionError> {
        self.ensure(n)?;
        Ok(&self.maps[side][..n as usize])
    }

    /// Whether the first `len` points of the canonical enumeration are in the range of `π_side`.
    pub fn covers_enumeration(&self, side: usize, len: u64) -> Result<bool, ConstructionError> {
        let d = self.z.domain();
        for e in 0..len {
            if !self.inverse[side].contains_key(&enumerate(&d, e)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `|π_0⁻¹[Z_i] ∩ π_1⁻¹[Z_j] ∩ [0, bound)|` for `i, j < lines`.
    pub fn joint_table(&mut self, lines: u64, bound: u64) -> Result<Vec<Vec<u64>>, ConstructionError> {
        self.ensure(bound)?;
        let mut table = vec![vec![0; lines as usize]; lines as usize];
        for n in 0..bound as usize {
            let (i, _) = self.z.locate(&self.maps[0][n])?;
            let (j, _) = self.z.locate(&self.maps[1][n])?;
            if i < lines && j < lines {
                table[i as usize][j as usize] += 1;
            }
        }
        Ok(table)
    }

    /// Scheduled allocations to `(i, j)` guaranteed among the first `stages` stages.
    pub fn guaranteed_joint(i: u64, j: u64, stages: u64) -> u64 {
        let scheduled = stages - stages / COMPLETION_PERIOD;
        // rounds 0..R use Σ_{r<R} (r+1)² stages and visit (i, j) once each from round max(i, j) on
        let (mut used, mut r, mut complete) = (0u64, 0u64, 0u64);
        loop {
            let cost = (r + 1) * (r + 1);
            if used + cost > scheduled {
                break;
            }
            used += cost;
            if r >= i.max(j) {
                complete += 1;
            }
            r += 1;
        }
        complete
    }

    /// One text line per stage: `n: π_0(n) π_1(n)`.
    pub fn grid(&mut self, stages: u64) -> Result<String, ConstructionError> {
        self.ensure(stages)?;
        let mut out = String::new();
        for n in 0..stages as usize {
            writeln!(out, "{n}: {} {}", self.maps[0][n], self.maps[1][n]).expect("write to string");
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;

    #[test]
    fn prefixes_are_injective() {
        let mut p = InterleavedPair::new(2).unwrap();
        for side in 0..2 {
            let pts: HashSet<Point> = p.prefix(side, 3000).unwrap().iter().cloned().collect();
            assert_eq!(pts.len(), 3000);
        }
    }

    #[test]
    fn completion_stages_cover_the_enumeration() {
        let mut p = InterleavedPair::new(1).unwrap();
        p.ensure(COMPLETION_PERIOD * 200).unwrap();
        assert!(p.covers_enumeration(0, 200).unwrap());
        assert!(p.covers_enumeration(1, 200).unwrap());
    }

    #[test]
    fn preimage_inverts_pi() {
        let mut p = InterleavedPair::new(2).unwrap();
        for n in 0..300 {
            let q = p.pi(1, n).unwrap();
            assert_eq!(p.preimage(1, &q).unwrap(), n);
        }
        let far = p.zfamily().point(40, 40).unwrap();
        let n = p.preimage(0, &far).unwrap();
        assert_eq!(p.pi(0, n).unwrap(), far);
    }

    #[test]
    fn joint_counts_dominate_the_schedule() {
        let mut p = InterleavedPair::new(1).unwrap();
        let t = p.joint_table(6, 2000).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let g = InterleavedPair::guaranteed_joint(i, j, 2000);
                assert!(g >= 1);
                assert!(t[i as usize][j as usize] >= g, "({i},{j})");
            }
        }
    }

    #[test]
    fn grid_lists_stages() {
        let mut p = InterleavedPair::new(1).unwrap();
        let g = p.grid(3).unwrap();
        assert_eq!(g.lines().count(), 3);
        assert!(g.starts_with("0: 0 0\n"));
    }
}
