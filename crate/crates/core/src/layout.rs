//! Mode indexing and the quartet partition.
//!
//! Fermionic modes are numbered site-major, internal-mode-minor. Each mode
//! `p` owns two Majorana operators: the position-type `c = a† + a` and the
//! momentum-type `c' = -i(a† - a)`. Majorana indices are laid out per
//! quartet: the 8 indices of a quartet are contiguous, first the four
//! c-type ones (in quartet mode order), then the four c'-type ones, so that
//! block formulas for the reference state apply literally blockwise. Modes
//! outside any quartet are appended after all quartet blocks as adjacent
//! (c, c') pairs.

use crate::error::{Error, Result};

/// Which of the two Majorana operators of a mode an index refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MajoranaKind {
    /// `a† + a`
    Position,
    /// `-i (a† - a)`
    Momentum,
}

/// Maps lattice sites and internal modes to fermionic mode indices and
/// Majorana index pairs, and owns the quartet partition.
#[derive(Debug, Clone)]
pub struct ModeLayout {
    n_sites: usize,
    modes_per_site: usize,
    quartets: Vec<[usize; 4]>,
    /// mode -> (c index, c' index)
    pair_of_mode: Vec<(usize, usize)>,
    /// majorana index -> (mode, kind)
    mode_of_majorana: Vec<(usize, MajoranaKind)>,
    /// mode -> (quartet, position within quartet)
    quartet_of_mode: Vec<Option<(usize, usize)>>,
}

impl ModeLayout {
    pub fn new(n_sites: usize, modes_per_site: usize, quartets: Vec<[usize; 4]>) -> Result<Self> {
        let m_tot = n_sites * modes_per_site;
        if m_tot == 0 {
            return Err(Error::Layout("layout has no modes".into()));
        }
        let mut quartet_of_mode: Vec<Option<(usize, usize)>> = vec![None; m_tot];
        for (q, quartet) in quartets.iter().enumerate() {
            for (j, &p) in quartet.iter().enumerate() {
                if p >= m_tot {
                    return Err(Error::Layout(format!(
                        "quartet {q} references mode {p}, but there are only {m_tot} modes"
                    )));
                }
                if quartet_of_mode[p].is_some() {
                    return Err(Error::Layout(format!("mode {p} appears in more than one quartet")));
                }
                quartet_of_mode[p] = Some((q, j));
            }
        }

        let n_q = quartets.len();
        let mut pair_of_mode = vec![(0, 0); m_tot];
        let mut free_rank = 0;
        for p in 0..m_tot {
            match quartet_of_mode[p] {
                Some((q, j)) => pair_of_mode[p] = (8 * q + j, 8 * q + 4 + j),
                None => {
                    let base = 8 * n_q + 2 * free_rank;
                    pair_of_mode[p] = (base, base + 1);
                    free_rank += 1;
                }
            }
        }
        let d = 2 * m_tot;
        let mut mode_of_majorana = vec![(0, MajoranaKind::Position); d];
        for (p, &(kx, kp)) in pair_of_mode.iter().enumerate() {
            mode_of_majorana[kx] = (p, MajoranaKind::Position);
            mode_of_majorana[kp] = (p, MajoranaKind::Momentum);
        }

        Ok(Self { n_sites, modes_per_site, quartets, pair_of_mode, mode_of_majorana, quartet_of_mode })
    }

    /// Layout with every mode free (no quartets).
    pub fn without_quartets(n_sites: usize, modes_per_site: usize) -> Result<Self> {
        Self::new(n_sites, modes_per_site, Vec::new())
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn modes_per_site(&self) -> usize {
        self.modes_per_site
    }

    /// Total number of fermionic modes.
    pub fn n_modes(&self) -> usize {
        self.n_sites * self.modes_per_site
    }

    /// Majorana space dimension, `2 * n_modes`.
    pub fn dim(&self) -> usize {
        2 * self.n_modes()
    }

    pub fn n_quartets(&self) -> usize {
        self.quartets.len()
    }

    pub fn quartets(&self) -> &[[usize; 4]] {
        &self.quartets
    }

    /// True when the quartets partition the full mode set.
    pub fn fully_quarteted(&self) -> bool {
        4 * self.quartets.len() == self.n_modes()
    }

    pub fn mode_index(&self, site: usize, internal_mode: usize) -> usize {
        debug_assert!(site < self.n_sites && internal_mode < self.modes_per_site);
        site * self.modes_per_site + internal_mode
    }

    /// Majorana index pair `(c, c')` of a mode.
    pub fn majorana_pair(&self, mode: usize) -> (usize, usize) {
        self.pair_of_mode[mode]
    }

    pub fn majorana_to_mode(&self, index: usize) -> (usize, MajoranaKind) {
        self.mode_of_majorana[index]
    }

    pub fn quartet_of_mode(&self, mode: usize) -> Option<(usize, usize)> {
        self.quartet_of_mode[mode]
    }

    /// First Majorana index of quartet `q`; the block is `base..base + 8`.
    pub fn quartet_majorana_base(&self, q: usize) -> usize {
        8 * q
    }
}
