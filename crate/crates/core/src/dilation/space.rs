use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Default bound on the total dimension of a truncated space.
pub const DIM_CAP: usize = 4096;

/// One summand `E^a ⊗ F^b ⊗ H_l` of the graded space, `l = max(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grade {
    pub a: usize,
    pub b: usize,
    pub level: usize,
    /// Offset of the grade inside its level block.
    pub offset: usize,
    pub e_words: usize,
    pub f_words: usize,
    /// Dimension of the coefficient space `H_l`.
    pub h: usize,
}

impl Grade {
    pub fn dim(&self) -> usize {
        self.e_words * self.f_words * self.h
    }

    /// Position of `e_we ⊗ f_wf ⊗ h` inside the grade.
    pub fn local(&self, we: usize, wf: usize, h: usize) -> usize {
        debug_assert!(we < self.e_words && wf < self.f_words && h < self.h);
        (we * self.f_words + wf) * self.h + h
    }
}

/// Basis label of the graded space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Label {
    pub a: usize,
    pub b: usize,
    pub e_word: usize,
    pub f_word: usize,
    pub h: usize,
}

/// `⊕_{max(a,b) ≤ L} E^a ⊗ F^b ⊗ H_{max(a,b)}` with `E = C^n`, `F = C^m`.
///
/// Basis order: level, then `(a, b)` lexicographically, then the `E` word,
/// the `F` word and the coefficient index. Level `l` holds the grades
/// `(0,l), …, (l−1,l), (l,0), …, (l,l)`. The coefficient spaces are
/// `H_l = C^{d (1+μ)^l}` with `H_l` the leading coordinates of `H_{l+1}`.
#[derive(Debug, Clone)]
pub struct GradedFockSpace {
    n: usize,
    m: usize,
    d: usize,
    mu: usize,
    depth: usize,
    grades: Vec<Grade>,
    level_sizes: Vec<usize>,
    level_offsets: Vec<usize>,
}

fn too_large(size: usize, cap: usize) -> Error {
    Error::TooLarge {
        what: "graded space dimension",
        size,
        cap,
    }
}

impl GradedFockSpace {
    pub fn new(n: usize, m: usize, d: usize, depth: usize, mu: usize, cap: usize) -> Result<Self> {
        if n == 0 || m == 0 || d == 0 {
            return Err(Error::invalid("space dimensions must be positive"));
        }
        let pow = |base: usize, e: usize| base.checked_pow(e as u32).ok_or(too_large(usize::MAX, cap));
        let mut grades = Vec::new();
        let mut level_sizes = Vec::with_capacity(depth + 1);
        let mut level_offsets = Vec::with_capacity(depth + 1);
        let mut total = 0usize;
        for level in 0..=depth {
            let h = pow(1 + mu, level)?
                .checked_mul(d)
                .ok_or(too_large(usize::MAX, cap))?;
            let mut offset = 0usize;
            let pairs = (0..level)
                .map(|a| (a, level))
                .chain((0..=level).map(|b| (level, b)));
            for (a, b) in pairs {
                let g = Grade {
                    a,
                    b,
                    level,
                    offset,
                    e_words: pow(n, a)?,
                    f_words: pow(m, b)?,
                    h,
                };
                let dim = g
                    .e_words
                    .checked_mul(g.f_words)
                    .and_then(|x| x.checked_mul(h))
                    .ok_or(too_large(usize::MAX, cap))?;
                offset = offset.checked_add(dim).ok_or(too_large(usize::MAX, cap))?;
                grades.push(g);
            }
            level_offsets.push(total);
            level_sizes.push(offset);
            total = total.checked_add(offset).ok_or(too_large(usize::MAX, cap))?;
            if total > cap {
                return Err(too_large(total, cap));
            }
        }
        Ok(GradedFockSpace {
            n,
            m,
            d,
            mu,
            depth,
            grades,
            level_sizes,
            level_offsets,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Dimension of `H = H_0`.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn mu(&self) -> usize {
        self.mu
    }

    /// Truncation level `L`.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn dim(&self) -> usize {
        self.level_sizes.iter().sum()
    }

    pub fn level_sizes(&self) -> &[usize] {
        &self.level_sizes
    }

    pub fn level_offsets(&self) -> &[usize] {
        &self.level_offsets
    }

    pub fn grades(&self) -> &[Grade] {
        &self.grades
    }

    pub fn grade(&self, a: usize, b: usize) -> &Grade {
        let level = a.max(b);
        assert!(level <= self.depth, "grade ({a},{b}) beyond truncation");
        let pos = if a < level { a } else { level + b };
        &self.grades[level * level + pos]
    }

    pub fn level_grades(&self, level: usize) -> &[Grade] {
        &self.grades[level * level..(level + 1) * (level + 1)]
    }

    pub fn global(&self, a: usize, b: usize, we: usize, wf: usize, h: usize) -> usize {
        let g = self.grade(a, b);
        self.level_offsets[g.level] + g.offset + g.local(we, wf, h)
    }

    pub fn label(&self, index: usize) -> Label {
        assert!(index < self.dim(), "index out of range");
        let level = self.level_offsets.iter().rposition(|&o| o <= index).unwrap_or(0);
        let mut rest = index - self.level_offsets[level];
        for g in self.level_grades(level) {
            if rest < g.dim() {
                let h = rest % g.h;
                let word = rest / g.h;
                return Label {
                    a: g.a,
                    b: g.b,
                    e_word: word / g.f_words,
                    f_word: word % g.f_words,
                    h,
                };
            }
            rest -= g.dim();
        }
        unreachable!("level sizes cover their grades")
    }

    /// Isometric embedding of `H` as level 0.
    pub fn embedding(&self) -> ComplexMatrix {
        let mut w = ComplexMatrix::zeros(self.dim(), self.d);
        for h in 0..self.d {
            w[(h, h)] = crate::linalg::C64::new(1.0, 0.0);
        }
        w
    }
}
