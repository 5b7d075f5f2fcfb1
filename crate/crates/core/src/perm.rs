//! Permutations of a finite carrier `{0..n-1}`, stored as image tables.

/// A bijection of `{0..n-1}` onto itself; `perm[i]` is the image of `i`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm((0..degree).collect())
    }

    /// Accepts `images` only when it is a bijection of `{0..images.len()-1}`.
    pub fn from_images(images: Vec<usize>) -> Option<Self> {
        if !is_bijection(&images, images.len()) {
            return None;
        }
        Some(Perm(images))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn into_images(self) -> Vec<usize> {
        self.0
    }

    /// `self.compose(&g)` applies `g` first: `(self ∘ g)(i) = self(g(i))`.
    pub fn compose(&self, g: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), g.degree());
        Perm(g.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            images[j] = i;
        }
        Perm(images)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }
}

/// True iff `map` restricted to a carrier of size `degree` is a bijection onto it.
pub fn is_bijection(map: &[usize], degree: usize) -> bool {
    if map.len() != degree {
        return false;
    }
    let mut seen = vec![false; degree];
    for &v in map {
        if v >= degree || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}
