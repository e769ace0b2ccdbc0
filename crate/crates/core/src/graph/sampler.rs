//! Cumulative-weight samplers for the attachment step.
//!
//! Vertex `i` carries weight `degree(i) + δ`. The cumulative weight of the
//! first `i` vertices is evaluated as `S_i + i·δ` with the integer prefix
//! degree sum `S_i` held exactly, so the naive scan and the Fenwick-tree
//! descent compare bit-identical values against the same uniform draw and
//! therefore pick the same vertex.

/// `S_i + i·δ`, the one place cumulative weights are formed.
#[inline]
fn cumulative_weight(prefix_degree: u64, i: usize, delta: f64) -> f64 {
    prefix_degree as f64 + i as f64 * delta
}

/// Which sampler backs graph growth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SamplerKind {
    /// Linear scan, O(t) per draw. Reference implementation.
    Naive,
    /// Fenwick tree over degrees, O(log t) per draw and per update.
    #[default]
    Fenwick,
}

pub trait AttachmentSampler {
    fn with_capacity(capacity: usize, delta: f64) -> Self;

    /// Number of vertices currently eligible.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Appends vertex `len() + 1` with the given degree.
    fn push_vertex(&mut self, degree: u64);

    fn add_degree(&mut self, vertex: usize, by: u64);

    /// Cumulative weight of all eligible vertices.
    fn total_weight(&self) -> f64;

    /// Smallest `i` in `1..=len()` whose cumulative weight exceeds `u`
    /// (clamped to `len()` if rounding leaves none).
    fn find(&self, u: f64) -> usize;
}

#[derive(Debug, Clone)]
pub struct NaiveSampler {
    delta: f64,
    degrees: Vec<u64>,
    total: u64,
}

impl AttachmentSampler for NaiveSampler {
    fn with_capacity(capacity: usize, delta: f64) -> Self {
        let mut degrees = Vec::with_capacity(capacity + 1);
        degrees.push(0);
        Self {
            delta,
            degrees,
            total: 0,
        }
    }

    fn len(&self) -> usize {
        self.degrees.len() - 1
    }

    fn push_vertex(&mut self, degree: u64) {
        self.degrees.push(degree);
        self.total += degree;
    }

    fn add_degree(&mut self, vertex: usize, by: u64) {
        self.degrees[vertex] += by;
        self.total += by;
    }

    fn total_weight(&self) -> f64 {
        cumulative_weight(self.total, self.len(), self.delta)
    }

    fn find(&self, u: f64) -> usize {
        let mut s = 0u64;
        for (i, &d) in self.degrees.iter().enumerate().skip(1) {
            s += d;
            if cumulative_weight(s, i, self.delta) > u {
                return i;
            }
        }
        self.len()
    }
}

#[derive(Debug, Clone)]
pub struct FenwickSampler {
    delta: f64,
    tree: Vec<u64>,
    len: usize,
    top_step: usize,
    total: u64,
}

impl FenwickSampler {
    fn capacity(&self) -> usize {
        self.tree.len() - 1
    }

    fn grow(&mut self) {
        // Rebuild at double capacity; only hit when the caller under-reserved.
        let old_len = self.len;
        let mut degrees = vec![0u64; old_len + 1];
        for (i, d) in degrees.iter_mut().enumerate().skip(1) {
            *d = self.point_value(i);
        }
        let cap = (self.capacity() * 2).max(16);
        *self = Self::with_capacity(cap, self.delta);
        for &d in degrees.iter().skip(1) {
            self.push_vertex(d);
        }
    }

    fn point_value(&self, i: usize) -> u64 {
        self.prefix(i) - self.prefix(i - 1)
    }

    fn prefix(&self, mut i: usize) -> u64 {
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i &= i - 1;
        }
        s
    }
}

impl AttachmentSampler for FenwickSampler {
    fn with_capacity(capacity: usize, delta: f64) -> Self {
        let capacity = capacity.max(1);
        let top_step = 1usize << (usize::BITS - 1 - capacity.leading_zeros());
        Self {
            delta,
            tree: vec![0; capacity + 1],
            len: 0,
            top_step,
            total: 0,
        }
    }

    fn len(&self) -> usize {
        self.len
    }

    fn push_vertex(&mut self, degree: u64) {
        if self.len == self.capacity() {
            self.grow();
        }
        self.len += 1;
        self.add_degree(self.len, degree);
    }

    fn add_degree(&mut self, vertex: usize, by: u64) {
        debug_assert!(vertex >= 1 && vertex <= self.len);
        self.total += by;
        let cap = self.capacity();
        let mut i = vertex;
        while i <= cap {
            self.tree[i] += by;
            i += i & i.wrapping_neg();
        }
    }

    fn total_weight(&self) -> f64 {
        cumulative_weight(self.total, self.len, self.delta)
    }

    fn find(&self, u: f64) -> usize {
        let mut pos = 0usize;
        let mut s = 0u64;
        let mut step = self.top_step;
        while step > 0 {
            let next = pos + step;
            if next <= self.len {
                let ns = s + self.tree[next];
                if cumulative_weight(ns, next, self.delta) <= u {
                    pos = next;
                    s = ns;
                }
            }
            step >>= 1;
        }
        (pos + 1).min(self.len)
    }
}
