use super::Poly;

/// Row-major grid of polynomials with an arbitrary number of indices. Every
/// residual in the crate is returned in this form so that a failure can be
/// traced back to the index tuple that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyTensor {
    shape: Vec<usize>,
    data: Vec<Poly>,
}

impl PolyTensor {
    pub fn from_fn(shape: &[usize], mut f: impl FnMut(&[usize]) -> Poly) -> Self {
        let total: usize = shape.iter().product();
        let mut data = Vec::with_capacity(total);
        let mut idx = vec![0usize; shape.len()];
        for _ in 0..total {
            data.push(f(&idx));
            for axis in (0..shape.len()).rev() {
                idx[axis] += 1;
                if idx[axis] < shape[axis] {
                    break;
                }
                idx[axis] = 0;
            }
        }
        PolyTensor {
            shape: shape.to_vec(),
            data,
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    fn offset(&self, index: &[usize]) -> usize {
        assert_eq!(index.len(), self.shape.len());
        index
            .iter()
            .zip(&self.shape)
            .fold(0, |acc, (&i, &s)| {
                assert!(i < s, "index {i} out of bounds {s}");
                acc * s + i
            })
    }

    pub fn get(&self, index: &[usize]) -> &Poly {
        &self.data[self.offset(index)]
    }

    pub fn entries(&self) -> &[Poly] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Poly::is_zero)
    }

    pub fn nonzero_count(&self) -> usize {
        self.data.iter().filter(|p| !p.is_zero()).count()
    }

    pub fn max_total_degree(&self) -> Option<u32> {
        self.data.iter().filter_map(Poly::total_degree).max()
    }

    pub fn total_terms(&self) -> usize {
        self.data.iter().map(Poly::nterms).sum()
    }

    /// All entries with their multi-indices, in row-major order.
    pub fn indexed(&self) -> impl Iterator<Item = (Vec<usize>, &Poly)> {
        let shape = self.shape.clone();
        self.data.iter().enumerate().map(move |(mut flat, p)| {
            let mut idx = vec![0; shape.len()];
            for axis in (0..shape.len()).rev() {
                idx[axis] = flat % shape[axis];
                flat /= shape[axis];
            }
            (idx, p)
        })
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (Vec<usize>, &Poly)> {
        self.indexed().filter(|(_, p)| !p.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::int;

    #[test]
    fn indexing_round_trip() {
        let t = PolyTensor::from_fn(&[2, 3, 4], |i| {
            Poly::constant(1, int((i[0] * 100 + i[1] * 10 + i[2]) as i64))
        });
        assert_eq!(t.get(&[1, 2, 3]), &Poly::constant(1, int(123)));
        for (idx, p) in t.indexed() {
            assert_eq!(t.get(&idx), p);
        }
        assert_eq!(t.nonzero_count(), 23);
    }
}
