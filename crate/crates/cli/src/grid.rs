//! `start:stop:count` time grids.

use std::str::FromStr;

/// Evenly spaced times including both ends; `count = 1` is `start` alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl TimeGrid {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let span = self.stop - self.start;
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|k| if k + 1 == self.count { self.stop } else { self.start + span * k as f64 / last })
            .collect()
    }
}

impl FromStr for TimeGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |v: &str| -> Result<f64, String> {
            let x: f64 = v.trim().parse().map_err(|_| format!("bad time '{v}'"))?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(format!("non-finite time '{v}'"))
            }
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [t] => {
                let t = num(t)?;
                Ok(Self { start: t, stop: t, count: 1 })
            }
            [a, b, c] => {
                let count: usize = c.trim().parse().map_err(|_| format!("bad count '{c}'"))?;
                if count == 0 {
                    return Err("count must be positive".into());
                }
                let (start, stop) = (num(a)?, num(b)?);
                if count == 1 && start != stop {
                    return Err("a single-point grid needs start = stop".into());
                }
                Ok(Self { start, stop, count })
            }
            _ => Err(format!("expected start:stop:count, got '{s}'")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ranges_and_points() {
        let g: TimeGrid = "0:2:5".parse().unwrap();
        assert_eq!(g.values(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        let p: TimeGrid = "0.5".parse().unwrap();
        assert_eq!(p.values(), vec![0.5]);
        assert_eq!("1:1:1".parse::<TimeGrid>().unwrap().values(), vec![1.0]);
    }

    #[test]
    fn endpoint_is_exact() {
        let g: TimeGrid = "0:0.7:8".parse().unwrap();
        assert_eq!(*g.values().last().unwrap(), 0.7);
    }

    #[test]
    fn rejects_malformed() {
        for s in ["", "a", "0:1", "0:1:0", "0:1:x", "0:nan:3", "0:1:1", "1:2:3:4"] {
            assert!(s.parse::<TimeGrid>().is_err(), "{s}");
        }
    }
}
