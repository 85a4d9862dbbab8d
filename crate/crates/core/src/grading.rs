//! Bidegrees and rectangular windows of bidegrees.
//!
//! Everything is graded homologically: `|rho| = (-1,-1)`, `|tau| = (0,-1)`,
//! `|k| = (0,2)`. Cohomological objects store negated bidegrees.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bidegree {
    pub t: i32,
    pub w: i32,
}

impl Bidegree {
    pub const ZERO: Bidegree = Bidegree { t: 0, w: 0 };

    pub const fn new(t: i32, w: i32) -> Self {
        Bidegree { t, w }
    }
}

impl fmt::Display for Bidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.t, self.w)
    }
}

impl Add for Bidegree {
    type Output = Bidegree;
    fn add(self, o: Bidegree) -> Bidegree {
        Bidegree::new(self.t + o.t, self.w + o.w)
    }
}

impl Sub for Bidegree {
    type Output = Bidegree;
    fn sub(self, o: Bidegree) -> Bidegree {
        Bidegree::new(self.t - o.t, self.w - o.w)
    }
}

impl Neg for Bidegree {
    type Output = Bidegree;
    fn neg(self) -> Bidegree {
        Bidegree::new(-self.t, -self.w)
    }
}

impl Mul<i32> for Bidegree {
    type Output = Bidegree;
    fn mul(self, k: i32) -> Bidegree {
        Bidegree::new(self.t * k, self.w * k)
    }
}

/// A closed rectangle of bidegrees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub t_min: i32,
    pub t_max: i32,
    pub w_min: i32,
    pub w_max: i32,
}

impl Window {
    pub fn new(t_min: i32, t_max: i32, w_min: i32, w_max: i32) -> Result<Self> {
        if t_min > t_max || w_min > w_max {
            return Err(Error::InvalidWindow(format!("{t_min}:{t_max},{w_min}:{w_max}")));
        }
        Ok(Window { t_min, t_max, w_min, w_max })
    }

    /// The smallest window containing both bidegrees.
    pub fn hull(a: Bidegree, b: Bidegree) -> Self {
        Window { t_min: a.t.min(b.t), t_max: a.t.max(b.t), w_min: a.w.min(b.w), w_max: a.w.max(b.w) }
    }

    pub fn contains(&self, d: Bidegree) -> bool {
        (self.t_min..=self.t_max).contains(&d.t) && (self.w_min..=self.w_max).contains(&d.w)
    }

    pub fn expand(&self, margin: i32) -> Self {
        Window {
            t_min: self.t_min - margin,
            t_max: self.t_max + margin,
            w_min: self.w_min - margin,
            w_max: self.w_max + margin,
        }
    }

    pub fn union(&self, o: &Window) -> Self {
        Window {
            t_min: self.t_min.min(o.t_min),
            t_max: self.t_max.max(o.t_max),
            w_min: self.w_min.min(o.w_min),
            w_max: self.w_max.max(o.w_max),
        }
    }

    pub fn shift(&self, d: Bidegree) -> Self {
        Window { t_min: self.t_min + d.t, t_max: self.t_max + d.t, w_min: self.w_min + d.w, w_max: self.w_max + d.w }
    }

    /// All bidegrees, ordered by `t` and then `w`.
    pub fn iter(&self) -> impl Iterator<Item = Bidegree> + '_ {
        (self.t_min..=self.t_max).flat_map(move |t| (self.w_min..=self.w_max).map(move |w| Bidegree::new(t, w)))
    }

    pub fn len(&self) -> usize {
        ((self.t_max - self.t_min + 1) * (self.w_max - self.w_min + 1)) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{},{}:{}", self.t_min, self.t_max, self.w_min, self.w_max)
    }
}

/// Parses `tmin:tmax,wmin:wmax`.
impl FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidWindow(s.to_string());
        let (ts, ws) = s.split_once(',').ok_or_else(bad)?;
        let range = |part: &str| -> Result<(i32, i32)> {
            let (lo, hi) = part.trim().split_once(':').ok_or_else(bad)?;
            Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
        };
        let (t_min, t_max) = range(ts)?;
        let (w_min, w_max) = range(ws)?;
        Window::new(t_min, t_max, w_min, w_max)
    }
}
