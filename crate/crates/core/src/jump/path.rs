use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::FieldSeries;

/// One right-continuous, piecewise-constant trajectory of the jump process.
///
/// On `[jump_times[i], jump_times[i + 1])` the process sits at `positions[i]`;
/// before the first jump it sits at `start`.
#[derive(Clone, Debug, PartialEq)]
pub struct JumpPath<T> {
    pub start: usize,
    pub horizon: T,
    pub jump_times: Vec<T>,
    pub positions: Vec<usize>,
}

impl<T: Scalar> JumpPath<T> {
    pub fn constant(start: usize, horizon: T) -> Self {
        Self {
            start,
            horizon,
            jump_times: Vec::new(),
            positions: Vec::new(),
        }
    }

    pub fn n_jumps(&self) -> usize {
        self.jump_times.len()
    }

    /// Number of jumps in `(0, s]`.
    fn jumps_until(&self, s: T) -> usize {
        self.jump_times.partition_point(|&tau| tau <= s)
    }

    fn site(&self, n_jumps: usize) -> usize {
        if n_jumps == 0 {
            self.start
        } else {
            self.positions[n_jumps - 1]
        }
    }

    pub fn position_at(&self, s: T) -> Result<usize> {
        if !(s >= T::zero() && s <= self.horizon) {
            return Err(Error::Domain(format!(
                "time {s} outside path horizon [0, {}]",
                self.horizon
            )));
        }
        Ok(self.site(self.jumps_until(s)))
    }

    /// `int_0^t W(X_{t-s}, s) ds` over the whole horizon `t`.
    pub fn path_potential_integral(&self, w: &FieldSeries<T>) -> Result<T> {
        self.potential_integral_between(w, T::zero(), self.horizon)
    }

    /// `int_a^b W(X_{t-s}, s) ds` with `t` the horizon and `0 <= a <= b <= t`.
    pub fn potential_integral_between(&self, w: &FieldSeries<T>, a: T, b: T) -> Result<T> {
        if !(a >= T::zero() && a <= b && b <= self.horizon) {
            return Err(Error::Domain(format!(
                "integration range [{a}, {b}] outside [0, {}]",
                self.horizon
            )));
        }
        w.ensure_covers(b)?;
        Ok(self.integral_unchecked(w, self.horizon, a, b))
    }

    /// Same integral for the path restricted to `[0, t]`, `t <= horizon`.
    pub(crate) fn integral_at(&self, w: &FieldSeries<T>, t: T) -> T {
        self.integral_unchecked(w, t, T::zero(), t)
    }

    /// Trapezoid in `s` on the merge of the series nodes and the reversed jump
    /// times, so the position is constant on every piece and the linear time
    /// interpolant of `W` is integrated exactly.
    fn integral_unchecked(&self, w: &FieldSeries<T>, t: T, a: T, b: T) -> T {
        if b <= a {
            return T::zero();
        }
        let dt = w.dt();
        let nodes = w.len();
        // jumps strictly before time t - a are still "ahead" in reversed time
        let mut live = self.jump_times.partition_point(|&tau| tau < t - a);
        let mut node = if nodes > 1 {
            (a / dt).floor().to_usize().unwrap_or(0) + 1
        } else {
            usize::MAX
        };
        let mut s0 = a;
        let mut x = self.site(live);
        let mut w0 = w.value_at(x, s0);
        let mut total = T::zero();
        while s0 < b {
            let next_node = if node < nodes { w.time(node) } else { b };
            let next_jump = if live > 0 { t - self.jump_times[live - 1] } else { b };
            let s1 = b.min(next_node).min(next_jump);
            if s1 > s0 {
                let w1 = w.value_at(x, s1);
                total += (s1 - s0) * (w0 + w1) * T::of(0.5);
            }
            if node < nodes && next_node <= s1 {
                node += 1;
            }
            if live > 0 && next_jump <= s1 {
                while live > 0 && t - self.jump_times[live - 1] <= s1 {
                    live -= 1;
                }
                x = self.site(live);
            }
            if s1 >= b {
                break;
            }
            s0 = s0.max(s1);
            w0 = w.value_at(x, s0);
        }
        total
    }
}
