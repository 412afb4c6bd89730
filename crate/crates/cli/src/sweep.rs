use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Error, Result};
use minmotion::{solve_mtt, MotionSpec};

/// `wK=lo:hi:COUNT` with an optional `log` suffix on the count.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepParam {
    pub order: usize,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub log: bool,
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, range) = s
            .split_once('=')
            .ok_or_else(|| anyhow!("--param: expected wK=lo:hi:COUNT[log], got {s:?}"))?;
        let order: usize = name
            .strip_prefix('w')
            .and_then(|k| k.parse().ok())
            .ok_or_else(|| anyhow!("--param: parameter must be wK, got {name:?}"))?;
        let parts: Vec<&str> = range.split(':').collect();
        let [lo, hi, count] = parts[..] else {
            bail!("--param: expected lo:hi:COUNT, got {range:?}");
        };
        let (count, log) = match count.strip_suffix("log") {
            Some(c) => (c, true),
            None => (count, false),
        };
        let lo: f64 = lo
            .parse()
            .with_context(|| format!("--param: bad lower end {lo:?}"))?;
        let hi: f64 = hi
            .parse()
            .with_context(|| format!("--param: bad upper end {hi:?}"))?;
        let count: usize = count
            .parse()
            .with_context(|| format!("--param: bad count {count:?}"))?;
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            bail!("--param: need 0 < lo <= hi, got {lo}:{hi}");
        }
        if count == 0 {
            bail!("--param: count must be at least 1");
        }
        Ok(Self {
            order,
            lo,
            hi,
            count,
            log,
        })
    }
}

impl SweepParam {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let u = i as f64 / last;
                if i == 0 {
                    self.lo
                } else if i + 1 == self.count {
                    self.hi
                } else if self.log {
                    (self.lo.ln() + u * (self.hi / self.lo).ln()).exp()
                } else {
                    self.lo + u * (self.hi - self.lo)
                }
            })
            .collect()
    }
}

/// CSV of the minimum time over the sweep, in parameter order.
pub fn run(spec: &MotionSpec, param: &SweepParam) -> Result<String> {
    if param.order == 0 || param.order > spec.order() {
        bail!("--param: w{} is outside w1..w{}", param.order, spec.order());
    }
    let mut out = format!("w{},T0,T0_hat,active\n", param.order);
    for value in param.values() {
        let spec = spec.with_bound(param.order, value)?;
        let sol = solve_mtt(&spec).with_context(|| format!("w{} = {value}", param.order))?;
        let active: Vec<String> = sol.active_bounds().iter().map(|n| n.to_string()).collect();
        out.push_str(&format!(
            "{value},{},{},{}\n",
            sol.horizon(),
            sol.dimensionless_horizon(),
            active.join(" ")
        ));
    }
    Ok(out)
}
