//! Fee inflow into the mempool over simulated time.
//!
//! A [`FeeScenario`] is a piecewise-constant inflow schedule. Simulated time
//! is kept in whole microseconds ([`SimTime`]) so the inflow integral can be
//! evaluated exactly in integers.

use std::fmt;
use std::fmt::Write as _;
use std::path::Path;

use crate::amount::Amount;
use crate::error::{Error, Result};

pub const SCENARIO_HEADER: &str = "frsc-scenario v1";

/// Default per-block cap on claimable fees in full-mempool mode: 50 BTC.
pub const DEFAULT_BLOCK_CAP: Amount = Amount::from_sat(5_000_000_000);

const MICROS_PER_SEC: u64 = 1_000_000;

/// Reconstruction of a long-running scenario with several fee rises and
/// collapses, starting at 50 BTC per 600 s.
pub const LONG_TERM_SCENARIO: &str = include_str!("../scenarios/long_term.scn");

/// Reconstruction of a triangle-wave scenario: slow linear rises and falls
/// between 1 BTC and 40 BTC per 600 s, with short plateaus at the extremes.
pub const TRIANGLE_SCENARIO: &str = include_str!("../scenarios/triangle.scn");

/// A point in simulated time, in microseconds since genesis.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimTime(u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);

    pub const fn from_micros(us: u64) -> Self {
        SimTime(us)
    }

    pub const fn from_secs(s: u64) -> Self {
        SimTime(s * MICROS_PER_SEC)
    }

    /// Rounds to the nearest microsecond. Negative or non-finite inputs
    /// clamp to zero.
    pub fn from_secs_f64(s: f64) -> Self {
        if s.is_finite() && s > 0.0 {
            SimTime((s * MICROS_PER_SEC as f64).round() as u64)
        } else {
            SimTime(0)
        }
    }

    pub const fn micros(self) -> u64 {
        self.0
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / MICROS_PER_SEC as f64
    }

    pub fn saturating_add(self, micros: u64) -> SimTime {
        SimTime(self.0.saturating_add(micros))
    }
}

impl fmt::Display for SimTime {
    /// Seconds with six decimals, no exponent.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:06}", self.0 / MICROS_PER_SEC, self.0 % MICROS_PER_SEC)
    }
}

/// Inflow of `sat` satoshi every `per_secs` seconds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct InflowRate {
    sat: u64,
    per_secs: u64,
}

impl InflowRate {
    pub const fn per_second(sat: u64) -> Self {
        InflowRate { sat, per_secs: 1 }
    }

    pub const fn per_interval(sat: u64, secs: u64) -> Self {
        assert!(secs > 0, "inflow interval must be positive");
        InflowRate { sat, per_secs: secs }
    }

    /// Satoshi arriving over `micros` microseconds, floored.
    fn over(&self, micros: u64) -> u64 {
        (self.sat as u128 * micros as u128 / (self.per_secs as u128 * MICROS_PER_SEC as u128)) as u64
    }

    pub fn sat_per_sec_f64(&self) -> f64 {
        self.sat as f64 / self.per_secs as f64
    }

    /// Satoshi arriving over `secs` whole seconds, floored.
    pub fn over_secs(&self, secs: u64) -> Amount {
        Amount::from_sat(self.over(secs * MICROS_PER_SEC))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Segment {
    pub start: SimTime,
    pub rate: InflowRate,
}

/// Piecewise-constant fee inflow plus the optional per-block cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeeScenario {
    segments: Vec<Segment>,
    // fees accumulated by every segment before segment i, each floored
    prefix: Vec<u64>,
    full_mempool: bool,
    block_cap: Amount,
}

impl FeeScenario {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let first = segments.first().ok_or_else(|| Error::Scenario {
            line: 0,
            msg: "scenario has no segments".into(),
        })?;
        if first.start != SimTime::ZERO {
            return Err(Error::Scenario {
                line: 0,
                msg: "first segment must start at time 0".into(),
            });
        }
        if let Some(w) = segments.windows(2).position(|w| w[1].start <= w[0].start) {
            return Err(Error::Scenario {
                line: w + 2,
                msg: "segment start times must be strictly increasing".into(),
            });
        }
        let mut prefix = Vec::with_capacity(segments.len());
        let mut acc = 0u64;
        for (i, seg) in segments.iter().enumerate() {
            prefix.push(acc);
            if let Some(next) = segments.get(i + 1) {
                acc += seg.rate.over(next.start.0 - seg.start.0);
            }
        }
        Ok(FeeScenario {
            segments,
            prefix,
            full_mempool: false,
            block_cap: DEFAULT_BLOCK_CAP,
        })
    }

    pub fn constant(rate: InflowRate) -> Self {
        Self::new(vec![Segment {
            start: SimTime::ZERO,
            rate,
        }])
        .expect("single segment at t=0 is valid")
    }

    /// Enables the per-block cap on claimable fees.
    pub fn with_full_mempool(mut self, block_cap: Amount) -> Result<Self> {
        if block_cap == Amount::ZERO {
            return Err(Error::config("block_cap", "must be positive in full-mempool mode"));
        }
        self.full_mempool = true;
        self.block_cap = block_cap;
        Ok(self)
    }

    pub fn without_full_mempool(mut self) -> Self {
        self.full_mempool = false;
        self
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn full_mempool(&self) -> bool {
        self.full_mempool
    }

    pub fn block_cap(&self) -> Amount {
        self.block_cap
    }

    /// Start of the last record; the inflow is constant from here on.
    pub fn last_change(&self) -> SimTime {
        self.segments.last().map(|s| s.start).unwrap_or_default()
    }

    fn segment_index(&self, t: SimTime) -> usize {
        self.segments.partition_point(|s| s.start <= t) - 1
    }

    pub fn rate_at(&self, t: SimTime) -> InflowRate {
        self.segments[self.segment_index(t)].rate
    }

    /// Total fees that have entered the mempool between time 0 and `t`.
    pub fn arrived_fees(&self, t: SimTime) -> Amount {
        let i = self.segment_index(t);
        let seg = &self.segments[i];
        Amount::from_sat(self.prefix[i] + seg.rate.over(t.0 - seg.start.0))
    }

    /// What a block may claim out of `available` mempool fees.
    pub fn claimable_fees(&self, available: Amount) -> Amount {
        if self.full_mempool {
            available.min(self.block_cap)
        } else {
            available
        }
    }

    /// Parses the line-oriented scenario format: a `frsc-scenario v1` header,
    /// then `start_time_seconds,inflow_satoshi_per_second` records. Lines
    /// starting with `#` and blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        match lines.next() {
            Some((_, SCENARIO_HEADER)) => {}
            Some((line, other)) => {
                return Err(Error::Scenario {
                    line,
                    msg: format!("expected header `{SCENARIO_HEADER}`, found `{other}`"),
                })
            }
            None => {
                return Err(Error::Scenario {
                    line: 1,
                    msg: format!("missing header `{SCENARIO_HEADER}`"),
                })
            }
        }

        let mut segments = Vec::new();
        let mut prev: Option<u64> = None;
        for (line, l) in lines {
            let (start, rate) = l.split_once(',').ok_or_else(|| Error::Scenario {
                line,
                msg: "expected `start_time_seconds,inflow_satoshi_per_second`".into(),
            })?;
            let parse = |s: &str, what: &str| {
                s.trim().parse::<u64>().map_err(|_| Error::Scenario {
                    line,
                    msg: format!("{what} `{}` is not a non-negative integer", s.trim()),
                })
            };
            let start = parse(start, "start time")?;
            let rate = parse(rate, "inflow rate")?;
            match prev {
                None if start != 0 => {
                    return Err(Error::Scenario {
                        line,
                        msg: "first record must start at time 0".into(),
                    })
                }
                Some(p) if start <= p => {
                    return Err(Error::Scenario {
                        line,
                        msg: format!("start time {start} is not after the previous {p}"),
                    })
                }
                _ => {}
            }
            prev = Some(start);
            segments.push(Segment {
                start: SimTime::from_secs(start),
                rate: InflowRate::per_second(rate),
            });
        }
        if segments.is_empty() {
            return Err(Error::Scenario {
                line: 0,
                msg: "scenario has no records".into(),
            });
        }
        Self::new(segments)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}

/// Builds staircase scenarios from holds and linear ramps, with integer
/// per-second rates.
#[derive(Clone, Debug, Default)]
pub struct ScenarioBuilder {
    records: Vec<(u64, u64)>,
    t: u64,
    comments: Vec<String>,
}

impl ScenarioBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn comment(mut self, text: impl Into<String>) -> Self {
        self.comments.push(text.into());
        self
    }

    fn push(&mut self, rate: u64, secs: u64) {
        match self.records.last() {
            Some(&(_, r)) if r == rate => {}
            _ => self.records.push((self.t, rate)),
        }
        self.t += secs;
    }

    /// Constant `rate` sat/s for `secs` seconds.
    pub fn hold(mut self, rate: u64, secs: u64) -> Self {
        self.push(rate, secs);
        self
    }

    /// Linear ramp from `from` to `to` sat/s over `secs` seconds, as steps of
    /// `step` seconds. Each step carries the ramp's value at its midpoint.
    pub fn ramp(mut self, from: u64, to: u64, secs: u64, step: u64) -> Self {
        assert!(step > 0, "step width must be positive");
        let n = secs.div_ceil(step);
        for k in 0..n {
            let width = step.min(secs - k * step);
            let mid2 = 2 * k * step + width; // twice the midpoint offset
            let rate = if to >= from {
                from + ((to - from) as u128 * mid2 as u128 / (2 * secs) as u128) as u64
            } else {
                from - ((from - to) as u128 * mid2 as u128 / (2 * secs) as u128) as u64
            };
            self.push(rate, width);
        }
        self
    }

    /// Closes the scenario with a record repeating the current rate, so
    /// runs that stop at the last record cover everything before it.
    pub fn end(mut self) -> Self {
        let rate = self.records.last().map_or(0, |&(_, r)| r);
        if self.records.last().is_none_or(|&(s, _)| s < self.t) {
            self.records.push((self.t, rate));
        }
        self
    }

    /// Renders the scenario file text.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(SCENARIO_HEADER);
        out.push('\n');
        for c in &self.comments {
            writeln!(out, "# {c}").unwrap();
        }
        for (start, rate) in &self.records {
            writeln!(out, "{start},{rate}").unwrap();
        }
        out
    }

    pub fn build(&self) -> Result<FeeScenario> {
        FeeScenario::parse(&self.render())
    }
}

/// Per-second rate carrying `btc_per_block` bitcoin per 600 s, floored.
pub fn btc_per_block_rate(btc_per_block: u64) -> u64 {
    btc_per_block * crate::amount::SATS_PER_BTC / 600
}

/// The bundled long-term scenario, as built from its generator.
pub fn long_term_builder() -> ScenarioBuilder {
    const BLOCK: u64 = 600;
    let r = btc_per_block_rate;
    ScenarioBuilder::new()
        .comment("long-term fee scenario: several rises and collapses")
        .comment("rates in satoshi per second; 8333333 sat/s is about 50 BTC per 600 s")
        .hold(r(50), 4_000 * BLOCK)
        .ramp(r(50), r(90), 6_000 * BLOCK, 6_000)
        .hold(r(90), 3_000 * BLOCK)
        .ramp(r(90), r(15), 4_000 * BLOCK, 6_000)
        .hold(r(15), 5_000 * BLOCK)
        .hold(r(60), 2_000 * BLOCK)
        .ramp(r(60), r(5), 8_000 * BLOCK, 6_000)
        .hold(r(5), 4_000 * BLOCK)
        .ramp(r(5), r(40), 6_000 * BLOCK, 6_000)
        .hold(r(40), 3_000 * BLOCK)
        .hold(r(120), 1_000 * BLOCK)
        .hold(r(30), 4_000 * BLOCK)
        .ramp(r(30), r(50), 4_000 * BLOCK, 6_000)
        .hold(r(50), 2_000 * BLOCK)
        .end()
}

/// The bundled triangle-wave scenario, as built from its generator.
pub fn triangle_builder() -> ScenarioBuilder {
    const BLOCK: u64 = 600;
    let r = btc_per_block_rate;
    ScenarioBuilder::new()
        .comment("triangle-wave fee scenario: linear rises and falls")
        .comment("between 1 BTC and 40 BTC per 600 s with plateaus at the extremes")
        .hold(r(20), 8_000 * BLOCK)
        .ramp(r(20), r(40), 15_000 * BLOCK, 6_000)
        .hold(r(40), 8_000 * BLOCK)
        .ramp(r(40), r(1), 30_000 * BLOCK, 6_000)
        .hold(r(1), 8_000 * BLOCK)
        .ramp(r(1), r(20), 15_000 * BLOCK, 6_000)
        .hold(r(20), 8_000 * BLOCK)
        .end()
}
