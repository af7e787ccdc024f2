//! Durations on the command line: a number with an optional `h`, `d` or `y`
//! suffix. Bare numbers are hours.

use std::fmt;
use std::str::FromStr;

pub const DAY_HOURS: f64 = 24.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeUnit {
    Hours,
    Days,
    Years,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Duration {
    pub value: f64,
    pub unit: TimeUnit,
}

impl Duration {
    pub fn hours(value: f64) -> Self {
        Self { value, unit: TimeUnit::Hours }
    }

    pub fn years(value: f64) -> Self {
        Self { value, unit: TimeUnit::Years }
    }

    pub fn to_hours(self, year_hours: f64) -> f64 {
        match self.unit {
            TimeUnit::Hours => self.value,
            TimeUnit::Days => self.value * DAY_HOURS,
            TimeUnit::Years => self.value * year_hours,
        }
    }
}

impl FromStr for Duration {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let (num, unit) = match s.char_indices().last() {
            Some((i, 'h')) => (&s[..i], TimeUnit::Hours),
            Some((i, 'd')) => (&s[..i], TimeUnit::Days),
            Some((i, 'y')) => (&s[..i], TimeUnit::Years),
            _ => (s, TimeUnit::Hours),
        };
        let value: f64 =
            num.trim().parse().map_err(|_| format!("invalid duration '{s}': expected e.g. 3h, 10d, 50y"))?;
        if !value.is_finite() {
            return Err(format!("invalid duration '{s}': not finite"));
        }
        Ok(Self { value, unit })
    }
}

impl fmt::Display for Duration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let suffix = match self.unit {
            TimeUnit::Hours => "h",
            TimeUnit::Days => "d",
            TimeUnit::Years => "y",
        };
        write!(f, "{}{suffix}", self.value)
    }
}
