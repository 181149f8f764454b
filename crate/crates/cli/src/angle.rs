//! Angles given on the command line: plain radians or multiples of pi such
//! as `pi`, `2pi/3`, `-pi/2`, `1.5*pi`.

use std::f64::consts::PI;

use crate::{CliError, Result};

pub fn parse_angle(text: &str) -> Result<f64> {
    let bad = || CliError::Parse(format!("cannot read angle \"{text}\""));
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let s = s.replace('π', "pi");
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| bad())?),
        None => (s.as_str(), 1.0),
    };
    let value = match num.strip_suffix("pi") {
        Some(coef) => {
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            let c = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                other => other.parse::<f64>().map_err(|_| bad())?,
            };
            c * PI
        }
        None => num.parse::<f64>().map_err(|_| bad())?,
    };
    let angle = value / den;
    if angle.is_finite() {
        Ok(angle)
    } else {
        Err(bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        assert_eq!(parse_angle("0.5").unwrap(), 0.5);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("2pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(parse_angle("-pi/2").unwrap(), -PI / 2.0);
        assert_eq!(parse_angle("1.5*pi").unwrap(), 1.5 * PI);
        assert_eq!(parse_angle("7π/5").unwrap(), 7.0 * PI / 5.0);
        assert!(parse_angle("pi/0").is_err());
        assert!(parse_angle("two").is_err());
        assert!(parse_angle("").is_err());
    }
}
