//! Text syntax for algebra elements.
//!
//! Terms are joined by `+`, factors by `*`, powers written with `^`.
//! Generators are `rho`, `tau`, `k`, `tau0`, `tau1`, ..., `xi1`, ... and the
//! classical `xb1`, `xb2`, .... `rho` and `tau` may carry negative powers only
//! next to `k`. Squares of `tau_i` are allowed and reduced on input.

use crate::algebra::{algebroid, AlgebraElement, AlgebroidId, RawElement, RawMonomial, MAX_TAU, MAX_XI};
use crate::error::{Error, Result};
use crate::ground::GroundMonomial;

fn err(token: &str, reason: impl Into<String>) -> Error {
    Error::Parse { token: token.to_string(), reason: reason.into() }
}

fn index_of<'a>(factor: &'a str, prefix: &str) -> Option<&'a str> {
    factor.strip_prefix(prefix).filter(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
}

/// Parses without reducing; a term whose coefficient vanishes is dropped.
pub fn parse_raw(alg: AlgebroidId, input: &str) -> Result<RawElement> {
    let text: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if text.is_empty() {
        return Err(err(input, "empty expression"));
    }
    let mut terms = Vec::new();
    if text == "0" {
        return Ok(RawElement { alg, terms });
    }
    for term in text.split('+') {
        if term.is_empty() {
            return Err(err("+", "missing term"));
        }
        let mut c = GroundMonomial::ONE;
        let mut kappas = 0;
        let mut m = RawMonomial::default();
        for factor in term.split('*') {
            let (name, power) = match factor.split_once('^') {
                Some((n, p)) => (n, p.parse::<i32>().map_err(|_| err(factor, "bad exponent"))?),
                None => (factor, 1),
            };
            if name.is_empty() {
                return Err(err(factor, "missing generator"));
            }
            let nonneg = |p: i32| -> Result<u16> {
                u16::try_from(p).map_err(|_| err(factor, "negative exponent on a generator"))
            };
            match name {
                "1" => {}
                "rho" => c.a += power,
                "tau" => c.b += power,
                "k" => kappas += nonneg(power)?,
                _ if alg.is_classical() => {
                    let i: usize = index_of(name, "xb").ok_or_else(|| err(name, "unknown generator"))?.parse().unwrap();
                    if !(1..=MAX_XI).contains(&i) {
                        return Err(err(name, "index out of range"));
                    }
                    m.xi[i - 1] += nonneg(power)?;
                }
                _ => {
                    if let Some(i) = index_of(name, "tau") {
                        let i: usize = i.parse().unwrap();
                        if i >= MAX_TAU - 1 {
                            return Err(err(name, "index out of range"));
                        }
                        m.tau[i] += nonneg(power)?;
                    } else if let Some(i) = index_of(name, "xi") {
                        let i: usize = i.parse().unwrap();
                        if !(1..=MAX_XI).contains(&i) {
                            return Err(err(name, "index out of range"));
                        }
                        m.xi[i - 1] += nonneg(power)?;
                    } else {
                        return Err(err(name, "unknown generator"));
                    }
                }
            }
        }
        let ring = alg.ground();
        if kappas > 0 && alg != AlgebroidId::EquivC2 {
            return Err(err("k", format!("not in the ground ring {ring}")));
        }
        if alg.is_classical() && (c.a != 0 || c.b != 0) {
            return Err(err(term, "rho and tau are not in the classical ground field"));
        }
        if kappas >= 2 {
            continue;
        }
        c.kappa = kappas == 1;
        if alg == AlgebroidId::MotivicC && c.a > 0 {
            continue;
        }
        if !c.kappa && (c.a < 0 || c.b < 0) {
            return Err(err(term, "negative powers need a factor k"));
        }
        if c.kappa && (c.a > 0 || c.b > 0) {
            // Truncated to zero in the negative cone.
            continue;
        }
        if !ring.contains(&c) {
            return Err(err(term, format!("coefficient not in {ring}")));
        }
        terms.push((c, m));
    }
    Ok(RawElement { alg, terms })
}

/// Parses and reduces to normal form.
pub fn parse_element(alg: AlgebroidId, input: &str) -> Result<AlgebraElement> {
    algebroid(alg).normalize(&parse_raw(alg, input)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        for (alg, s) in [
            (AlgebroidId::MotivicR, "rho^3*xi2 + rho^2*xi1*tau1 + rho*tau0*tau1 + tau*tau1"),
            (AlgebroidId::EquivC2, "k*rho^-1*tau^-2*xi1"),
            (AlgebroidId::Classical, "xb1^3 + xb2"),
        ] {
            let x = parse_element(alg, s).unwrap();
            assert_eq!(parse_element(alg, &x.to_string()).unwrap(), x);
        }
        assert_eq!(parse_element(AlgebroidId::Classical, "xb1^3 + xb2").unwrap().to_string(), "xb1^3 + xb2");
    }

    #[test]
    fn errors_name_the_token() {
        let e = parse_element(AlgebroidId::MotivicR, "tau0 + foo3").unwrap_err();
        assert_eq!(e, Error::Parse { token: "foo3".into(), reason: "unknown generator".into() });
        assert!(parse_element(AlgebroidId::MotivicR, "k*tau0").is_err());
        assert!(parse_element(AlgebroidId::MotivicR, "rho^-1").is_err());
        assert!(parse_element(AlgebroidId::MotivicR, "tau0 +").is_err());
        assert!(parse_element(AlgebroidId::Classical, "tau0").is_err());
        assert!(parse_element(AlgebroidId::MotivicR, "xi1^x").is_err());
    }

    #[test]
    fn vanishing_terms() {
        assert!(parse_element(AlgebroidId::EquivC2, "k*k").unwrap().is_zero());
        assert!(parse_element(AlgebroidId::EquivC2, "k*tau").unwrap().is_zero());
        assert!(parse_element(AlgebroidId::MotivicC, "rho*xi1").unwrap().is_zero());
        assert!(parse_element(AlgebroidId::MotivicR, "xi1 + xi1").unwrap().is_zero());
    }
}
