//! Line-oriented text format for QUBO models.
//!
//! ```text
//! qubo 1            # format version
//! n 5
//! offset -1
//! l 0 5             # linear: l <index> <coeff>
//! q 1 2 1           # quadratic: q <i> <j> <coeff>, i < j
//! ```

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::qubo::QuboModel;

pub const FORMAT_VERSION: u32 = 1;

/// Integer-valued coefficients print without a fractional part; everything
/// else uses the shortest representation that parses back to the same bits.
pub fn format_coeff(c: f64) -> String {
    if c.fract() == 0.0 && c.abs() < 1e15 {
        format!("{}", c as i64)
    } else {
        format!("{c}")
    }
}

pub fn serialize_model(model: &QuboModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "qubo {FORMAT_VERSION}");
    let _ = writeln!(out, "n {}", model.n());
    let _ = writeln!(out, "offset {}", format_coeff(model.offset()));
    for (&i, &c) in model.linear() {
        let _ = writeln!(out, "l {i} {}", format_coeff(c));
    }
    for (&(i, j), &c) in model.quadratic() {
        let _ = writeln!(out, "q {i} {j} {}", format_coeff(c));
    }
    out
}

pub fn parse_model(text: &str) -> Result<QuboModel> {
    let mut model: Option<QuboModel> = None;
    let mut seen_version = false;
    let mut seen_offset = false;
    let mut linear_keys = HashSet::new();
    let mut quad_keys = HashSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line, message };
        let fields: Vec<&str> = content.split_whitespace().collect();
        let expect_fields = |k: usize| {
            if fields.len() == k {
                Ok(())
            } else {
                Err(err(format!(
                    "expected {} fields after {:?}, found {}",
                    k - 1,
                    fields[0],
                    fields.len() - 1
                )))
            }
        };

        if !seen_version {
            if fields[0] != "qubo" {
                return Err(err("missing 'qubo <version>' header".into()));
            }
            expect_fields(2)?;
            let v: u32 = parse_num(fields[1], line)?;
            if v != FORMAT_VERSION {
                return Err(err(format!("unsupported format version {v}")));
            }
            seen_version = true;
            continue;
        }

        match fields[0] {
            "n" => {
                expect_fields(2)?;
                if model.is_some() {
                    return Err(err("duplicate 'n' line".into()));
                }
                model = Some(QuboModel::new(parse_num(fields[1], line)?));
            }
            "offset" => {
                expect_fields(2)?;
                let m = model.as_mut().ok_or_else(|| err("'offset' before 'n'".into()))?;
                if seen_offset {
                    return Err(err("duplicate 'offset' line".into()));
                }
                seen_offset = true;
                m.set_offset(parse_coeff(fields[1], line)?)
                    .map_err(|e| err(e.to_string()))?;
            }
            "l" => {
                expect_fields(3)?;
                let m = model.as_mut().ok_or_else(|| err("term before 'n'".into()))?;
                let i: usize = parse_num(fields[1], line)?;
                let c = parse_coeff(fields[2], line)?;
                if !linear_keys.insert(i) {
                    return Err(err(format!("duplicate linear term {i}")));
                }
                m.set_linear(i, c).map_err(|e| err(e.to_string()))?;
            }
            "q" => {
                expect_fields(4)?;
                let m = model.as_mut().ok_or_else(|| err("term before 'n'".into()))?;
                let i: usize = parse_num(fields[1], line)?;
                let j: usize = parse_num(fields[2], line)?;
                let c = parse_coeff(fields[3], line)?;
                if i >= j {
                    return Err(err(format!("quadratic term needs i < j, got {i} {j}")));
                }
                if !quad_keys.insert((i, j)) {
                    return Err(err(format!("duplicate quadratic term {i} {j}")));
                }
                m.set_quadratic(i, j, c).map_err(|e| err(e.to_string()))?;
            }
            other => return Err(err(format!("unknown record {other:?}"))),
        }
    }

    if !seen_version {
        return Err(Error::Parse {
            line: 1,
            message: "empty input".into(),
        });
    }
    model.ok_or(Error::Parse {
        line: text.lines().count().max(1),
        message: "missing 'n' line".into(),
    })
}

fn parse_num<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid integer {s:?}"),
    })
}

fn parse_coeff(s: &str, line: usize) -> Result<f64> {
    match s.parse::<f64>() {
        Ok(c) if c.is_finite() => Ok(c),
        _ => Err(Error::Parse {
            line,
            message: format!("invalid coefficient {s:?}"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::random_instance;
    use proptest::prelude::*;

    #[test]
    fn example_round_trip() {
        let m = QuboModel::five_variable_example();
        let text = serialize_model(&m);
        assert!(text.starts_with("qubo 1\nn 5\noffset -1\nl 0 5\n"));
        assert_eq!(parse_model(&text).unwrap(), m);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# model\nqubo 1   # version\n\nn 2\nq 0 1 -3 # pair\nl 1 2.5\n";
        let m = parse_model(text).unwrap();
        assert_eq!(m.quadratic_coeff(0, 1), -3.0);
        assert_eq!(m.linear_coeff(1), 2.5);
        assert_eq!(m.offset(), 0.0);
    }

    #[test]
    fn duplicate_pair_is_rejected() {
        let text = "qubo 1\nn 3\nq 0 1 1\nq 0 1 2\n";
        assert_eq!(
            parse_model(text).unwrap_err(),
            Error::Parse {
                line: 4,
                message: "duplicate quadratic term 0 1".into()
            }
        );
    }

    #[test]
    fn out_of_range_index_names_line() {
        let text = "qubo 1\nn 5\nl 7 1\n";
        match parse_model(text).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn malformed_inputs() {
        for text in [
            "",
            "n 3\n",
            "qubo 2\nn 3\n",
            "qubo 1\nl 0 1\n",
            "qubo 1\nn 3\nq 1 0 1\n",
            "qubo 1\nn 3\nq 1 1 1\n",
            "qubo 1\nn 3\nl 0 x\n",
            "qubo 1\nn 3\nl 0 inf\n",
            "qubo 1\nn 3\nl 0\n",
            "qubo 1\nn 3\nz 0 1\n",
            "qubo 1\nn 3\noffset 1\noffset 2\n",
            "qubo 1\nn 3\nn 3\n",
        ] {
            assert!(parse_model(text).is_err(), "accepted {text:?}");
        }
    }

    #[test]
    fn integer_coefficients_have_no_fraction() {
        assert_eq!(format_coeff(-4.0), "-4");
        assert_eq!(format_coeff(0.25), "0.25");
    }

    #[test]
    fn random_instances_round_trip() {
        for seed in 0..100 {
            let m = random_instance(1 + (seed as usize % 17), 0.4, 9, seed).unwrap();
            assert_eq!(parse_model(&serialize_model(&m)).unwrap(), m);
        }
    }

    proptest! {
        #[test]
        fn real_coefficients_round_trip_bit_exact(
            coeffs in proptest::collection::vec(-1e6f64..1e6, 1..12),
            offset in -1e3f64..1e3,
        ) {
            let n = coeffs.len() + 1;
            let mut m = QuboModel::new(n);
            m.set_offset(offset).unwrap();
            for (i, &c) in coeffs.iter().enumerate() {
                m.set_linear(i, c).unwrap();
                m.set_quadratic(i, i + 1, c / 3.0).unwrap();
            }
            let back = parse_model(&serialize_model(&m)).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
