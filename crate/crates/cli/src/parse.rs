//! Command-line value syntax: complex numbers, point lists and grids.

use periodlab_core::Complex64;

use crate::CliError;

/// Parses `a`, `bi`, `a+bi`, `a-bi`, with optional exponents (`1e-3-2.5e+1i`) and
/// bare `i` for a unit imaginary part.
pub fn complex(text: &str) -> Result<Complex64, CliError> {
    let t = text.trim();
    let bad = || CliError::Parse(format!("cannot parse complex number {text:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return match t.parse::<f64>() {
            Ok(re) if re.is_finite() => Ok(Complex64::new(re, 0.0)),
            _ => Err(bad()),
        };
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (body[..k].parse::<f64>().map_err(|_| bad())?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse::<f64>().map_err(|_| bad())?,
    };
    if !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

/// Comma-separated complex numbers.
pub fn points(text: &str) -> Result<Vec<Complex64>, CliError> {
    text.split(',').map(complex).collect()
}

/// `name=a..b:n` with `n` equally spaced values including both ends.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.lo],
            n => (0..n).map(|i| self.lo + (self.hi - self.lo) * i as f64 / (n - 1) as f64).collect(),
        }
    }
}

fn axis(text: &str) -> Result<Axis, CliError> {
    let bad = |why: &str| CliError::Parse(format!("grid axis {text:?}: {why}"));
    let (name, rest) = text.split_once('=').ok_or_else(|| bad("expected name=a..b:n"))?;
    let (range, count) = rest.rsplit_once(':').ok_or_else(|| bad("missing :n"))?;
    let (lo, hi) = range.split_once("..").ok_or_else(|| bad("missing .."))?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad("bad lower end"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad("bad upper end"))?;
    let count: usize = count.trim().parse().map_err(|_| bad("bad count"))?;
    if !lo.is_finite() || !hi.is_finite() {
        return Err(bad("non-finite end point"));
    }
    Ok(Axis { name: name.trim().to_string(), lo, hi, count })
}

/// Comma-separated axes, e.g. `x=-0.5..0.5:5,y=0.8..2:4`.
pub fn grid(text: &str) -> Result<Vec<Axis>, CliError> {
    let axes: Vec<Axis> = text.split(',').map(axis).collect::<Result<_, _>>()?;
    for (i, a) in axes.iter().enumerate() {
        if axes[..i].iter().any(|b| b.name == a.name) {
            return Err(CliError::Parse(format!("grid axis {:?} given twice", a.name)));
        }
    }
    Ok(axes)
}

/// Points `x + iy` of an `x`/`y` grid, `x` varying slowest.
pub fn plane_grid(text: &str) -> Result<Vec<Complex64>, CliError> {
    let axes = grid(text)?;
    let find = |name: &str| {
        axes.iter()
            .find(|a| a.name == name)
            .ok_or_else(|| CliError::Parse(format!("grid {text:?} needs an {name} axis")))
    };
    let (x, y) = (find("x")?, find("y")?);
    if axes.len() != 2 {
        return Err(CliError::Parse(format!("grid {text:?} must have exactly the axes x and y")));
    }
    let ys = y.values();
    Ok(x.values().into_iter().flat_map(|x| ys.iter().map(move |&y| Complex64::new(x, y))).collect())
}

/// The single `t` axis of a scan grid.
pub fn t_axis(text: &str) -> Result<Axis, CliError> {
    match grid(text)?.as_slice() {
        [a] if a.name == "t" => Ok(a.clone()),
        _ => Err(CliError::Parse(format!("scan grid {text:?} must be a single axis t=a..b:n"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn complex_forms() {
        let cases = [
            ("2", c(2.0, 0.0)),
            ("2+0i", c(2.0, 0.0)),
            ("-1.5-2i", c(-1.5, -2.0)),
            ("0.5+14.134725i", c(0.5, 14.134725)),
            ("3i", c(0.0, 3.0)),
            ("-i", c(0.0, -1.0)),
            ("i", c(0.0, 1.0)),
            ("1+i", c(1.0, 1.0)),
            ("1e-3-2.5e+1i", c(1e-3, -25.0)),
            ("-2E-1+1E2i", c(-0.2, 100.0)),
            (" 7 ", c(7.0, 0.0)),
        ];
        for (text, want) in cases {
            assert_eq!(complex(text).unwrap(), want, "{text}");
        }
        for text in ["", "1+", "abc", "1+2j", "1++2i", "nan", "2+infi"] {
            assert!(complex(text).is_err(), "{text}");
        }
    }

    #[test]
    fn grids() {
        let pts = plane_grid("x=-0.5..0.5:5,y=0.8..2:4").unwrap();
        assert_eq!(pts.len(), 20);
        assert_eq!(pts[0], c(-0.5, 0.8));
        assert_eq!(pts[3], c(-0.5, 2.0));
        assert_eq!(pts[19], c(0.5, 2.0));
        assert!(plane_grid("x=0..1:2").is_err());
        assert!(plane_grid("x=0..1:2,x=0..1:2").is_err());
        let t = t_axis("t=13.5..14:11").unwrap();
        assert_eq!(t.values().len(), 11);
        assert!((t.values()[10] - 14.0).abs() < 1e-15);
        assert!(t_axis("t=1..2").is_err());
    }
}
