//! Body descriptions accepted by the command line.
//!
//! ```text
//! kind=ball radius=<r> n=<n>
//! kind=profile n=<n> p=<p> N=<N>
//! kind=tabulated n=<n> file=<csv with header angle_rad,rho>
//! kind=perturbed base=<file> eps=<e> bump_center=<rad> bump_width=<rad> [alpha=<a>]
//! ball:<r>:n=<n>            shorthand, also profile:<N>:n=<n>:p=<p>
//! <path>.json               a serialized ConvexBody
//! <path>                    a text file holding one of the forms above
//! ```
//!
//! Relative paths inside a description resolve against the directory of
//! the file that contains it.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::bodies::{make_counterexample_body, perturb_body, ConvexBody};
use crate::buspetty::{bump_series, perturbation_for, Bump};
use crate::error::{Error, Result};

const DEFAULT_ALPHA: f64 = 0.5;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn number(map: &BTreeMap<String, String>, key: &str) -> Result<f64> {
    let raw = map
        .get(key)
        .ok_or_else(|| parse_err(format!("body description lacks {key}=")))?;
    raw.parse()
        .map_err(|_| parse_err(format!("{key}={raw} is not a number")))
}

fn dimension(map: &BTreeMap<String, String>) -> Result<usize> {
    let raw = map.get("n").ok_or_else(|| parse_err("body description lacks n="))?;
    raw.parse().map_err(|_| parse_err(format!("n={raw} is not an integer")))
}

fn key_values<'a>(parts: impl Iterator<Item = &'a str>) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for part in parts.filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| parse_err(format!("expected key=value, got '{part}'")))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

/// Parse a body description; `base_dir` resolves relative file names.
pub fn parse_body(spec: &str, base_dir: &Path) -> Result<ConvexBody> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(parse_err("empty body description"));
    }
    if !spec.contains('=') && !spec.contains(':') {
        return load_body_file(&base_dir.join(spec));
    }
    let map = if spec.contains(' ') || spec.starts_with("kind=") {
        key_values(spec.split_whitespace())?
    } else {
        let mut parts = spec.split(':');
        let kind = parts.next().unwrap_or_default().to_string();
        let positional = parts.next().unwrap_or_default();
        let mut map = key_values(parts)?;
        let slot = match kind.as_str() {
            "ball" => "radius",
            "profile" => "N",
            other => return Err(parse_err(format!("no shorthand for body kind '{other}'"))),
        };
        if !positional.is_empty() {
            map.insert(slot.into(), positional.into());
        }
        map.insert("kind".into(), kind);
        map
    };
    from_map(&map, base_dir)
}

fn from_map(map: &BTreeMap<String, String>, base_dir: &Path) -> Result<ConvexBody> {
    match map.get("kind").map(String::as_str) {
        Some("ball") => ConvexBody::ball(dimension(map)?, number(map, "radius")?),
        Some("profile") => make_counterexample_body(dimension(map)?, number(map, "p")?, number(map, "N")?),
        Some("tabulated") => {
            let file = map.get("file").ok_or_else(|| parse_err("tabulated body lacks file="))?;
            let (angles, rho) = read_radial_csv(&base_dir.join(file))?;
            ConvexBody::tabulated(dimension(map)?, angles, rho)
        }
        Some("perturbed") => {
            let file = map.get("base").ok_or_else(|| parse_err("perturbed body lacks base="))?;
            let base = load_body_file(&base_dir.join(file))?;
            let alpha = match map.get("alpha") {
                Some(_) => number(map, "alpha")?,
                None => DEFAULT_ALPHA,
            };
            let bump = Bump {
                center: number(map, "bump_center")?,
                width: number(map, "bump_width")?,
            };
            let v = bump_series(base.n, bump)?;
            let g = perturbation_for(base.n, alpha, &v)?;
            perturb_body(&base, &g, number(map, "eps")?)
        }
        Some(other) => Err(parse_err(format!("unknown body kind '{other}'"))),
        None => Err(parse_err("body description lacks kind=")),
    }
}

fn parent(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

/// A JSON body or a text file holding one description.
pub fn load_body_file(path: &Path) -> Result<ConvexBody> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read body file {}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{') {
        let body: ConvexBody = serde_json::from_str(&text)
            .map_err(|e| parse_err(format!("{}: {e}", path.display())))?;
        return body.rebuild();
    }
    let line = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .ok_or_else(|| parse_err(format!("{} holds no body description", path.display())))?;
    parse_body(line, &parent(path))
}

fn read_radial_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| parse_err(format!("{} is empty", path.display())))?
        .split(',')
        .map(str::trim)
        .collect();
    if header != ["angle_rad", "rho"] {
        return Err(parse_err(format!(
            "{}: header must be 'angle_rad,rho', got '{}'",
            path.display(),
            header.join(",")
        )));
    }
    let mut angles = Vec::new();
    let mut rho = Vec::new();
    for (i, line) in lines.enumerate() {
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let bad = || parse_err(format!("{}: bad row {}: '{line}'", path.display(), i + 2));
        if cols.len() != 2 {
            return Err(bad());
        }
        angles.push(cols[0].parse().map_err(|_| bad())?);
        rho.push(cols[1].parse().map_err(|_| bad())?);
    }
    Ok((angles, rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::BodyKind;

    #[test]
    fn shorthand_and_long_form_agree() {
        let here = Path::new(".");
        let a = parse_body("ball:1:n=3", here).unwrap();
        let b = parse_body("kind=ball radius=1 n=3", here).unwrap();
        assert_eq!(a.n, 3);
        assert!(matches!(a.kind, BodyKind::Ball { radius } if radius == 1.0));
        assert!(matches!(b.kind, BodyKind::Ball { radius } if radius == 1.0));
        let p = parse_body("profile:10:n=5:p=-0.5", here).unwrap();
        let q = parse_body("kind=profile n=5 p=-0.5 N=10", here).unwrap();
        assert_eq!(p.radial_at(0.3), q.radial_at(0.3));
    }

    #[test]
    fn malformed_descriptions() {
        let here = Path::new(".");
        for bad in ["kind=ball n=3", "kind=cube n=3 radius=1", "ball:x:n=3", "kind=ball radius=1 n=three", "cone:1"] {
            assert!(matches!(parse_body(bad, here), Err(Error::Parse(_))), "{bad}");
        }
    }
}
