//! Kernel-spec files.
//!
//! One `key = value` pair per line. Blank lines are ignored and `#` starts a
//! comment that runs to the end of the line. Keys:
//!
//! | key     | form         | value                               | default |
//! |---------|--------------|-------------------------------------|---------|
//! | `form`  | both         | `parametric` or `cosh`              | required |
//! | `k`     | `parametric` | positive real                       | `1`     |
//! | `m`     | `parametric` | integer ≥ 1                         | required |
//! | `mu`    | `parametric` | nonnegative real                    | `0`     |
//! | `betas` | `parametric` | comma-separated positive reals      | empty   |
//! | `a`     | `cosh`       | positive real                       | required |
//!
//! Keys may appear in any order but at most once.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use lpfz_core::{Kernel, KernelSpec};

pub fn parse_kernel_spec(text: &str) -> Result<KernelSpec> {
    let mut fields: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {line_no}: expected `key = value`"))?;
        let key = key.trim().to_ascii_lowercase();
        if !matches!(key.as_str(), "form" | "k" | "m" | "mu" | "betas" | "a") {
            bail!("line {line_no}: unknown key `{key}`");
        }
        if let Some((first, _)) = fields.get(&key) {
            bail!("line {line_no}: `{key}` already set on line {first}");
        }
        fields.insert(key, (line_no, value.trim().to_string()));
    }

    let take = |fields: &mut BTreeMap<String, (usize, String)>, key: &str| fields.remove(key);
    let (_, form) = take(&mut fields, "form").ok_or_else(|| anyhow!("missing `form`"))?;
    let spec = match form.to_ascii_lowercase().as_str() {
        "parametric" => {
            let k = take(&mut fields, "k").map(|f| real(&f, "k")).transpose()?.unwrap_or(1.0);
            let (line, m) = take(&mut fields, "m").ok_or_else(|| anyhow!("parametric form needs `m`"))?;
            let m = m.parse::<u32>().with_context(|| format!("line {line}: `m` must be a nonnegative integer"))?;
            let mu = take(&mut fields, "mu").map(|f| real(&f, "mu")).transpose()?.unwrap_or(0.0);
            let betas = match take(&mut fields, "betas") {
                Some((line, v)) if !v.is_empty() => v
                    .split(',')
                    .map(|b| real(&(line, b.trim().to_string()), "betas"))
                    .collect::<Result<Vec<_>>>()?,
                _ => Vec::new(),
            };
            KernelSpec::Parametric { k, m, mu, betas }
        }
        "cosh" => {
            let a = take(&mut fields, "a").ok_or_else(|| anyhow!("cosh form needs `a`"))?;
            KernelSpec::Cosh { a: real(&a, "a")? }
        }
        other => bail!("unknown form `{other}` (expected `parametric` or `cosh`)"),
    };
    if let Some((key, (line, _))) = fields.into_iter().next() {
        bail!("line {line}: `{key}` does not apply to form `{form}`");
    }
    Ok(spec)
}

fn real((line, value): &(usize, String), key: &str) -> Result<f64> {
    let v: f64 = value.parse().with_context(|| format!("line {line}: `{key}` is not a number: `{value}`"))?;
    if !v.is_finite() {
        bail!("line {line}: `{key}` must be finite");
    }
    Ok(v)
}

/// Reads, parses and validates a kernel-spec file.
pub fn load_kernel(path: &Path) -> Result<Kernel> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read kernel file {}", path.display()))?;
    let spec = parse_kernel_spec(&text).with_context(|| format!("in kernel file {}", path.display()))?;
    spec.validate().with_context(|| format!("kernel file {} is not admissible", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parametric_with_defaults() {
        let spec = parse_kernel_spec("form = parametric\nm = 2\n").unwrap();
        assert_eq!(spec, KernelSpec::monomial(2));
    }

    #[test]
    fn full_parametric_with_comments() {
        let text = "# t^4 e^{t^2} (1 + t^2/4)\nform = parametric  # shape\nk = 2.5\nm=2\nmu = 1\nbetas = 2, 3.5\n\n";
        let spec = parse_kernel_spec(text).unwrap();
        assert_eq!(spec, KernelSpec::Parametric { k: 2.5, m: 2, mu: 1.0, betas: vec![2.0, 3.5] });
    }

    #[test]
    fn cosh_form() {
        assert_eq!(parse_kernel_spec("a = 0.5\nform = cosh").unwrap(), KernelSpec::cosh(0.5));
    }

    #[test]
    fn empty_betas_is_allowed() {
        let spec = parse_kernel_spec("form = parametric\nm = 3\nbetas =").unwrap();
        assert_eq!(spec, KernelSpec::monomial(3));
    }

    #[test]
    fn rejects_malformed_input() {
        for text in [
            "",
            "m = 2",
            "form = parametric",
            "form = parametric\nm = 2\nm = 3",
            "form = parametric\nm = two",
            "form = parametric\nm = -1",
            "form = parametric\nm = 2\nk = nan",
            "form = parametric\nm = 2\na = 1",
            "form = cosh\na = 1\nm = 2",
            "form = cosh",
            "form = gaussian\nm = 1",
            "form = parametric\nm = 2\nbeta = 1",
            "form parametric",
            "form = parametric\nm = 2\nbetas = 1,,2",
        ] {
            assert!(parse_kernel_spec(text).is_err(), "{text:?}");
        }
    }
}
