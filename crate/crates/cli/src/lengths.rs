//! Parsing of `--length` lists such as `40`, `40,48,1008` or `40-96`.

use anyhow::{bail, Context};
use qppsearch_core::defaults;

/// Expands a comma-separated list of lengths and inclusive ranges. Ranges
/// cover only the lengths of the defaults table; single values may be any
/// length. The result is sorted and free of duplicates.
pub fn parse_lengths(spec: &str) -> anyhow::Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((lo, hi)) => {
                let lo: usize = lo.trim().parse().with_context(|| format!("bad range start in {part:?}"))?;
                let hi: usize = hi.trim().parse().with_context(|| format!("bad range end in {part:?}"))?;
                if lo > hi {
                    bail!("empty range {part:?}");
                }
                let before = out.len();
                out.extend(defaults::lengths().filter(|l| (lo..=hi).contains(l)));
                if out.len() == before {
                    bail!("no table lengths in {part:?}");
                }
            }
            None => out.push(part.parse().with_context(|| format!("bad length {part:?}"))?),
        }
    }
    if out.is_empty() {
        bail!("no lengths given");
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_lengths("40").unwrap(), vec![40]);
        assert_eq!(parse_lengths("56,40").unwrap(), vec![40, 56]);
        assert_eq!(parse_lengths("40-64").unwrap(), vec![40, 48, 56, 64]);
        assert_eq!(parse_lengths("500-560,48").unwrap(), vec![48, 504, 512, 528, 544, 560]);
        assert_eq!(parse_lengths("17").unwrap(), vec![17]);
        assert!(parse_lengths("").is_err());
        assert!(parse_lengths("41-47").is_err());
        assert!(parse_lengths("60-50").is_err());
        assert!(parse_lengths("x").is_err());
    }
}
